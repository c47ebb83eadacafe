#include "fedprov/http_backend.hpp"

#include <httplib.h>
#include <json.hpp>

#include "fedprov/error.hpp"

namespace fedprov {

using nlohmann::json;

namespace {

json parse_body(const std::string& body, const std::string& path) {
    json node = json::parse(body, nullptr, false);
    if (node.is_discarded())
        raise(Errc::BackendUnavailable, "backend returned invalid JSON for " + path);
    return node;
}

BackendUser user_from_json(const json& node) {
    BackendUser user;
    user.id = node.value("id", "");
    user.name = node.value("name", "");
    user.domain_id = node.value("domain_id", "");
    if (node.contains("email") && node.at("email").is_string())
        user.mail = node.at("email").get<std::string>();
    user.enabled = node.value("enabled", true);
    return user;
}

BackendProject project_from_json(const json& node) {
    return {node.value("id", ""), node.value("name", ""), node.value("domain_id", "")};
}

BackendRole role_from_json(const json& node) {
    return {node.value("id", ""), node.value("name", "")};
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    client_ = std::make_unique<httplib::Client>(config_.endpoint);
    client_->set_connection_timeout(0, config_.timeout_ms * 1000);
    client_->set_read_timeout(0, config_.timeout_ms * 1000);
    if (!config_.token.empty())
        client_->set_default_headers({{"Authorization", "Bearer " + config_.token}});
}

HttpBackend::~HttpBackend() = default;

namespace {

[[noreturn]] void fail_status(const std::string& path, int status, const std::string& body) {
    if (status == 409) raise(Errc::Conflict, path + ": " + body);
    if (status == 404) raise(Errc::UnknownEntity, path + ": " + body);
    raise(Errc::BackendUnavailable, path + ": HTTP " + std::to_string(status));
}

std::string check(const httplib::Result& res, const std::string& path) {
    if (!res) raise(Errc::BackendUnavailable, path + ": " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) fail_status(path, res->status, res->body);
    return res->body;
}

}  // namespace

std::string HttpBackend::get(const std::string& path) {
    return check(client_->Get(path), path);
}

std::string HttpBackend::post(const std::string& path, const std::string& body) {
    return check(client_->Post(path, body, "application/json"), path);
}

std::string HttpBackend::patch(const std::string& path, const std::string& body) {
    return check(client_->Patch(path, body, "application/json"), path);
}

void HttpBackend::put_no_body(const std::string& path) {
    check(client_->Put(path, "", "application/json"), path);
}

void HttpBackend::del(const std::string& path) {
    check(client_->Delete(path), path);
}

std::vector<BackendUser> HttpBackend::users_list() {
    json node = parse_body(get("/v3/users"), "/v3/users");
    std::vector<BackendUser> out;
    for (const auto& u : node.value("users", json::array())) out.push_back(user_from_json(u));
    return out;
}

std::vector<BackendRole> HttpBackend::roles_list() {
    json node = parse_body(get("/v3/roles"), "/v3/roles");
    std::vector<BackendRole> out;
    for (const auto& r : node.value("roles", json::array())) out.push_back(role_from_json(r));
    return out;
}

std::vector<BackendProject> HttpBackend::projects_list() {
    json node = parse_body(get("/v3/projects"), "/v3/projects");
    std::vector<BackendProject> out;
    for (const auto& p : node.value("projects", json::array())) out.push_back(project_from_json(p));
    return out;
}

BackendUser HttpBackend::users_create(const LocalUserSpec& spec, const std::optional<std::string>& mail) {
    json body{{"user", {{"name", spec.name}, {"domain_id", spec.domain_id}, {"enabled", true}}}};
    if (!spec.user_type.empty()) body["user"]["type"] = spec.user_type;
    if (mail) body["user"]["email"] = *mail;
    json node = parse_body(post("/v3/users", body.dump()), "/v3/users");
    return user_from_json(node.value("user", json::object()));
}

BackendProject HttpBackend::projects_create(const std::string& name, const std::string& domain_id) {
    json body{{"project", {{"name", name}, {"domain_id", domain_id}}}};
    json node = parse_body(post("/v3/projects", body.dump()), "/v3/projects");
    return project_from_json(node.value("project", json::object()));
}

BackendRole HttpBackend::roles_create(const std::string& name) {
    json body{{"role", {{"name", name}}}};
    json node = parse_body(post("/v3/roles", body.dump()), "/v3/roles");
    return role_from_json(node.value("role", json::object()));
}

void HttpBackend::roles_grant(const std::string& user_id, const std::string& role_id,
                              const std::string& project_id) {
    put_no_body("/v3/projects/" + project_id + "/users/" + user_id + "/roles/" + role_id);
}

void HttpBackend::roles_revoke(const std::string& user_id, const std::string& role_id,
                               const std::string& project_id) {
    del("/v3/projects/" + project_id + "/users/" + user_id + "/roles/" + role_id);
}

BackendUser HttpBackend::users_update(const std::string& user_id, const std::optional<std::string>& mail,
                                      const std::optional<bool>& enabled) {
    json body{{"user", json::object()}};
    if (mail) body["user"]["email"] = *mail;
    if (enabled) body["user"]["enabled"] = *enabled;
    json node = parse_body(patch("/v3/users/" + user_id, body.dump()), "/v3/users/" + user_id);
    return user_from_json(node.value("user", json::object()));
}

BackendSnapshot HttpBackend::snapshot() {
    BackendSnapshot snap;
    snap.users = users_list();
    snap.roles = roles_list();
    snap.projects = projects_list();
    for (const auto& project : snap.projects) {
        for (const auto& user : snap.users) {
            const std::string path = "/v3/projects/" + project.id + "/users/" + user.id + "/roles";
            json node = parse_body(get(path), path);
            for (const auto& r : node.value("roles", json::array()))
                snap.grants.insert({user.id, r.value("id", ""), project.id});
        }
    }
    return snap;
}

}  // namespace fedprov
