#include "fedprov/backend_server.hpp"

#include <httplib.h>
#include <json.hpp>

#include "fedprov/error.hpp"

namespace fedprov {

using nlohmann::json;

namespace {

json user_to_json(const BackendUser& u) {
    json node{{"id", u.id}, {"name", u.name}, {"domain_id", u.domain_id}, {"enabled", u.enabled}};
    if (u.mail) node["email"] = *u.mail;
    return node;
}

json project_to_json(const BackendProject& p) {
    return {{"id", p.id}, {"name", p.name}, {"domain_id", p.domain_id}};
}

json role_to_json(const BackendRole& r) {
    return {{"id", r.id}, {"name", r.name}};
}

void reply_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, const Error& e) {
    int status = 500;
    switch (e.code()) {
    case Errc::Conflict: status = 409; break;
    case Errc::UnknownEntity: status = 404; break;
    default: status = 500; break;
    }
    reply_json(res, status, json{{"error", {{"code", errc_name(e.code())}, {"message", e.what()}}}});
}

}  // namespace

BackendServer::BackendServer(Backend& backend, std::string bearer_token)
    : backend_(backend), token_(std::move(bearer_token)), server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

BackendServer::~BackendServer() {
    stop();
}

void BackendServer::install_routes() {
    auto& srv = *server_;

    if (!token_.empty()) {
        srv.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
            if (req.get_header_value("Authorization") != "Bearer " + token_) {
                reply_json(res, 401, json{{"error", "unauthorized"}});
                return httplib::Server::HandlerResponse::Handled;
            }
            return httplib::Server::HandlerResponse::Unhandled;
        });
    }

    srv.Get("/v3/users", [this](const httplib::Request&, httplib::Response& res) {
        json arr = json::array();
        for (const auto& u : backend_.users_list()) arr.push_back(user_to_json(u));
        reply_json(res, 200, json{{"users", std::move(arr)}});
    });

    srv.Post("/v3/users", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            json body = json::parse(req.body);
            const json& u = body.at("user");
            LocalUserSpec spec{u.value("name", ""), u.value("domain_id", ""), u.value("type", "")};
            std::optional<std::string> mail;
            if (u.contains("email") && u.at("email").is_string()) mail = u.at("email").get<std::string>();
            reply_json(res, 201, json{{"user", user_to_json(backend_.users_create(spec, mail))}});
        } catch (const Error& e) {
            reply_error(res, e);
        } catch (const json::exception& e) {
            reply_json(res, 400, json{{"error", e.what()}});
        }
    });

    srv.Patch(R"(/v3/users/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            json body = json::parse(req.body);
            const json& u = body.at("user");
            std::optional<std::string> mail;
            std::optional<bool> enabled;
            if (u.contains("email") && u.at("email").is_string()) mail = u.at("email").get<std::string>();
            if (u.contains("enabled") && u.at("enabled").is_boolean()) enabled = u.at("enabled").get<bool>();
            reply_json(res, 200,
                       json{{"user", user_to_json(backend_.users_update(req.matches[1], mail, enabled))}});
        } catch (const Error& e) {
            reply_error(res, e);
        } catch (const json::exception& e) {
            reply_json(res, 400, json{{"error", e.what()}});
        }
    });

    srv.Get("/v3/projects", [this](const httplib::Request&, httplib::Response& res) {
        json arr = json::array();
        for (const auto& p : backend_.projects_list()) arr.push_back(project_to_json(p));
        reply_json(res, 200, json{{"projects", std::move(arr)}});
    });

    srv.Post("/v3/projects", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            json body = json::parse(req.body);
            const json& p = body.at("project");
            reply_json(res, 201,
                       json{{"project", project_to_json(backend_.projects_create(
                                            p.value("name", ""), p.value("domain_id", "")))}});
        } catch (const Error& e) {
            reply_error(res, e);
        } catch (const json::exception& e) {
            reply_json(res, 400, json{{"error", e.what()}});
        }
    });

    srv.Get("/v3/roles", [this](const httplib::Request&, httplib::Response& res) {
        json arr = json::array();
        for (const auto& r : backend_.roles_list()) arr.push_back(role_to_json(r));
        reply_json(res, 200, json{{"roles", std::move(arr)}});
    });

    srv.Post("/v3/roles", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            json body = json::parse(req.body);
            reply_json(res, 201,
                       json{{"role", role_to_json(backend_.roles_create(
                                         body.at("role").value("name", "")))}});
        } catch (const Error& e) {
            reply_error(res, e);
        } catch (const json::exception& e) {
            reply_json(res, 400, json{{"error", e.what()}});
        }
    });

    // Grant / revoke / per-user role listing under a project.
    srv.Put(R"(/v3/projects/([^/]+)/users/([^/]+)/roles/([^/]+))",
            [this](const httplib::Request& req, httplib::Response& res) {
                try {
                    backend_.roles_grant(req.matches[2], req.matches[3], req.matches[1]);
                    res.status = 204;
                } catch (const Error& e) {
                    reply_error(res, e);
                }
            });

    srv.Delete(R"(/v3/projects/([^/]+)/users/([^/]+)/roles/([^/]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                   try {
                       backend_.roles_revoke(req.matches[2], req.matches[3], req.matches[1]);
                       res.status = 204;
                   } catch (const Error& e) {
                       reply_error(res, e);
                   }
               });

    srv.Get(R"(/v3/projects/([^/]+)/users/([^/]+)/roles)",
            [this](const httplib::Request& req, httplib::Response& res) {
                const std::string project_id = req.matches[1];
                const std::string user_id = req.matches[2];
                BackendSnapshot snap = backend_.snapshot();
                json arr = json::array();
                for (const auto& grant : snap.grants) {
                    if (grant.project_id != project_id || grant.user_id != user_id) continue;
                    if (const auto* role = snap.role_by_id(grant.role_id))
                        arr.push_back(role_to_json(*role));
                }
                reply_json(res, 200, json{{"roles", std::move(arr)}});
            });
}

int BackendServer::start(const std::string& host, int port) {
    if (port == 0) {
        port_ = server_->bind_to_any_port(host);
    } else {
        if (!server_->bind_to_port(host, port))
            raise(Errc::ConfigError, "cannot bind " + host + ":" + std::to_string(port));
        port_ = port;
    }
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

bool BackendServer::listen(const std::string& host, int port) {
    port_ = port;
    return server_->listen(host, port);
}

void BackendServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace fedprov
