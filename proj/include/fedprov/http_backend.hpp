#pragma once

#include <memory>
#include <string>

#include "fedprov/backend.hpp"

namespace httplib {
class Client;
}

namespace fedprov {

struct HttpBackendConfig {
    std::string endpoint;  // e.g. http://127.0.0.1:5001
    std::string token;     // sent as Authorization: Bearer <token>
    int timeout_ms = 5000;
};

/// REST client for an identity backend speaking the v3-style subset:
/// /v3/users, /v3/projects, /v3/roles plus grant/revoke under
/// /v3/projects/{p}/users/{u}/roles/{r}. Connection failures, timeouts and
/// 5xx responses surface as BackendUnavailable; 409 as Conflict; 404 as
/// UnknownEntity.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    ~HttpBackend() override;

    std::vector<BackendUser> users_list() override;
    std::vector<BackendRole> roles_list() override;
    std::vector<BackendProject> projects_list() override;
    BackendUser users_create(const LocalUserSpec& spec, const std::optional<std::string>& mail) override;
    BackendProject projects_create(const std::string& name, const std::string& domain_id) override;
    BackendRole roles_create(const std::string& name) override;
    void roles_grant(const std::string& user_id, const std::string& role_id,
                     const std::string& project_id) override;
    void roles_revoke(const std::string& user_id, const std::string& role_id,
                      const std::string& project_id) override;
    BackendUser users_update(const std::string& user_id, const std::optional<std::string>& mail,
                             const std::optional<bool>& enabled) override;

    /// Composed from the list reads; grants are discovered by listing each
    /// user's roles per project.
    BackendSnapshot snapshot() override;

private:
    std::string get(const std::string& path);
    std::string post(const std::string& path, const std::string& body);
    std::string patch(const std::string& path, const std::string& body);
    void put_no_body(const std::string& path);
    void del(const std::string& path);

    HttpBackendConfig config_;
    std::unique_ptr<httplib::Client> client_;
};

}  // namespace fedprov
