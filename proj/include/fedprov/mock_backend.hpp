#pragma once

#include <mutex>

#include "fedprov/backend.hpp"

namespace fedprov {

/// In-memory backend with the semantics the provisioning side relies on:
/// names are unique per kind (projects and users per domain), creates are
/// atomic check-and-insert, grants form a set. Ids are opaque monotonically
/// increasing strings; nothing may depend on their values.
class MockBackend : public Backend {
public:
    MockBackend() = default;
    MockBackend(const MockBackend& other);
    MockBackend& operator=(const MockBackend&) = delete;

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

    BackendSnapshot snapshot() override;

private:
    BackendUser* user_by_id_locked(const std::string& id);
    std::string next_id_locked(const char* kind);

    mutable std::mutex mutex_;
    std::vector<BackendUser> users_;
    std::vector<BackendProject> projects_;
    std::vector<BackendRole> roles_;
    std::set<RoleGrant> grants_;
    uint64_t next_id_ = 1;
};

}  // namespace fedprov
