#pragma once

#include <array>
#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fedprov/mapping.hpp"

namespace fedprov {

struct BackendUser {
    std::string id;
    std::string name;
    std::string domain_id;
    std::optional<std::string> mail;
    bool enabled = true;
};

struct BackendProject {
    std::string id;
    std::string name;
    std::string domain_id;
};

struct BackendRole {
    std::string id;
    std::string name;
};

/// One role assignment, by entity id. The triple is unique; granting an
/// existing triple and revoking a missing one are both no-ops.
struct RoleGrant {
    std::string user_id;
    std::string role_id;
    std::string project_id;

    auto operator<=>(const RoleGrant&) const = default;
};

/// A grant in name space, independent of backend ids. Plans and the ledger
/// work entirely in names so they survive backend re-creation.
struct NamedGrant {
    std::string user;
    std::string project;
    std::string role;

    auto operator<=>(const NamedGrant&) const = default;
};

/// Point-in-time read model used for planning.
struct BackendSnapshot {
    std::vector<BackendUser> users;
    std::vector<BackendProject> projects;
    std::vector<BackendRole> roles;
    std::set<RoleGrant> grants;

    const BackendUser* find_user(const std::string& name, const std::string& domain_id) const;
    const BackendProject* find_project(const std::string& name, const std::string& domain_id) const;
    const BackendRole* find_role(const std::string& name) const;
    const BackendUser* user_by_id(const std::string& id) const;
    const BackendProject* project_by_id(const std::string& id) const;
    const BackendRole* role_by_id(const std::string& id) const;

    /// Grants with ids resolved to names. Grants referencing unknown ids are
    /// dropped; a consistent snapshot has none.
    std::set<NamedGrant> named_grants() const;
};

/// The identity backend surface. These nine operations are the only interface
/// the provisioning side is allowed to touch; snapshot() is a composed read
/// built from the list calls and is not an operation of its own.
class Backend {
public:
    virtual ~Backend() = default;

    virtual std::vector<BackendUser> users_list() = 0;
    virtual std::vector<BackendRole> roles_list() = 0;
    virtual std::vector<BackendProject> projects_list() = 0;
    virtual BackendUser users_create(const LocalUserSpec& spec, const std::optional<std::string>& mail) = 0;
    virtual BackendProject projects_create(const std::string& name, const std::string& domain_id) = 0;
    virtual BackendRole roles_create(const std::string& name) = 0;
    virtual void roles_grant(const std::string& user_id, const std::string& role_id,
                             const std::string& project_id) = 0;
    virtual void roles_revoke(const std::string& user_id, const std::string& role_id,
                              const std::string& project_id) = 0;
    virtual BackendUser users_update(const std::string& user_id, const std::optional<std::string>& mail,
                                     const std::optional<bool>& enabled) = 0;

    virtual BackendSnapshot snapshot() = 0;

    /// The complete call surface, used by tests that pin the interface down.
    static constexpr std::array<std::string_view, 9> operation_names() {
        return {"users.list",    "roles.list",   "projects.list",
                "projects.create", "roles.create", "users.create",
                "roles.grant",   "roles.revoke", "users.update"};
    }
};

}  // namespace fedprov
