#include "fedprov/mock_backend.hpp"

#include <algorithm>

#include "fedprov/error.hpp"

namespace fedprov {

MockBackend::MockBackend(const MockBackend& other) {
    std::scoped_lock lock(other.mutex_);
    users_ = other.users_;
    projects_ = other.projects_;
    roles_ = other.roles_;
    grants_ = other.grants_;
    next_id_ = other.next_id_;
}

std::vector<BackendUser> MockBackend::users_list() {
    std::scoped_lock lock(mutex_);
    return users_;
}

std::vector<BackendRole> MockBackend::roles_list() {
    std::scoped_lock lock(mutex_);
    return roles_;
}

std::vector<BackendProject> MockBackend::projects_list() {
    std::scoped_lock lock(mutex_);
    return projects_;
}

std::string MockBackend::next_id_locked(const char* kind) {
    return std::string(kind) + "-" + std::to_string(next_id_++);
}

BackendUser MockBackend::users_create(const LocalUserSpec& spec, const std::optional<std::string>& mail) {
    if (spec.name.empty()) raise(Errc::ConfigError, "user name must be non-empty");
    std::scoped_lock lock(mutex_);
    for (const auto& u : users_)
        if (u.name == spec.name && u.domain_id == spec.domain_id)
            raise(Errc::Conflict, "user '" + spec.name + "' already exists in domain '" + spec.domain_id + "'");
    BackendUser user{next_id_locked("u"), spec.name, spec.domain_id, mail, true};
    users_.push_back(user);
    return user;
}

BackendProject MockBackend::projects_create(const std::string& name, const std::string& domain_id) {
    if (name.empty()) raise(Errc::ConfigError, "project name must be non-empty");
    std::scoped_lock lock(mutex_);
    for (const auto& p : projects_)
        if (p.name == name && p.domain_id == domain_id)
            raise(Errc::Conflict, "project '" + name + "' already exists in domain '" + domain_id + "'");
    BackendProject project{next_id_locked("p"), name, domain_id};
    projects_.push_back(project);
    return project;
}

BackendRole MockBackend::roles_create(const std::string& name) {
    if (name.empty()) raise(Errc::ConfigError, "role name must be non-empty");
    std::scoped_lock lock(mutex_);
    for (const auto& r : roles_)
        if (r.name == name) raise(Errc::Conflict, "role '" + name + "' already exists");
    BackendRole role{next_id_locked("r"), name};
    roles_.push_back(role);
    return role;
}

void MockBackend::roles_grant(const std::string& user_id, const std::string& role_id,
                              const std::string& project_id) {
    std::scoped_lock lock(mutex_);
    bool user_ok = std::any_of(users_.begin(), users_.end(),
                               [&](const BackendUser& u) { return u.id == user_id; });
    bool role_ok = std::any_of(roles_.begin(), roles_.end(),
                               [&](const BackendRole& r) { return r.id == role_id; });
    bool project_ok = std::any_of(projects_.begin(), projects_.end(),
                                  [&](const BackendProject& p) { return p.id == project_id; });
    if (!user_ok || !role_ok || !project_ok)
        raise(Errc::UnknownEntity, "grant references an unknown user, role or project id");
    grants_.insert({user_id, role_id, project_id});
}

void MockBackend::roles_revoke(const std::string& user_id, const std::string& role_id,
                               const std::string& project_id) {
    std::scoped_lock lock(mutex_);
    grants_.erase({user_id, role_id, project_id});
}

BackendUser* MockBackend::user_by_id_locked(const std::string& id) {
    auto it = std::find_if(users_.begin(), users_.end(),
                           [&](const BackendUser& u) { return u.id == id; });
    return it == users_.end() ? nullptr : &*it;
}

BackendUser MockBackend::users_update(const std::string& user_id, const std::optional<std::string>& mail,
                                      const std::optional<bool>& enabled) {
    std::scoped_lock lock(mutex_);
    BackendUser* user = user_by_id_locked(user_id);
    if (!user) raise(Errc::UnknownEntity, "no user with id '" + user_id + "'");
    if (mail) user->mail = *mail;
    if (enabled) user->enabled = *enabled;
    return *user;
}

BackendSnapshot MockBackend::snapshot() {
    std::scoped_lock lock(mutex_);
    BackendSnapshot snap;
    snap.users = users_;
    snap.projects = projects_;
    snap.roles = roles_;
    snap.grants = grants_;
    return snap;
}

}  // namespace fedprov
