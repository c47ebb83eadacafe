#include "fedprov/recording_backend.hpp"

#include "fedprov/error.hpp"

namespace fedprov {

void RecordingBackend::note(const char* name) {
    std::scoped_lock lock(mutex_);
    calls_.emplace_back(name);
}

std::vector<BackendUser> RecordingBackend::users_list() {
    note("users.list");
    return inner_.users_list();
}

std::vector<BackendRole> RecordingBackend::roles_list() {
    note("roles.list");
    return inner_.roles_list();
}

std::vector<BackendProject> RecordingBackend::projects_list() {
    note("projects.list");
    return inner_.projects_list();
}

BackendUser RecordingBackend::users_create(const LocalUserSpec& spec,
                                           const std::optional<std::string>& mail) {
    note("users.create");
    return inner_.users_create(spec, mail);
}

BackendProject RecordingBackend::projects_create(const std::string& name, const std::string& domain_id) {
    note("projects.create");
    return inner_.projects_create(name, domain_id);
}

BackendRole RecordingBackend::roles_create(const std::string& name) {
    note("roles.create");
    return inner_.roles_create(name);
}

void RecordingBackend::roles_grant(const std::string& user_id, const std::string& role_id,
                                   const std::string& project_id) {
    note("roles.grant");
    inner_.roles_grant(user_id, role_id, project_id);
}

void RecordingBackend::roles_revoke(const std::string& user_id, const std::string& role_id,
                                    const std::string& project_id) {
    note("roles.revoke");
    inner_.roles_revoke(user_id, role_id, project_id);
}

BackendUser RecordingBackend::users_update(const std::string& user_id,
                                           const std::optional<std::string>& mail,
                                           const std::optional<bool>& enabled) {
    note("users.update");
    return inner_.users_update(user_id, mail, enabled);
}

BackendSnapshot RecordingBackend::snapshot() {
    // A snapshot is by contract composed of the list reads only.
    note("users.list");
    note("roles.list");
    note("projects.list");
    return inner_.snapshot();
}

std::vector<std::string> RecordingBackend::calls() const {
    std::scoped_lock lock(mutex_);
    return calls_;
}

std::set<std::string> RecordingBackend::distinct_names() const {
    std::scoped_lock lock(mutex_);
    return {calls_.begin(), calls_.end()};
}

size_t RecordingBackend::call_count() const {
    std::scoped_lock lock(mutex_);
    return calls_.size();
}

void RecordingBackend::reset() {
    std::scoped_lock lock(mutex_);
    calls_.clear();
}

void FaultInjectionBackend::spend() {
    std::scoped_lock lock(mutex_);
    if (remaining_ok_ == 0) raise(Errc::BackendUnavailable, "injected backend outage");
    --remaining_ok_;
}

std::vector<BackendUser> FaultInjectionBackend::users_list() {
    spend();
    return inner_.users_list();
}

std::vector<BackendRole> FaultInjectionBackend::roles_list() {
    spend();
    return inner_.roles_list();
}

std::vector<BackendProject> FaultInjectionBackend::projects_list() {
    spend();
    return inner_.projects_list();
}

BackendUser FaultInjectionBackend::users_create(const LocalUserSpec& spec,
                                                const std::optional<std::string>& mail) {
    spend();
    return inner_.users_create(spec, mail);
}

BackendProject FaultInjectionBackend::projects_create(const std::string& name,
                                                      const std::string& domain_id) {
    spend();
    return inner_.projects_create(name, domain_id);
}

BackendRole FaultInjectionBackend::roles_create(const std::string& name) {
    spend();
    return inner_.roles_create(name);
}

void FaultInjectionBackend::roles_grant(const std::string& user_id, const std::string& role_id,
                                        const std::string& project_id) {
    spend();
    inner_.roles_grant(user_id, role_id, project_id);
}

void FaultInjectionBackend::roles_revoke(const std::string& user_id, const std::string& role_id,
                                         const std::string& project_id) {
    spend();
    inner_.roles_revoke(user_id, role_id, project_id);
}

BackendUser FaultInjectionBackend::users_update(const std::string& user_id,
                                                const std::optional<std::string>& mail,
                                                const std::optional<bool>& enabled) {
    spend();
    return inner_.users_update(user_id, mail, enabled);
}

BackendSnapshot FaultInjectionBackend::snapshot() {
    spend();
    return inner_.snapshot();
}

}  // namespace fedprov
