#pragma once

#include <mutex>

#include "fedprov/backend.hpp"

namespace fedprov {

/// Decorator that records the name of every backend operation invoked.
/// snapshot() is recorded as the three list calls it is composed of. Tests
/// use the recording to pin down the call surface and to prove that abandoned
/// logins never touch the backend.
class RecordingBackend : public Backend {
public:
    explicit RecordingBackend(Backend& inner) : inner_(inner) {}

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

    std::vector<std::string> calls() const;
    std::set<std::string> distinct_names() const;
    size_t call_count() const;
    void reset();

private:
    void note(const char* name);

    Backend& inner_;
    mutable std::mutex mutex_;
    std::vector<std::string> calls_;
};

/// Decorator that fails calls with BackendUnavailable, either from the start
/// or after a budget of successful calls. Used to exercise outage handling.
class FaultInjectionBackend : public Backend {
public:
    explicit FaultInjectionBackend(Backend& inner, size_t calls_before_failure = 0)
        : inner_(inner), remaining_ok_(calls_before_failure) {}

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
    void spend();

    Backend& inner_;
    std::mutex mutex_;
    size_t remaining_ok_;
};

}  // namespace fedprov
