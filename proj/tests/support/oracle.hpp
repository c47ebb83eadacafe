#pragma once

#include <optional>
#include <set>
#include <string>
#include <tuple>

#include "fedprov/entitlements.hpp"
#include "fedprov/mock_backend.hpp"

namespace fedprov::testing {

/// Id-free view of a backend, for state equality checks.
struct NamedState {
    std::set<std::tuple<std::string, std::string, std::string, bool>> users;  // name, domain, mail, enabled
    std::set<std::pair<std::string, std::string>> projects;                   // name, domain
    std::set<std::string> roles;
    std::set<NamedGrant> grants;

    bool operator==(const NamedState&) const = default;
};

inline NamedState named_state(Backend& backend) {
    NamedState state;
    auto snap = backend.snapshot();
    for (const auto& u : snap.users)
        state.users.insert({u.name, u.domain_id, u.mail.value_or(""), u.enabled});
    for (const auto& p : snap.projects) state.projects.insert({p.name, p.domain_id});
    for (const auto& r : snap.roles) state.roles.insert(r.name);
    state.grants = snap.named_grants();
    return state;
}

/// Reference reconciliation: writes the end-state a correct provisioning run
/// must reach straight into the backend, by set arithmetic on names. No plan,
/// no planner. The user ends up existing with the desired mail; desired
/// projects and roles exist; the user's grants become
///   desired  ∪  (current grants of the user that are NOT service-made),
/// where service-made is the ledger's live set. Everything else is untouched.
inline void write_desired_directly(MockBackend& backend, const DesiredState& desired,
                                   const std::set<NamedGrant>& ledger_live) {
    const std::string& user_name = desired.user.name;
    const std::string& domain = desired.user.domain_id;

    auto snap = backend.snapshot();
    for (const auto& a : desired.assignments) {
        if (!snap.find_project(a.project, domain)) {
            backend.projects_create(a.project, domain);
            snap = backend.snapshot();
        }
        if (!snap.find_role(a.role)) {
            backend.roles_create(a.role);
            snap = backend.snapshot();
        }
    }

    const BackendUser* existing = snap.find_user(user_name, domain);
    if (!existing) {
        backend.users_create(desired.user, desired.mail);
    } else if (desired.mail && existing->mail != desired.mail) {
        backend.users_update(existing->id, desired.mail, std::nullopt);
    }

    snap = backend.snapshot();
    std::set<NamedGrant> current;
    for (const auto& grant : snap.named_grants())
        if (grant.user == user_name) current.insert(grant);

    std::set<NamedGrant> target;
    for (const auto& a : desired.assignments) target.insert({user_name, a.project, a.role});
    for (const auto& grant : current)
        if (!ledger_live.contains(grant)) target.insert(grant);

    auto ids = [&snap](const NamedGrant& g, const std::string& domain_id) {
        const auto* user = snap.find_user(g.user, domain_id);
        const auto* project = snap.find_project(g.project, domain_id);
        const auto* role = snap.find_role(g.role);
        if (!user || !project || !role)
            throw std::logic_error("oracle: grant references a missing entity");
        return std::tuple{user->id, role->id, project->id};
    };

    for (const auto& grant : current) {
        if (target.contains(grant)) continue;
        auto [uid, rid, pid] = ids(grant, domain);
        backend.roles_revoke(uid, rid, pid);
    }
    for (const auto& grant : target) {
        if (current.contains(grant)) continue;
        auto [uid, rid, pid] = ids(grant, domain);
        backend.roles_grant(uid, rid, pid);
    }
}

}  // namespace fedprov::testing
