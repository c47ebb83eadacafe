#pragma once

#include <random>
#include <string>
#include <vector>

#include "fedprov/entitlements.hpp"
#include "fedprov/ledger.hpp"
#include "fedprov/mock_backend.hpp"

namespace fedprov::testing {

/// Populates a small random reconciliation instance: backend contents, a
/// desired state for one user, and a ledger whose live set is a mix of real
/// grants and stale entries.
inline void random_instance(std::mt19937_64& rng, MockBackend& backend, DesiredState& desired,
                            GrantsLedger& ledger) {
    const std::string domain = "default";
    const std::vector<std::string> user_pool = {"u0", "u1", "u2", "u3", "u4"};
    const std::vector<std::string> project_pool = {"p0", "p1", "p2", "p3", "p4"};
    const std::vector<std::string> role_pool = {"r0", "r1", "r2", "r3", "r4"};

    auto pick = [&rng](const std::vector<std::string>& pool) { return pool[rng() % pool.size()]; };
    auto coin = [&rng](int percent) { return static_cast<int>(rng() % 100) < percent; };

    std::vector<BackendUser> users;
    std::vector<BackendProject> projects;
    std::vector<BackendRole> roles;
    for (const auto& name : user_pool)
        if (coin(60))
            users.push_back(backend.users_create({name, domain, "local"},
                                                 coin(40) ? std::optional<std::string>(name + "@old")
                                                          : std::nullopt));
    for (const auto& name : project_pool)
        if (coin(60)) projects.push_back(backend.projects_create(name, domain));
    for (const auto& name : role_pool)
        if (coin(60)) roles.push_back(backend.roles_create(name));

    size_t grant_count = rng() % 16;
    for (size_t i = 0; i < grant_count && !users.empty() && !projects.empty() && !roles.empty(); ++i) {
        const auto& user = users[rng() % users.size()];
        const auto& project = projects[rng() % projects.size()];
        const auto& role = roles[rng() % roles.size()];
        backend.roles_grant(user.id, role.id, project.id);
        // Roughly half of the existing grants were made by the service.
        if (coin(50)) ledger.record_granted(user.name, project.name, role.name);
    }

    // Some ledger history that no longer matches the backend: dead entries
    // (granted then revoked) and stale ones (grant later removed by hand).
    for (int i = 0; i < 2; ++i) {
        if (coin(30)) {
            std::string user = pick(user_pool);
            std::string project = pick(project_pool);
            std::string role = pick(role_pool);
            ledger.record_granted(user, project, role);
            if (coin(50)) ledger.record_revoked(user, project, role);
        }
    }

    desired.user = {pick(user_pool), domain, "local"};
    desired.mail = coin(50) ? std::optional<std::string>(desired.user.name + "@new") : std::nullopt;
    size_t assignment_count = rng() % 7;
    for (size_t i = 0; i < assignment_count; ++i)
        desired.assignments.insert({pick(project_pool), pick(role_pool)});
}

}  // namespace fedprov::testing
