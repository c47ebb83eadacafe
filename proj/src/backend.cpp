#include "fedprov/backend.hpp"

#include <algorithm>

namespace fedprov {

const BackendUser* BackendSnapshot::find_user(const std::string& name, const std::string& domain_id) const {
    auto it = std::find_if(users.begin(), users.end(), [&](const BackendUser& u) {
        return u.name == name && u.domain_id == domain_id;
    });
    return it == users.end() ? nullptr : &*it;
}

const BackendProject* BackendSnapshot::find_project(const std::string& name,
                                                    const std::string& domain_id) const {
    auto it = std::find_if(projects.begin(), projects.end(), [&](const BackendProject& p) {
        return p.name == name && p.domain_id == domain_id;
    });
    return it == projects.end() ? nullptr : &*it;
}

const BackendRole* BackendSnapshot::find_role(const std::string& name) const {
    auto it = std::find_if(roles.begin(), roles.end(),
                           [&](const BackendRole& r) { return r.name == name; });
    return it == roles.end() ? nullptr : &*it;
}

const BackendUser* BackendSnapshot::user_by_id(const std::string& id) const {
    auto it = std::find_if(users.begin(), users.end(),
                           [&](const BackendUser& u) { return u.id == id; });
    return it == users.end() ? nullptr : &*it;
}

const BackendProject* BackendSnapshot::project_by_id(const std::string& id) const {
    auto it = std::find_if(projects.begin(), projects.end(),
                           [&](const BackendProject& p) { return p.id == id; });
    return it == projects.end() ? nullptr : &*it;
}

const BackendRole* BackendSnapshot::role_by_id(const std::string& id) const {
    auto it = std::find_if(roles.begin(), roles.end(),
                           [&](const BackendRole& r) { return r.id == id; });
    return it == roles.end() ? nullptr : &*it;
}

std::set<NamedGrant> BackendSnapshot::named_grants() const {
    std::set<NamedGrant> out;
    for (const auto& grant : grants) {
        const auto* user = user_by_id(grant.user_id);
        const auto* project = project_by_id(grant.project_id);
        const auto* role = role_by_id(grant.role_id);
        if (user && project && role) out.insert({user->name, project->name, role->name});
    }
    return out;
}

}  // namespace fedprov
