#include "fedprov/planner.hpp"

#include <algorithm>
#include <map>

#include "fedprov/error.hpp"

namespace fedprov {

using nlohmann::json;

const char* step_kind_name(StepKind kind) {
    switch (kind) {
    case StepKind::CreateProject: return "create_project";
    case StepKind::CreateRole: return "create_role";
    case StepKind::CreateUser: return "create_user";
    case StepKind::Grant: return "grant";
    case StepKind::Revoke: return "revoke";
    case StepKind::UpdateMail: return "update_mail";
    }
    return "unknown";
}

const char* step_status_name(StepStatus status) {
    switch (status) {
    case StepStatus::Ok: return "ok";
    case StepStatus::ConflictResolved: return "conflict_resolved";
    case StepStatus::Failed: return "failed";
    case StepStatus::Skipped: return "skipped";
    }
    return "unknown";
}

std::string PlanStep::describe() const {
    switch (kind) {
    case StepKind::CreateProject: return "create project '" + project + "' in domain '" + domain_id + "'";
    case StepKind::CreateRole: return "create role '" + role + "'";
    case StepKind::CreateUser: return "create user '" + user + "' in domain '" + domain_id + "'";
    case StepKind::Grant: return "grant '" + role + "' on '" + project + "' to '" + user + "'";
    case StepKind::Revoke: return "revoke '" + role + "' on '" + project + "' from '" + user + "'";
    case StepKind::UpdateMail: return "update mail of '" + user + "' to '" + mail.value_or("") + "'";
    }
    return "unknown step";
}

json PlanStep::to_json() const {
    json node{{"kind", step_kind_name(kind)}};
    if (!user.empty()) node["user"] = user;
    if (!project.empty()) node["project"] = project;
    if (!role.empty()) node["role"] = role;
    if (!domain_id.empty()) node["domain_id"] = domain_id;
    if (!user_type.empty()) node["user_type"] = user_type;
    if (mail) node["mail"] = *mail;
    return node;
}

std::string ProvisioningPlan::render_text() const {
    if (steps.empty()) return "plan: empty\n";
    std::string out = "plan: " + std::to_string(steps.size()) + " step(s)\n";
    for (size_t i = 0; i < steps.size(); ++i)
        out += "  " + std::to_string(i + 1) + ". " + steps[i].describe() + "\n";
    return out;
}

json ProvisioningPlan::to_json() const {
    json arr = json::array();
    for (const auto& step : steps) arr.push_back(step.to_json());
    return json{{"steps", std::move(arr)}};
}

ProvisioningPlan compute_plan(const BackendSnapshot& snapshot, const DesiredState& desired,
                              const GrantsLedger& ledger) {
    ProvisioningPlan plan;
    const std::string& user_name = desired.user.name;
    const std::string& domain = desired.user.domain_id;

    std::set<std::string> wanted_projects;
    std::set<std::string> wanted_roles;
    for (const auto& a : desired.assignments) {
        wanted_projects.insert(a.project);
        wanted_roles.insert(a.role);
    }

    for (const auto& project : wanted_projects)
        if (!snapshot.find_project(project, domain))
            plan.steps.push_back({StepKind::CreateProject, "", project, "", domain, "", std::nullopt});

    for (const auto& role : wanted_roles)
        if (!snapshot.find_role(role))
            plan.steps.push_back({StepKind::CreateRole, "", "", role, "", "", std::nullopt});

    const BackendUser* existing = snapshot.find_user(user_name, domain);
    if (!existing)
        plan.steps.push_back(
            {StepKind::CreateUser, user_name, "", "", domain, desired.user.user_type, desired.mail});

    std::set<NamedGrant> current;
    for (const auto& grant : snapshot.named_grants())
        if (grant.user == user_name) current.insert(grant);

    for (const auto& a : desired.assignments)
        if (!current.contains({user_name, a.project, a.role}))
            plan.steps.push_back({StepKind::Grant, user_name, a.project, a.role, domain, "", std::nullopt});

    // Mail tracks the release only while the release carries one; an absent
    // mail attribute never erases a stored address.
    if (existing && desired.mail && existing->mail != desired.mail)
        plan.steps.push_back({StepKind::UpdateMail, user_name, "", "", domain, "", desired.mail});

    for (const auto& grant : ledger.live()) {
        if (grant.user != user_name) continue;
        if (desired.assignments.contains({grant.project, grant.role})) continue;
        if (!current.contains(grant)) continue;  // already gone; nothing to undo
        plan.steps.push_back(
            {StepKind::Revoke, grant.user, grant.project, grant.role, domain, "", std::nullopt});
    }

    return plan;
}

namespace {

/// Name -> id resolution cache refreshed from the backend on demand.
class EntityResolver {
public:
    explicit EntityResolver(Backend& backend) : backend_(backend) {}

    std::string user_id(const std::string& name, const std::string& domain) {
        auto key = name + "\x1f" + domain;
        if (auto it = users_.find(key); it != users_.end()) return it->second;
        for (const auto& u : backend_.users_list()) users_[u.name + "\x1f" + u.domain_id] = u.id;
        if (auto it = users_.find(key); it != users_.end()) return it->second;
        raise(Errc::UnknownEntity, "user '" + name + "' not found in domain '" + domain + "'");
    }

    std::string project_id(const std::string& name, const std::string& domain) {
        auto key = name + "\x1f" + domain;
        if (auto it = projects_.find(key); it != projects_.end()) return it->second;
        for (const auto& p : backend_.projects_list()) projects_[p.name + "\x1f" + p.domain_id] = p.id;
        if (auto it = projects_.find(key); it != projects_.end()) return it->second;
        raise(Errc::UnknownEntity, "project '" + name + "' not found in domain '" + domain + "'");
    }

    std::string role_id(const std::string& name) {
        if (auto it = roles_.find(name); it != roles_.end()) return it->second;
        for (const auto& r : backend_.roles_list()) roles_[r.name] = r.id;
        if (auto it = roles_.find(name); it != roles_.end()) return it->second;
        raise(Errc::UnknownEntity, "role '" + name + "' not found");
    }

    void learn_user(const BackendUser& u) { users_[u.name + "\x1f" + u.domain_id] = u.id; }
    void learn_project(const BackendProject& p) { projects_[p.name + "\x1f" + p.domain_id] = p.id; }
    void learn_role(const BackendRole& r) { roles_[r.name] = r.id; }

private:
    Backend& backend_;
    std::map<std::string, std::string> users_;
    std::map<std::string, std::string> projects_;
    std::map<std::string, std::string> roles_;
};

}  // namespace

bool ExecutionReport::ok() const {
    return std::all_of(outcomes.begin(), outcomes.end(), [](const StepOutcome& o) {
        return o.status == StepStatus::Ok || o.status == StepStatus::ConflictResolved;
    });
}

json ExecutionReport::to_json() const {
    json arr = json::array();
    for (const auto& o : outcomes)
        arr.push_back({{"step", o.step.to_json()},
                       {"status", step_status_name(o.status)},
                       {"message", o.message}});
    return json{{"outcomes", std::move(arr)}};
}

ExecutionReport execute_plan(const ProvisioningPlan& plan, Backend& backend, GrantsLedger& ledger) {
    ExecutionReport report;
    EntityResolver resolver(backend);

    bool aborted = false;
    for (const auto& step : plan.steps) {
        if (aborted) {
            report.outcomes.push_back({step, StepStatus::Skipped, "not attempted"});
            continue;
        }
        StepOutcome outcome{step, StepStatus::Ok, ""};
        try {
            switch (step.kind) {
            case StepKind::CreateProject:
                try {
                    resolver.learn_project(backend.projects_create(step.project, step.domain_id));
                } catch (const Error& e) {
                    if (e.code() != Errc::Conflict) throw;
                    resolver.project_id(step.project, step.domain_id);  // benign race, re-list
                    outcome.status = StepStatus::ConflictResolved;
                    outcome.message = "already existed";
                }
                break;
            case StepKind::CreateRole:
                try {
                    resolver.learn_role(backend.roles_create(step.role));
                } catch (const Error& e) {
                    if (e.code() != Errc::Conflict) throw;
                    resolver.role_id(step.role);
                    outcome.status = StepStatus::ConflictResolved;
                    outcome.message = "already existed";
                }
                break;
            case StepKind::CreateUser:
                try {
                    resolver.learn_user(
                        backend.users_create({step.user, step.domain_id, step.user_type}, step.mail));
                } catch (const Error& e) {
                    if (e.code() != Errc::Conflict) throw;
                    resolver.user_id(step.user, step.domain_id);
                    outcome.status = StepStatus::ConflictResolved;
                    outcome.message = "already existed";
                }
                break;
            case StepKind::Grant:
                backend.roles_grant(resolver.user_id(step.user, step.domain_id),
                                    resolver.role_id(step.role),
                                    resolver.project_id(step.project, step.domain_id));
                ledger.record_granted(step.user, step.project, step.role);
                break;
            case StepKind::Revoke:
                backend.roles_revoke(resolver.user_id(step.user, step.domain_id),
                                     resolver.role_id(step.role),
                                     resolver.project_id(step.project, step.domain_id));
                ledger.record_revoked(step.user, step.project, step.role);
                break;
            case StepKind::UpdateMail:
                backend.users_update(resolver.user_id(step.user, step.domain_id), step.mail,
                                     std::nullopt);
                break;
            }
        } catch (const Error& e) {
            outcome.status = StepStatus::Failed;
            outcome.message = e.what();
            if (e.code() == Errc::BackendUnavailable) aborted = true;
        }
        report.outcomes.push_back(std::move(outcome));
    }
    return report;
}

}  // namespace fedprov
