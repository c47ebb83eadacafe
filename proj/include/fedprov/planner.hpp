#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedprov/backend.hpp"
#include "fedprov/entitlements.hpp"
#include "fedprov/ledger.hpp"

namespace fedprov {

enum class StepKind { CreateProject, CreateRole, CreateUser, Grant, Revoke, UpdateMail };

const char* step_kind_name(StepKind kind);

/// One backend mutation. Steps carry names, not ids; the executor resolves
/// ids against the live backend at execution time.
struct PlanStep {
    StepKind kind;
    std::string user;       // CreateUser, Grant, Revoke, UpdateMail
    std::string project;    // CreateProject, Grant, Revoke
    std::string role;       // CreateRole, Grant, Revoke
    std::string domain_id;  // CreateProject, CreateUser
    std::string user_type;  // CreateUser
    std::optional<std::string> mail;  // CreateUser, UpdateMail

    bool operator==(const PlanStep&) const = default;

    std::string describe() const;
    nlohmann::json to_json() const;
};

/// Ordered mutations reconciling backend state with a desired state. Creates
/// come first so every later step resolves, revokes come last so a partial
/// execution never removes access it has not replaced.
struct ProvisioningPlan {
    std::vector<PlanStep> steps;

    bool empty() const { return steps.empty(); }
    std::string render_text() const;
    nlohmann::json to_json() const;
};

/// Compares a snapshot with the desired state and emits the reconciling plan.
/// Pure: no backend access. Grants are revoked only when they are live in the
/// ledger, still present in the backend, and no longer desired.
ProvisioningPlan compute_plan(const BackendSnapshot& snapshot, const DesiredState& desired,
                              const GrantsLedger& ledger);

enum class StepStatus { Ok, ConflictResolved, Failed, Skipped };

const char* step_status_name(StepStatus status);

struct StepOutcome {
    PlanStep step;
    StepStatus status;
    std::string message;
};

struct ExecutionReport {
    std::vector<StepOutcome> outcomes;

    bool ok() const;
    nlohmann::json to_json() const;
};

/// Executes the plan in order. Conflict on a create is a benign race: the
/// existing entity is resolved with a fresh list call and execution continues.
/// BackendUnavailable aborts the remaining steps; re-running the pipeline
/// later converges because every step is idempotent. Grant and revoke steps
/// append to the ledger as they succeed.
ExecutionReport execute_plan(const ProvisioningPlan& plan, Backend& backend, GrantsLedger& ledger);

}  // namespace fedprov
