#include <doctest.h>

#include <filesystem>
#include <random>

#include "fedprov/error.hpp"
#include "fedprov/planner.hpp"
#include "fedprov/recording_backend.hpp"
#include "support/oracle.hpp"
#include "support/random_instance.hpp"

using namespace fedprov;
using namespace fedprov::testing;

namespace {

DesiredState desired_alice(std::set<Assignment> assignments,
                           std::optional<std::string> mail = std::nullopt) {
    DesiredState desired;
    desired.user = {"alice@uni.example", "default", "local"};
    desired.assignments = std::move(assignments);
    desired.mail = std::move(mail);
    return desired;
}

}  // namespace

TEST_CASE("fresh user on an empty backend: create everything, then grant") {
    MockBackend backend;
    GrantsLedger ledger;
    auto plan = compute_plan(backend.snapshot(), desired_alice({{"projA", "admin"}}), ledger);

    REQUIRE(plan.steps.size() == 4);
    CHECK(plan.steps[0].kind == StepKind::CreateProject);
    CHECK(plan.steps[0].project == "projA");
    CHECK(plan.steps[1].kind == StepKind::CreateRole);
    CHECK(plan.steps[1].role == "admin");
    CHECK(plan.steps[2].kind == StepKind::CreateUser);
    CHECK(plan.steps[2].user == "alice@uni.example");
    CHECK(plan.steps[3].kind == StepKind::Grant);
    CHECK(plan.steps[3].project == "projA");
    CHECK(plan.steps[3].role == "admin");
}

TEST_CASE("a matching backend yields the empty plan") {
    MockBackend backend;
    GrantsLedger ledger;
    auto desired = desired_alice({{"projA", "admin"}});
    execute_plan(compute_plan(backend.snapshot(), desired, ledger), backend, ledger);

    auto again = compute_plan(backend.snapshot(), desired, ledger);
    CHECK(again.empty());
    CHECK(again.render_text() == "plan: empty\n");
}

TEST_CASE("service-made grants are revoked when no longer desired") {
    MockBackend backend;
    GrantsLedger ledger;
    // First login granted r2 on projA.
    auto first = desired_alice({{"projA", "r2"}});
    execute_plan(compute_plan(backend.snapshot(), first, ledger), backend, ledger);
    CHECK(ledger.live() == std::set<NamedGrant>{{"alice@uni.example", "projA", "r2"}});

    // The entitlement now names r1 instead.
    auto second = desired_alice({{"projA", "r1"}});
    auto plan = compute_plan(backend.snapshot(), second, ledger);

    bool grants_r1 = false, revokes_r2 = false;
    for (const auto& step : plan.steps) {
        if (step.kind == StepKind::Grant) grants_r1 = (step.role == "r1" && step.project == "projA");
        if (step.kind == StepKind::Revoke) revokes_r2 = (step.role == "r2" && step.project == "projA");
    }
    CHECK(grants_r1);
    CHECK(revokes_r2);

    // Reference reconciliation agrees with plan execution.
    MockBackend expected(backend);
    write_desired_directly(expected, second, ledger.live());
    execute_plan(plan, backend, ledger);
    CHECK(named_state(backend) == named_state(expected));
    CHECK(backend.snapshot().named_grants() ==
          std::set<NamedGrant>{{"alice@uni.example", "projA", "r1"}});
}

TEST_CASE("grants made by hand are never revoked") {
    MockBackend backend;
    auto user = backend.users_create({"alice@uni.example", "default", "local"}, std::nullopt);
    auto project = backend.projects_create("projA", "default");
    auto role = backend.roles_create("auditor");
    backend.roles_grant(user.id, role.id, project.id);  // administrator action, not in ledger

    GrantsLedger ledger;
    auto plan = compute_plan(backend.snapshot(), desired_alice({}, std::nullopt), ledger);
    for (const auto& step : plan.steps) CHECK(step.kind != StepKind::Revoke);

    execute_plan(plan, backend, ledger);
    CHECK(backend.snapshot().named_grants() ==
          std::set<NamedGrant>{{"alice@uni.example", "projA", "auditor"}});
}

TEST_CASE("mail difference produces an update step") {
    MockBackend backend;
    backend.users_create({"alice@uni.example", "default", "local"}, "a@x");
    GrantsLedger ledger;

    auto plan = compute_plan(backend.snapshot(), desired_alice({}, "b@x"), ledger);
    REQUIRE(plan.steps.size() == 1);
    CHECK(plan.steps[0].kind == StepKind::UpdateMail);
    CHECK(plan.steps[0].mail == "b@x");

    execute_plan(plan, backend, ledger);
    CHECK(backend.users_list()[0].mail == "b@x");

    // Same mail: nothing to do. Absent mail: stored value is left alone.
    CHECK(compute_plan(backend.snapshot(), desired_alice({}, "b@x"), ledger).empty());
    CHECK(compute_plan(backend.snapshot(), desired_alice({}, std::nullopt), ledger).empty());
}

TEST_CASE("executing a plan twice is the same as executing it once") {
    MockBackend backend;
    GrantsLedger ledger;
    auto desired = desired_alice({{"projA", "admin"}, {"projB", "member"}}, "a@x");
    auto plan = compute_plan(backend.snapshot(), desired, ledger);

    MockBackend once(backend);
    GrantsLedger ledger_once(ledger);
    execute_plan(plan, once, ledger_once);

    MockBackend twice(backend);
    GrantsLedger ledger_twice(ledger);
    execute_plan(plan, twice, ledger_twice);
    auto report = execute_plan(plan, twice, ledger_twice);

    CHECK(named_state(once) == named_state(twice));
    CHECK(report.ok());
    for (const auto& outcome : report.outcomes) {
        if (outcome.step.kind == StepKind::CreateProject || outcome.step.kind == StepKind::CreateRole ||
            outcome.step.kind == StepKind::CreateUser)
            CHECK(outcome.status == StepStatus::ConflictResolved);
    }
}

TEST_CASE("conflicts during execution resolve against the racing entity") {
    MockBackend backend;
    GrantsLedger ledger;
    auto desired = desired_alice({{"projA", "admin"}});
    auto plan = compute_plan(backend.snapshot(), desired, ledger);

    // Another provisioner created the project and user between snapshot and
    // execution.
    backend.projects_create("projA", "default");
    backend.users_create({"alice@uni.example", "default", "local"}, std::nullopt);

    auto report = execute_plan(plan, backend, ledger);
    CHECK(report.ok());
    CHECK(backend.snapshot().named_grants() ==
          std::set<NamedGrant>{{"alice@uni.example", "projA", "admin"}});
}

TEST_CASE("an outage mid-plan fails that step and skips the rest") {
    MockBackend inner;
    GrantsLedger ledger;
    auto desired = desired_alice({{"projA", "admin"}});
    auto plan = compute_plan(inner.snapshot(), desired, ledger);
    REQUIRE(plan.steps.size() == 4);

    FaultInjectionBackend flaky(inner, 1);  // step 1 succeeds, step 2 hits the outage
    auto report = execute_plan(plan, flaky, ledger);
    CHECK_FALSE(report.ok());
    REQUIRE(report.outcomes.size() == 4);
    CHECK(report.outcomes[0].status == StepStatus::Ok);
    CHECK(report.outcomes[1].status == StepStatus::Failed);
    CHECK(report.outcomes[2].status == StepStatus::Skipped);
    CHECK(report.outcomes[3].status == StepStatus::Skipped);

    // Re-running the whole pipeline later converges.
    auto retry = compute_plan(inner.snapshot(), desired, ledger);
    auto retry_report = execute_plan(retry, inner, ledger);
    CHECK(retry_report.ok());
    CHECK(compute_plan(inner.snapshot(), desired, ledger).empty());
}

TEST_CASE("plan structure: creates first, revokes last, no duplicates") {
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 100; ++trial) {
        MockBackend backend;
        DesiredState desired;
        GrantsLedger ledger;
        random_instance(rng, backend, desired, ledger);

        auto plan = compute_plan(backend.snapshot(), desired, ledger);
        int phase = 0;  // creates -> grants -> update -> revokes
        for (const auto& step : plan.steps) {
            int step_phase = 0;
            switch (step.kind) {
            case StepKind::CreateProject:
            case StepKind::CreateRole:
            case StepKind::CreateUser: step_phase = 0; break;
            case StepKind::Grant: step_phase = 1; break;
            case StepKind::UpdateMail: step_phase = 2; break;
            case StepKind::Revoke: step_phase = 3; break;
            }
            CHECK(step_phase >= phase);
            phase = step_phase;
        }
        for (size_t i = 0; i < plan.steps.size(); ++i)
            for (size_t j = i + 1; j < plan.steps.size(); ++j)
                CHECK_FALSE(plan.steps[i] == plan.steps[j]);
    }
}

TEST_CASE("randomized reconciliation: convergence, idempotence, oracle agreement") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 100; ++trial) {
        MockBackend backend;
        DesiredState desired;
        GrantsLedger ledger;
        random_instance(rng, backend, desired, ledger);
        auto ledger_live_before = ledger.live();

        // Reference end-state, no planner involved.
        MockBackend expected(backend);
        write_desired_directly(expected, desired, ledger_live_before);

        auto plan = compute_plan(backend.snapshot(), desired, ledger);

        MockBackend once(backend);
        GrantsLedger ledger_once(ledger);
        auto report = execute_plan(plan, once, ledger_once);
        CHECK(report.ok());
        CHECK(named_state(once) == named_state(expected));

        // Convergence: a fresh plan after execution is empty.
        CHECK(compute_plan(once.snapshot(), desired, ledger_once).empty());

        // Idempotence: executing the same plan twice changes nothing more.
        MockBackend twice(backend);
        GrantsLedger ledger_twice(ledger);
        execute_plan(plan, twice, ledger_twice);
        execute_plan(plan, twice, ledger_twice);
        CHECK(named_state(twice) == named_state(once));

        // Revocation safety: revokes only ever target service-made grants.
        for (const auto& step : plan.steps)
            if (step.kind == StepKind::Revoke)
                CHECK(ledger_live_before.contains({step.user, step.project, step.role}));
    }
}

TEST_CASE("ledger file round-trips and replays to the live set") {
    auto path = std::filesystem::temp_directory_path() / "fedprov_test_ledger.jsonl";
    std::filesystem::remove(path);

    {
        GrantsLedger ledger = GrantsLedger::open(path);
        ledger.record_granted("alice", "projA", "r1");
        ledger.record_granted("alice", "projA", "r2");
        ledger.record_revoked("alice", "projA", "r1");
    }
    {
        GrantsLedger reloaded = GrantsLedger::open(path);
        CHECK(reloaded.live() == std::set<NamedGrant>{{"alice", "projA", "r2"}});
        CHECK(reloaded.entries().size() == 3);
        CHECK_FALSE(reloaded.entries()[0].ts.empty());
        reloaded.record_revoked("alice", "projA", "r2");
    }
    {
        GrantsLedger reloaded = GrantsLedger::open(path);
        CHECK(reloaded.live().empty());
        CHECK(reloaded.entries().size() == 4);
    }
    std::filesystem::remove(path);
}
