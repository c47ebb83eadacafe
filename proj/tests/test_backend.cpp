#include <doctest.h>

#include <algorithm>
#include <thread>

#include "fedprov/error.hpp"
#include "fedprov/mock_backend.hpp"
#include "fedprov/recording_backend.hpp"

using namespace fedprov;

TEST_CASE("empty backend lists nothing") {
    MockBackend backend;
    CHECK(backend.users_list().empty());
    CHECK(backend.roles_list().empty());
    CHECK(backend.projects_list().empty());
    CHECK(backend.snapshot().grants.empty());
}

TEST_CASE("creates are immediately visible to the list calls") {
    MockBackend backend;
    BackendUser user = backend.users_create({"alice@uni.example", "default", "local"}, "a@x");
    CHECK_FALSE(user.id.empty());
    auto users = backend.users_list();
    REQUIRE(users.size() == 1);
    CHECK(users[0].name == "alice@uni.example");
    CHECK(users[0].mail == "a@x");
    CHECK(users[0].enabled);

    backend.roles_create("admin");
    auto roles = backend.roles_list();
    REQUIRE(roles.size() == 1);
    CHECK(roles[0].name == "admin");
}

TEST_CASE("creating the same name twice conflicts and leaves state unchanged") {
    MockBackend backend;
    backend.users_create({"alice", "default", "local"}, std::nullopt);
    CHECK_THROWS_AS(backend.users_create({"alice", "default", "local"}, std::nullopt), Error);
    CHECK(backend.users_list().size() == 1);

    // Same name in another domain is a different user.
    CHECK_NOTHROW(backend.users_create({"alice", "other", "local"}, std::nullopt));

    backend.projects_create("projA", "default");
    CHECK_THROWS_AS(backend.projects_create("projA", "default"), Error);
    backend.roles_create("admin");
    try {
        backend.roles_create("admin");
        FAIL("expected conflict");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::Conflict);
    }
    CHECK(backend.roles_list().size() == 1);
}

TEST_CASE("grants behave as a set with idempotent grant and revoke") {
    MockBackend backend;
    auto user = backend.users_create({"alice", "default", "local"}, std::nullopt);
    auto project = backend.projects_create("projA", "default");
    auto role = backend.roles_create("admin");

    backend.roles_grant(user.id, role.id, project.id);
    backend.roles_grant(user.id, role.id, project.id);
    CHECK(backend.snapshot().grants.size() == 1);

    backend.roles_revoke(user.id, role.id, project.id);
    CHECK(backend.snapshot().grants.empty());
    CHECK_NOTHROW(backend.roles_revoke(user.id, role.id, project.id));

    CHECK_THROWS_AS(backend.roles_grant("u-999", role.id, project.id), Error);
}

TEST_CASE("users_update changes only the supplied fields") {
    MockBackend backend;
    auto user = backend.users_create({"alice", "default", "local"}, "a@x");

    auto updated = backend.users_update(user.id, "b@x", std::nullopt);
    CHECK(updated.mail == "b@x");
    CHECK(updated.enabled);

    auto untouched = backend.users_update(user.id, std::nullopt, std::nullopt);
    CHECK(untouched.mail == "b@x");
    CHECK(untouched.enabled);

    auto disabled = backend.users_update(user.id, std::nullopt, false);
    CHECK(disabled.mail == "b@x");
    CHECK_FALSE(disabled.enabled);

    CHECK_THROWS_AS(backend.users_update("u-999", "x@y", std::nullopt), Error);
}

TEST_CASE("snapshot resolves grants to names") {
    MockBackend backend;
    auto user = backend.users_create({"alice", "default", "local"}, std::nullopt);
    auto project = backend.projects_create("projA", "default");
    auto role = backend.roles_create("admin");
    backend.roles_grant(user.id, role.id, project.id);

    auto snap = backend.snapshot();
    CHECK(snap.named_grants() == std::set<NamedGrant>{{"alice", "projA", "admin"}});
    CHECK(snap.find_user("alice", "default") != nullptr);
    CHECK(snap.find_user("alice", "other") == nullptr);
    CHECK(snap.find_project("projA", "default") != nullptr);
    CHECK(snap.find_role("admin") != nullptr);
}

TEST_CASE("racing creates yield exactly one entity and one conflict") {
    MockBackend backend;
    std::atomic<int> conflicts{0};
    std::atomic<int> created{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&] {
            try {
                backend.projects_create("contended", "default");
                ++created;
            } catch (const Error& e) {
                if (e.code() == Errc::Conflict) ++conflicts;
            }
        });
    }
    for (auto& thread : threads) thread.join();
    CHECK(created == 1);
    CHECK(conflicts == 7);
    CHECK(backend.projects_list().size() == 1);
}

TEST_CASE("the call surface is exactly the nine operations") {
    auto names = Backend::operation_names();
    std::set<std::string_view> surface(names.begin(), names.end());
    CHECK(surface == std::set<std::string_view>{"users.list", "roles.list", "projects.list",
                                                "projects.create", "roles.create", "users.create",
                                                "roles.grant", "roles.revoke", "users.update"});
    CHECK(names.size() == 9);
}

TEST_CASE("recording decorator sees every invocation by name") {
    MockBackend inner;
    RecordingBackend backend(inner);

    auto user = backend.users_create({"alice", "default", "local"}, std::nullopt);
    auto project = backend.projects_create("projA", "default");
    auto role = backend.roles_create("admin");
    backend.roles_grant(user.id, role.id, project.id);
    backend.users_list();
    backend.snapshot();
    backend.roles_revoke(user.id, role.id, project.id);
    backend.users_update(user.id, "a@x", std::nullopt);

    auto distinct = backend.distinct_names();
    auto allowed = Backend::operation_names();
    for (const auto& name : distinct)
        CHECK(std::find(allowed.begin(), allowed.end(), name) != allowed.end());
    CHECK(backend.call_count() == 10);  // snapshot counts as its three list reads

    backend.reset();
    CHECK(backend.call_count() == 0);
}

TEST_CASE("fault injection fails after its budget is spent") {
    MockBackend inner;
    FaultInjectionBackend backend(inner, 2);
    CHECK_NOTHROW(backend.users_list());
    CHECK_NOTHROW(backend.roles_list());
    try {
        backend.projects_list();
        FAIL("expected outage");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::BackendUnavailable);
    }
}
