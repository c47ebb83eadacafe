#include <doctest.h>

#include <random>

#include "fedprov/entitlements.hpp"
#include "fedprov/error.hpp"

using namespace fedprov;

namespace {

const EntitlementConfig kCloudPrefix{"urn:x:cloud", true};

LocalUserSpec alice() {
    return {"alice@uni.example", "default", "local"};
}

AttributeBundle bundle_with(std::vector<std::string> entitlements) {
    AttributeBundle b;
    b.identifier = "alice@uni.example";
    b.entitlements = std::move(entitlements);
    return b;
}

}  // namespace

TEST_CASE("project and role are the last two segments") {
    auto a = parse_entitlement("urn:x:cloud:projA:admin", kCloudPrefix);
    REQUIRE(a.has_value());
    CHECK(a->project == "projA");
    CHECK(a->role == "admin");
}

TEST_CASE("the prefix itself may contain colons") {
    auto a = parse_entitlement("a:b:c:d:proj:role", {"a:b:c:d", true});
    REQUIRE(a.has_value());
    CHECK(a->project == "proj");
    CHECK(a->role == "role");
}

TEST_CASE("values scoped to another prefix are skipped, not rejected") {
    CHECK_FALSE(parse_entitlement("other:ns:projB:member", kCloudPrefix).has_value());
}

TEST_CASE("prefix filtering can be turned off") {
    auto a = parse_entitlement("other:ns:projB:member", {"urn:x:cloud", false});
    REQUIRE(a.has_value());
    CHECK(a->project == "projB");
    CHECK(a->role == "member");
}

TEST_CASE("too few segments or empty segments are malformed") {
    CHECK_THROWS_AS(parse_entitlement("onlyone", kCloudPrefix), Error);
    CHECK_THROWS_AS(parse_entitlement("a:b", kCloudPrefix), Error);
    CHECK_THROWS_AS(parse_entitlement("urn:x:cloud::admin", kCloudPrefix), Error);
    CHECK_THROWS_AS(parse_entitlement("urn:x:cloud:projA:", kCloudPrefix), Error);
    try {
        parse_entitlement("onlyone", kCloudPrefix);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MalformedEntitlement);
    }
}

TEST_CASE("grammar round-trip: parse inverts prefix:project:role composition") {
    std::mt19937_64 rng(23);
    auto segment = [&rng](bool allow_colon) {
        const char plain[] = "abcdefgh_-.0123456789";
        const char with_colon[] = "abcdefgh_-.0123456789:";
        const char* charset = allow_colon ? with_colon : plain;
        size_t len = allow_colon ? sizeof(with_colon) - 1 : sizeof(plain) - 1;
        std::string s;
        size_t n = 1 + rng() % 10;
        for (size_t i = 0; i < n; ++i) s += charset[rng() % len];
        return s;
    };
    for (int trial = 0; trial < 500; ++trial) {
        std::string prefix = segment(true);
        std::string project = segment(false);
        std::string role = segment(false);
        std::string raw = prefix + ":" + project + ":" + role;

        auto a = parse_entitlement(raw, {prefix, true});
        REQUIRE(a.has_value());
        CHECK(a->project == project);
        CHECK(a->role == role);
        CHECK(a->project.find(':') == std::string::npos);
        CHECK(a->role.find(':') == std::string::npos);
        // Reconstruction is exact.
        CHECK(prefix + ":" + a->project + ":" + a->role == raw);
    }
}

TEST_CASE("desired state folds every value and deduplicates") {
    auto desired =
        derive_desired_state(bundle_with({"p:a:projA:r1", "p:a:projA:r2"}), alice(), {"p:a", true});
    CHECK(desired.assignments == std::set<Assignment>{{"projA", "r1"}, {"projA", "r2"}});
    CHECK(desired.warnings.empty());

    auto deduped =
        derive_desired_state(bundle_with({"p:a:projA:r1", "p:a:projA:r1"}), alice(), {"p:a", true});
    CHECK(deduped.assignments.size() == 1);
}

TEST_CASE("no entitlements means an empty desired set") {
    auto desired = derive_desired_state(bundle_with({}), alice(), kCloudPrefix);
    CHECK(desired.assignments.empty());
    CHECK(desired.user.name == "alice@uni.example");
}

TEST_CASE("one malformed value warns instead of failing the login") {
    auto desired = derive_desired_state(
        bundle_with({"urn:x:cloud:projA:admin", "garbage", "other:ns:projB:member"}), alice(),
        kCloudPrefix);
    CHECK(desired.assignments == std::set<Assignment>{{"projA", "admin"}});
    REQUIRE(desired.warnings.size() == 1);
    CHECK(desired.warnings[0].find("garbage") != std::string::npos);
}

TEST_CASE("derived assignments are order-insensitive") {
    std::mt19937_64 rng(5);
    std::vector<std::string> values = {"p:a:x:r1", "p:a:y:r2", "p:a:x:r2", "p:a:z:r1", "other:q:w:e"};
    auto reference = derive_desired_state(bundle_with(values), alice(), {"p:a", true}).assignments;
    for (int trial = 0; trial < 50; ++trial) {
        std::shuffle(values.begin(), values.end(), rng);
        CHECK(derive_desired_state(bundle_with(values), alice(), {"p:a", true}).assignments ==
              reference);
    }
}

TEST_CASE("mail rides along into the desired state") {
    AttributeBundle b = bundle_with({"p:a:projA:r1"});
    b.mail = "a@uni.example";
    auto desired = derive_desired_state(b, alice(), {"p:a", true});
    REQUIRE(desired.mail.has_value());
    CHECK(*desired.mail == "a@uni.example");
}

TEST_CASE("config validation requires a prefix when matching is on") {
    CHECK_THROWS_AS(EntitlementConfig{"", true}.validate(), Error);
    CHECK_NOTHROW(EntitlementConfig{"", false}.validate());
}
