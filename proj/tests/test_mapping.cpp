#include <doctest.h>

#include <random>

#include "fedprov/error.hpp"
#include "fedprov/mapping.hpp"
#include "support/reference_mapping.hpp"

using namespace fedprov;
using fedprov::testing::kReferenceMappingDocument;

namespace {

AttributeBundle bundle_for(const std::string& identifier) {
    AttributeBundle b;
    b.identifier = identifier;
    return b;
}

}  // namespace

TEST_CASE("the reference mapping document parses") {
    MappingRules rules = parse_mapping_rules(kReferenceMappingDocument);
    REQUIRE(rules.rules.size() == 1);
    const MappingRule& rule = rules.rules[0];
    REQUIRE(rule.remote.size() == 1);
    CHECK(rule.remote[0].type == "eppn");
    REQUIRE(rule.local.size() == 1);
    CHECK(rule.local[0].domain_id == "default");
    CHECK(rule.local[0].user_type == "local");
    CHECK(rule.local[0].name_template == "{0}");
}

TEST_CASE("the reference rules map the identifier through unchanged") {
    MappingRules rules = parse_mapping_rules(kReferenceMappingDocument);
    LocalUserSpec spec = apply_rules(rules, bundle_for("alice@uni.example"), {});
    CHECK(spec.name == "alice@uni.example");
    CHECK(spec.domain_id == "default");
    CHECK(spec.user_type == "local");
}

TEST_CASE("identity mapping holds for arbitrary identifiers") {
    MappingRules rules = parse_mapping_rules(kReferenceMappingDocument);
    std::mt19937_64 rng(11);
    const char charset[] = "abcdefXYZ0189@._-+:~";
    for (int trial = 0; trial < 300; ++trial) {
        std::string identifier;
        size_t n = 1 + rng() % 24;
        for (size_t i = 0; i < n; ++i) identifier += charset[rng() % (sizeof charset - 1)];
        CHECK(apply_rules(rules, bundle_for(identifier), {}).name == identifier);
    }
}

TEST_CASE("template text around the placeholder is preserved") {
    std::string doc = kReferenceMappingDocument;
    auto pos = doc.find("\"{0}\"");
    REQUIRE(pos != std::string::npos);
    doc.replace(pos, 5, "\"fed-{0}\"");
    MappingRules rules = parse_mapping_rules(doc);
    CHECK(apply_rules(rules, bundle_for("bob@x"), {}).name == "fed-bob@x");
}

TEST_CASE("empty document is malformed") {
    CHECK_THROWS_AS(parse_mapping_rules("{}"), Error);
    try {
        parse_mapping_rules("{}");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MalformedRules);
        CHECK(std::string(e.what()).find("mapping missing") != std::string::npos);
    }
}

TEST_CASE("parse errors carry the path of the offending node") {
    try {
        parse_mapping_rules(R"({"mapping": {"rules": [{"local": [{"user": {"type": "local",
            "name": "{0}"}}], "remote": [{"type": "eppn"}]}]}})");
        FAIL("expected malformed rules");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("mapping.rules[0].local[0].user") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_mapping_rules("not json"), Error);
    CHECK_THROWS_AS(parse_mapping_rules(R"({"mapping": {"rules": []}})"), Error);
    CHECK_THROWS_AS(
        parse_mapping_rules(
            R"({"mapping": {"rules": [{"local": [], "remote": [{"type": "eppn"}]}]}})"),
        Error);
}

TEST_CASE("a rule may match on the mail attribute instead") {
    std::string doc = kReferenceMappingDocument;
    auto pos = doc.find("\"eppn\"");
    REQUIRE(pos != std::string::npos);
    doc.replace(pos, 6, "\"mail\"");
    MappingRules rules = parse_mapping_rules(doc);

    AttributeBundle with_mail = bundle_for("carol@uni.example");
    with_mail.mail = "carol@mail.example";
    CHECK(apply_rules(rules, with_mail, {}).name == "carol@mail.example");

    // Without the attribute the rule cannot match.
    CHECK_THROWS_AS(apply_rules(rules, bundle_for("carol@uni.example"), {}), Error);
}

TEST_CASE("unmatched remote attribute signals a release gap") {
    std::string doc = kReferenceMappingDocument;
    auto pos = doc.find("\"eppn\"");
    doc.replace(pos, 6, "\"foo\"");
    MappingRules rules = parse_mapping_rules(doc);
    try {
        apply_rules(rules, bundle_for("alice"), {});
        FAIL("expected no matching rule");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NoMatchingRule);
    }
}

TEST_CASE("first matching rule wins; later rules are irrelevant") {
    // Two rules matching the identifier with different templates: document
    // order decides, and permuting everything after the winner changes nothing.
    const char* three_rules = R"({
      "mapping": {"rules": [
        {"local": [{"user": {"domain": {"id": "default"}, "type": "local", "name": "first-{0}"}}],
         "remote": [{"type": "eppn"}]},
        {"local": [{"user": {"domain": {"id": "other"}, "type": "local", "name": "second-{0}"}}],
         "remote": [{"type": "eppn"}]},
        {"local": [{"user": {"domain": {"id": "other"}, "type": "local", "name": "third-{0}"}}],
         "remote": [{"type": "mail"}]}
      ]}
    })";
    MappingRules rules = parse_mapping_rules(three_rules);
    CHECK(apply_rules(rules, bundle_for("u"), {}).name == "first-u");

    MappingRules permuted = rules;
    std::swap(permuted.rules[1], permuted.rules[2]);  // only the tail reordered
    CHECK(apply_rules(permuted, bundle_for("u"), {}).name == "first-u");

    // A non-matching first rule falls through to the second.
    const char* fallthrough = R"({
      "mapping": {"rules": [
        {"local": [{"user": {"domain": {"id": "default"}, "type": "local", "name": "first-{0}"}}],
         "remote": [{"type": "absent"}]},
        {"local": [{"user": {"domain": {"id": "other"}, "type": "local", "name": "second-{0}"}}],
         "remote": [{"type": "eppn"}]}
      ]}
    })";
    CHECK(apply_rules(parse_mapping_rules(fallthrough), bundle_for("u"), {}).name == "second-u");
}

TEST_CASE("parse then serialize then parse is a fixed point") {
    MappingRules first = parse_mapping_rules(kReferenceMappingDocument);
    std::string serialized = first.serialize();
    MappingRules second = parse_mapping_rules(serialized);
    CHECK(second.serialize() == serialized);
    CHECK(second.rules.size() == first.rules.size());
}

TEST_CASE("at most one placeholder is allowed") {
    std::string doc = kReferenceMappingDocument;
    auto pos = doc.find("\"{0}\"");
    doc.replace(pos, 5, "\"{0}-{0}\"");
    CHECK_THROWS_AS(parse_mapping_rules(doc), Error);
}
