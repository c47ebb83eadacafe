#include "fedprov/mapping.hpp"

#include <json.hpp>

#include "fedprov/error.hpp"

namespace fedprov {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& path, const std::string& what) {
    raise(Errc::MalformedRules, path + ": " + what);
}

const json& require(const json& node, const char* key, const std::string& path) {
    if (!node.is_object() || !node.contains(key))
        malformed(path, std::string("missing '") + key + "'");
    return node.at(key);
}

std::string require_string(const json& node, const char* key, const std::string& path) {
    const json& v = require(node, key, path);
    if (!v.is_string()) malformed(path + "." + key, "expected string");
    return v.get<std::string>();
}

size_t count_placeholder(const std::string& tmpl) {
    size_t n = 0;
    for (size_t pos = tmpl.find("{0}"); pos != std::string::npos; pos = tmpl.find("{0}", pos + 3)) ++n;
    return n;
}

}  // namespace

MappingRules parse_mapping_rules(const std::string& document) {
    json root = json::parse(document, nullptr, false);
    if (root.is_discarded()) malformed("document", "not valid JSON");
    if (!root.is_object() || !root.contains("mapping")) malformed("document", "mapping missing");

    const json& rules_node = require(root.at("mapping"), "rules", "mapping");
    if (!rules_node.is_array() || rules_node.empty())
        malformed("mapping.rules", "expected non-empty array");

    MappingRules out;
    for (size_t i = 0; i < rules_node.size(); ++i) {
        const std::string rpath = "mapping.rules[" + std::to_string(i) + "]";
        const json& rule_node = rules_node.at(i);

        MappingRule rule;
        const json& local = require(rule_node, "local", rpath);
        if (!local.is_array() || local.empty()) malformed(rpath + ".local", "expected non-empty array");
        for (size_t j = 0; j < local.size(); ++j) {
            const std::string lpath = rpath + ".local[" + std::to_string(j) + "]";
            const json& user = require(local.at(j), "user", lpath);

            LocalTemplate tmpl;
            const json& domain = require(user, "domain", lpath + ".user");
            tmpl.domain_id = require_string(domain, "id", lpath + ".user.domain");
            tmpl.user_type = require_string(user, "type", lpath + ".user");
            tmpl.name_template = require_string(user, "name", lpath + ".user");
            if (tmpl.name_template.empty())
                malformed(lpath + ".user.name", "name template must be non-empty");
            if (count_placeholder(tmpl.name_template) > 1)
                malformed(lpath + ".user.name", "at most one {0} placeholder allowed");
            rule.local.push_back(std::move(tmpl));
        }

        const json& remote = require(rule_node, "remote", rpath);
        if (!remote.is_array() || remote.empty()) malformed(rpath + ".remote", "expected non-empty array");
        for (size_t j = 0; j < remote.size(); ++j) {
            const std::string mpath = rpath + ".remote[" + std::to_string(j) + "]";
            rule.remote.push_back({require_string(remote.at(j), "type", mpath)});
        }

        out.rules.push_back(std::move(rule));
    }
    return out;
}

std::string MappingRules::serialize() const {
    json rules_node = json::array();
    for (const auto& rule : rules) {
        json local = json::array();
        for (const auto& tmpl : rule.local) {
            local.push_back({{"user", {{"domain", {{"id", tmpl.domain_id}}},
                                       {"type", tmpl.user_type},
                                       {"name", tmpl.name_template}}}});
        }
        json remote = json::array();
        for (const auto& matcher : rule.remote) remote.push_back({{"type", matcher.type}});
        rules_node.push_back({{"local", std::move(local)}, {"remote", std::move(remote)}});
    }
    return json{{"mapping", {{"rules", std::move(rules_node)}}}}.dump(2);
}

namespace {

/// Resolves a matcher type to the bundle value it names, if present.
std::optional<std::string> resolve_attribute(const std::string& type, const AttributeBundle& bundle,
                                             const AttributeConfig& config) {
    if (type == config.identifier_attr) return bundle.identifier;
    if (type == config.mail_attr) return bundle.mail;
    if (type == config.entitlement_attr && !bundle.entitlements.empty())
        return bundle.entitlements.front();
    return std::nullopt;
}

std::string substitute(const std::string& tmpl, const std::string& value) {
    auto pos = tmpl.find("{0}");
    if (pos == std::string::npos) return tmpl;
    std::string out = tmpl;
    out.replace(pos, 3, value);
    return out;
}

}  // namespace

LocalUserSpec apply_rules(const MappingRules& rules, const AttributeBundle& bundle,
                          const AttributeConfig& config) {
    for (const auto& rule : rules.rules) {
        std::optional<std::string> first_value;
        bool all_present = true;
        for (const auto& matcher : rule.remote) {
            auto value = resolve_attribute(matcher.type, bundle, config);
            if (!value) {
                all_present = false;
                break;
            }
            if (!first_value) first_value = value;
        }
        if (!all_present) continue;

        const LocalTemplate& tmpl = rule.local.front();
        LocalUserSpec spec;
        spec.name = substitute(tmpl.name_template, *first_value);
        spec.domain_id = tmpl.domain_id;
        spec.user_type = tmpl.user_type;
        if (spec.name.empty())
            raise(Errc::MalformedRules, "rule produced an empty local user name");
        return spec;
    }
    raise(Errc::NoMatchingRule,
          "no rule matches the released attributes of '" + bundle.identifier + "'");
}

}  // namespace fedprov
