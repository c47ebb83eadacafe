#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fedprov {

/// Attribute map as released by the authentication middleware, name -> value.
using AttributeMap = std::map<std::string, std::string>;

/// Names of the middleware attributes the service consumes. Directory schemas
/// differ between federations, so all three names are configurable.
struct AttributeConfig {
    std::string identifier_attr = "eppn";
    std::string entitlement_attr = "entitlement";
    std::string mail_attr = "mail";

    /// Throws Errc::ConfigError unless all names are non-empty and pairwise distinct.
    void validate() const;
};

/// The identity payload handed over at the session hook: who the user is,
/// what they are entitled to, and optionally how to reach them.
struct AttributeBundle {
    std::string identifier;
    std::vector<std::string> entitlements;  // raw values, input order preserved
    std::optional<std::string> mail;
};

std::string trim_copy(const std::string& s);

/// Splits a multi-valued attribute on ';'. Fragments are trimmed and empty
/// fragments dropped; directory systems emit ragged multi-values and cosmetic
/// noise must not block a login.
std::vector<std::string> split_multi_value(const std::string& value);

/// Builds the bundle from raw middleware attributes.
/// Throws Errc::MissingIdentifier when the identifier attribute is absent or
/// empty, which signals a misconfigured attribute release.
AttributeBundle extract_bundle(const AttributeMap& raw, const AttributeConfig& config);

/// Collects prefixed request entries ("X-Fed-Attr-<name>" by default) into an
/// attribute map. This is the wire form used to deliver attributes across the
/// middleware boundary; the prefix match is case-insensitive.
AttributeMap attributes_from_entries(const std::vector<std::pair<std::string, std::string>>& entries,
                                     const std::string& prefix = "X-Fed-Attr-");

}  // namespace fedprov
