#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedprov/attributes.hpp"
#include "fedprov/mapping.hpp"

namespace fedprov {

/// Scope filter for entitlement values. Federated entitlement attributes
/// routinely carry values for many services; only values under the configured
/// prefix belong to this deployment.
struct EntitlementConfig {
    std::string entitlement_prefix;
    bool require_prefix_match = true;

    void validate() const;
};

/// One (project, role) pair derived from an entitlement value.
struct Assignment {
    std::string project;
    std::string role;

    auto operator<=>(const Assignment&) const = default;
};

/// Everything provisioning needs to know about one login.
struct DesiredState {
    LocalUserSpec user;
    std::set<Assignment> assignments;
    std::optional<std::string> mail;
    std::vector<std::string> warnings;  // per-value problems, never fatal
};

/// Parses one entitlement value of the form <prefix>:project:role. The prefix
/// may itself contain colons; project and role are always the last two
/// segments. Returns nullopt when the value is well-formed but scoped to a
/// different prefix (skipped, not an error).
/// Throws Errc::MalformedEntitlement on fewer than three segments or an empty
/// project/role segment.
std::optional<Assignment> parse_entitlement(const std::string& raw, const EntitlementConfig& config);

/// Folds every entitlement of the bundle into a deduplicated assignment set.
/// Malformed values become warnings; one bad value released by one authority
/// must not lock the user out of projects granted by another.
DesiredState derive_desired_state(const AttributeBundle& bundle, const LocalUserSpec& user,
                                  const EntitlementConfig& config);

}  // namespace fedprov
