#pragma once

#include <string>
#include <vector>

#include "fedprov/attributes.hpp"

namespace fedprov {

/// The local half of a mapping rule: how to shape the provisioned account.
/// name_template may contain a single "{0}" placeholder which is substituted
/// with the matched remote attribute value.
struct LocalTemplate {
    std::string domain_id;
    std::string user_type;
    std::string name_template;
};

/// The remote half of a mapping rule: the federation attribute it matches on.
struct RemoteMatcher {
    std::string type;
};

struct MappingRule {
    std::vector<LocalTemplate> local;
    std::vector<RemoteMatcher> remote;
};

/// Ordered rule set loaded from the mapping document.
struct MappingRules {
    std::vector<MappingRule> rules;

    std::string serialize() const;
};

/// The local account description a matched rule produces.
struct LocalUserSpec {
    std::string name;
    std::string domain_id;
    std::string user_type;
};

/// Parses the JSON mapping document ({"mapping": {"rules": [...]}}).
/// Throws Errc::MalformedRules with the path of the offending node.
MappingRules parse_mapping_rules(const std::string& document);

/// Resolves the federated bundle to a local user spec. Rules are evaluated in
/// document order, first match wins. A matcher type names a bundle field via
/// the attribute configuration, so the identifier attribute's short name
/// resolves to bundle.identifier.
/// Throws Errc::NoMatchingRule when no rule's remote attributes are present,
/// which signals an attribute-release gap.
LocalUserSpec apply_rules(const MappingRules& rules, const AttributeBundle& bundle,
                          const AttributeConfig& config);

}  // namespace fedprov
