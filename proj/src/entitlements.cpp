#include "fedprov/entitlements.hpp"

#include "fedprov/error.hpp"

namespace fedprov {

void EntitlementConfig::validate() const {
    if (require_prefix_match && entitlement_prefix.empty())
        raise(Errc::ConfigError, "entitlement_prefix must be non-empty when prefix matching is on");
}

namespace {

std::vector<std::string> split_segments(const std::string& raw) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (true) {
        auto sep = raw.find(':', start);
        if (sep == std::string::npos) {
            parts.push_back(raw.substr(start));
            return parts;
        }
        parts.push_back(raw.substr(start, sep - start));
        start = sep + 1;
    }
}

}  // namespace

std::optional<Assignment> parse_entitlement(const std::string& raw, const EntitlementConfig& config) {
    auto parts = split_segments(raw);
    if (parts.size() < 3)
        raise(Errc::MalformedEntitlement, "'" + raw + "' has fewer than three segments");

    const std::string& role = parts.back();
    const std::string& project = parts[parts.size() - 2];
    if (project.empty() || role.empty())
        raise(Errc::MalformedEntitlement, "'" + raw + "' has an empty project or role segment");

    std::string prefix = parts.front();
    for (size_t i = 1; i + 2 < parts.size(); ++i) {
        prefix += ':';
        prefix += parts[i];
    }
    if (config.require_prefix_match && prefix != config.entitlement_prefix)
        return std::nullopt;

    return Assignment{project, role};
}

DesiredState derive_desired_state(const AttributeBundle& bundle, const LocalUserSpec& user,
                                  const EntitlementConfig& config) {
    DesiredState state;
    state.user = user;
    state.mail = bundle.mail;
    for (const auto& raw : bundle.entitlements) {
        try {
            if (auto assignment = parse_entitlement(raw, config))
                state.assignments.insert(std::move(*assignment));
        } catch (const Error& e) {
            state.warnings.push_back(e.what());
        }
    }
    return state;
}

}  // namespace fedprov
