#include "fedprov/attributes.hpp"

#include <algorithm>
#include <cctype>

#include "fedprov/error.hpp"

namespace fedprov {

void AttributeConfig::validate() const {
    if (identifier_attr.empty() || entitlement_attr.empty() || mail_attr.empty())
        raise(Errc::ConfigError, "attribute names must be non-empty");
    if (identifier_attr == entitlement_attr || identifier_attr == mail_attr ||
        entitlement_attr == mail_attr)
        raise(Errc::ConfigError, "attribute names must be pairwise distinct");
}

std::string trim_copy(const std::string& s) {
    auto begin = s.begin();
    auto end = s.end();
    while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
    while (end != begin && std::isspace(static_cast<unsigned char>(*(end - 1)))) --end;
    return std::string(begin, end);
}

std::vector<std::string> split_multi_value(const std::string& value) {
    std::vector<std::string> out;
    std::string::size_type start = 0;
    while (start <= value.size()) {
        auto sep = value.find(';', start);
        auto fragment = trim_copy(value.substr(start, sep == std::string::npos ? sep : sep - start));
        if (!fragment.empty()) out.push_back(std::move(fragment));
        if (sep == std::string::npos) break;
        start = sep + 1;
    }
    return out;
}

AttributeBundle extract_bundle(const AttributeMap& raw, const AttributeConfig& config) {
    AttributeBundle bundle;

    auto id = raw.find(config.identifier_attr);
    if (id == raw.end() || trim_copy(id->second).empty())
        raise(Errc::MissingIdentifier,
              "attribute '" + config.identifier_attr + "' absent or empty in release");
    bundle.identifier = id->second;

    if (auto ent = raw.find(config.entitlement_attr); ent != raw.end())
        bundle.entitlements = split_multi_value(ent->second);

    if (auto mail = raw.find(config.mail_attr); mail != raw.end() && !mail->second.empty())
        bundle.mail = mail->second;

    return bundle;
}

AttributeMap attributes_from_entries(const std::vector<std::pair<std::string, std::string>>& entries,
                                     const std::string& prefix) {
    auto iequal = [](char a, char b) {
        return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
    };
    AttributeMap out;
    for (const auto& [name, value] : entries) {
        if (name.size() <= prefix.size()) continue;
        if (!std::equal(prefix.begin(), prefix.end(), name.begin(), iequal)) continue;
        out[name.substr(prefix.size())] = value;
    }
    return out;
}

}  // namespace fedprov
