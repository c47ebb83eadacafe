#include "fedprov/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fedprov/error.hpp"
#include "fedprov/mapping.hpp"

namespace fedprov {

using nlohmann::json;

namespace {

void check_keys(const json& node, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : node.items())
        if (!known.contains(key))
            raise(Errc::ConfigError, where + ": unknown key '" + key + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_absolute() || base.empty()) return path;
    return base / path;
}

}  // namespace

void ServiceConfig::validate() const {
    if (hook_path.empty() || hook_path.front() != '/')
        raise(Errc::ConfigError, "hook_path must be non-empty and start with '/'");
    if (listen_port < 0 || listen_port > 65535)
        raise(Errc::ConfigError, "listen port out of range");
    attributes.validate();
    entitlement.validate();
    if (mapping_rules_path.empty())
        raise(Errc::ConfigError, "mapping_rules_path is required");
    if (abandon_url.empty())
        raise(Errc::ConfigError, "abandon_url is required");
    if (backend.mode != "http" && backend.mode != "mock")
        raise(Errc::ConfigError, "backend.mode must be 'http' or 'mock'");
    if (backend.mode == "http" && backend.endpoint.empty())
        raise(Errc::ConfigError, "backend.endpoint is required for http mode");
    if (consent_challenge_ttl_seconds <= 0)
        raise(Errc::ConfigError, "consent_challenge_ttl_seconds must be positive");

    auto parent_ok = [](const std::filesystem::path& p) {
        auto dir = p.parent_path();
        return dir.empty() || std::filesystem::is_directory(dir);
    };
    if (!ledger_path.empty() && !parent_ok(ledger_path))
        raise(Errc::ConfigError, "ledger_path directory does not exist: " + ledger_path.string());
    if (!consent_store_path.empty() && !parent_ok(consent_store_path))
        raise(Errc::ConfigError,
              "consent_store_path directory does not exist: " + consent_store_path.string());
    if (!consent_template_path.empty() && !std::filesystem::is_regular_file(consent_template_path))
        raise(Errc::ConfigError,
              "consent_template_path does not exist: " + consent_template_path.string());
}

ServiceConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded() || !root.is_object())
        raise(Errc::ConfigError, "config is not a JSON object");

    check_keys(root, {"listen", "hook_path", "attributes", "entitlement", "mapping_rules_path",
                      "backend", "consent_enabled", "require_entitlement", "abandon_url",
                      "ledger_path", "consent_store_path", "consent_template_path",
                      "consent_challenge_ttl_seconds"},
               "config");

    ServiceConfig config;

    if (root.contains("listen")) {
        std::string listen = root.at("listen").get<std::string>();
        auto colon = listen.rfind(':');
        if (colon == std::string::npos)
            raise(Errc::ConfigError, "listen must be host:port");
        config.listen_host = listen.substr(0, colon);
        try {
            config.listen_port = std::stoi(listen.substr(colon + 1));
        } catch (const std::exception&) {
            raise(Errc::ConfigError, "listen port is not a number");
        }
    }
    config.hook_path = root.value("hook_path", config.hook_path);

    if (root.contains("attributes")) {
        const json& a = root.at("attributes");
        check_keys(a, {"identifier", "entitlement", "mail"}, "config.attributes");
        config.attributes.identifier_attr = a.value("identifier", config.attributes.identifier_attr);
        config.attributes.entitlement_attr = a.value("entitlement", config.attributes.entitlement_attr);
        config.attributes.mail_attr = a.value("mail", config.attributes.mail_attr);
    }

    if (root.contains("entitlement")) {
        const json& e = root.at("entitlement");
        check_keys(e, {"prefix", "require_prefix_match"}, "config.entitlement");
        config.entitlement.entitlement_prefix = e.value("prefix", "");
        config.entitlement.require_prefix_match =
            e.value("require_prefix_match", config.entitlement.require_prefix_match);
    }

    if (root.contains("mapping_rules_path"))
        config.mapping_rules_path = resolve(base_dir, root.at("mapping_rules_path").get<std::string>());

    if (root.contains("backend")) {
        const json& b = root.at("backend");
        check_keys(b, {"mode", "endpoint", "token", "timeout_ms"}, "config.backend");
        config.backend.mode = b.value("mode", config.backend.mode);
        config.backend.endpoint = b.value("endpoint", "");
        config.backend.token = b.value("token", "");
        config.backend.timeout_ms = b.value("timeout_ms", config.backend.timeout_ms);
    }

    config.consent_enabled = root.value("consent_enabled", config.consent_enabled);
    config.require_entitlement = root.value("require_entitlement", config.require_entitlement);
    config.abandon_url = root.value("abandon_url", "");
    if (root.contains("ledger_path"))
        config.ledger_path = resolve(base_dir, root.at("ledger_path").get<std::string>());
    if (root.contains("consent_store_path"))
        config.consent_store_path = resolve(base_dir, root.at("consent_store_path").get<std::string>());
    if (root.contains("consent_template_path"))
        config.consent_template_path =
            resolve(base_dir, root.at("consent_template_path").get<std::string>());
    config.consent_challenge_ttl_seconds =
        root.value("consent_challenge_ttl_seconds", config.consent_challenge_ttl_seconds);

    config.validate();
    return config;
}

ServiceConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::ConfigError, "cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();

    ServiceConfig config = parse_config(buffer.str(), path.parent_path());

    // The mapping document must be loadable at startup; a service that boots
    // with broken rules would fail every login at runtime instead.
    std::ifstream rules(config.mapping_rules_path);
    if (!rules)
        raise(Errc::ConfigError,
              "cannot open mapping rules file " + config.mapping_rules_path.string());
    std::stringstream rules_buffer;
    rules_buffer << rules.rdbuf();
    parse_mapping_rules(rules_buffer.str());

    return config;
}

}  // namespace fedprov
