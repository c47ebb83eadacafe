#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "fedprov/attributes.hpp"
#include "fedprov/entitlements.hpp"

namespace fedprov {

struct BackendConfig {
    std::string mode = "http";  // "http" or "mock" (in-process, for trials)
    std::string endpoint;
    std::string token;
    int timeout_ms = 5000;
};

struct ServiceConfig {
    std::string listen_host = "127.0.0.1";
    int listen_port = 8080;
    std::string hook_path = "/regsite";

    AttributeConfig attributes;
    EntitlementConfig entitlement;

    std::filesystem::path mapping_rules_path;
    BackendConfig backend;

    bool consent_enabled = true;
    bool require_entitlement = true;
    std::string abandon_url;

    std::filesystem::path ledger_path;
    std::filesystem::path consent_store_path;
    std::filesystem::path consent_template_path;  // optional; built-in page otherwise
    int consent_challenge_ttl_seconds = 900;

    /// Structural checks only; load_config additionally verifies that the
    /// mapping document parses.
    void validate() const;
};

/// Reads the JSON config file. Unknown keys are rejected so typos surface at
/// startup rather than silently falling back to defaults.
ServiceConfig load_config(const std::filesystem::path& path);

ServiceConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

}  // namespace fedprov
