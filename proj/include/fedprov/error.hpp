#pragma once

#include <stdexcept>
#include <string>

namespace fedprov {

enum class Errc {
    MissingIdentifier,
    MalformedRules,
    NoMatchingRule,
    MalformedEntitlement,
    Conflict,
    UnknownEntity,
    BackendUnavailable,
    UnknownUser,
    ScenarioError,
    ConfigError,
};

const char* errc_name(Errc code);

/// Service-level exception carrying a stable error code alongside the message.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

inline const char* errc_name(Errc code) {
    switch (code) {
    case Errc::MissingIdentifier: return "MissingIdentifier";
    case Errc::MalformedRules: return "MalformedRules";
    case Errc::NoMatchingRule: return "NoMatchingRule";
    case Errc::MalformedEntitlement: return "MalformedEntitlement";
    case Errc::Conflict: return "Conflict";
    case Errc::UnknownEntity: return "UnknownEntity";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::UnknownUser: return "UnknownUser";
    case Errc::ScenarioError: return "ScenarioError";
    case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace fedprov
