#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedprov/attributes.hpp"
#include "fedprov/config.hpp"
#include "fedprov/consent.hpp"
#include "fedprov/hook_core.hpp"
#include "fedprov/ledger.hpp"
#include "fedprov/mock_backend.hpp"
#include "fedprov/recording_backend.hpp"

namespace fedprov::sim {

/// Final state of one simulated login.
enum class Outcome {
    TokenIssued,
    ConsentAbandoned,
    ConsentPending,
    DeniedNoEntitlement,
    BackendError,
    DiscoveryRefused,
    KeystoneAuthFailed,
};

const char* outcome_name(Outcome outcome);
Outcome outcome_from_name(const std::string& name);

enum class ConsentDecision { Accept, Abandon, None };

struct PrincipalConfig {
    std::string idp;
    std::string username;
    AttributeMap attributes;  // released by the IdP on login
};

struct IdpConfig {
    std::string name;
    int64_t latency_ms = 0;
};

/// A standalone attribute authority: queried sequentially during login, each
/// query adding its round-trip latency while the user waits.
struct AaConfig {
    std::string name;
    int64_t latency_ms = 0;
    AttributeMap attributes;
};

struct EntityLatencies {
    int64_t horizon = 0;
    int64_t keystone_sp = 0;
    int64_t keystone = 0;
    int64_t discovery = 0;
    int64_t hook_service = 0;
};

/// Complete description of a simulated federation and one login against it.
struct Scenario {
    std::string name = "scenario";
    uint64_t seed = 0;
    int logins = 1;

    EntityLatencies latencies;
    std::vector<IdpConfig> idps;
    std::vector<std::string> discovery_known_idps;  // empty = every IdP is known
    std::vector<AaConfig> aa_chain;
    std::vector<PrincipalConfig> principals;

    std::string login_idp;
    std::string login_user;
    ConsentDecision consent_decision = ConsentDecision::Accept;
    bool inject_backend_failure = false;
    std::optional<Outcome> expected_outcome;

    // service configuration applied to the in-process hook service
    AttributeConfig attributes;
    EntitlementConfig entitlement{"urn:x:cloud", true};
    bool consent_enabled = true;
    bool require_entitlement = true;
    std::string abandon_url = "https://federation.example/abandoned";
    std::optional<std::string> mapping_rules_json;  // built-in identity rule otherwise

    static Scenario from_json(const nlohmann::json& node);
    static Scenario from_file(const std::filesystem::path& path);

    /// Throws Errc::ScenarioError when references do not resolve.
    void validate() const;

    const PrincipalConfig& login_principal() const;
};

struct TraceEvent {
    std::string step;   // workflow label "i".."xiii", empty for internal events
    std::string actor;
    std::string action;
    std::string detail;
    int64_t sim_time_ms = 0;

    nlohmann::json to_json() const;
};

struct ScenarioTrace {
    std::string scenario;
    int login_index = 0;
    std::vector<TraceEvent> events;
    Outcome outcome = Outcome::TokenIssued;
    int64_t total_login_latency_ms = 0;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;

    bool has_action(const std::string& action) const;
    std::optional<size_t> first_action_index(const std::string& action) const;
    std::vector<std::string> step_labels_in_order() const;  // first occurrence of each label
};

struct TraceExpectations {
    std::optional<Outcome> outcome;
    std::optional<int64_t> min_total_latency_ms;
    std::optional<int64_t> max_total_latency_ms;
};

/// Checks a trace against the protocol invariants plus caller expectations:
/// workflow label ordering (all thirteen labels for a token outcome), the
/// rule that authentication at the backend is preceded by provisioning of the
/// same principal, outcome and latency bounds. Returns the violations; empty
/// means pass.
std::vector<std::string> assert_trace(const ScenarioTrace& trace, const TraceExpectations& expectations);

/// Mints a fresh opaque token for an existing user.
/// Throws Errc::UnknownUser when the user is not provisioned; a login
/// workflow that triggers this has broken the provisioning guarantee.
std::string simulate_token_issue(Backend& keystone, const std::string& user_name,
                                 const std::string& domain_id, std::mt19937_64& rng);

/// In-process simulation of the federation ecosystem: IdP, discovery,
/// attribute authorities, the middleware guard in front of the identity
/// backend, the hook service and the dashboard, driven by a scripted browser
/// agent over a simulated clock. State (backend, ledger, consent) persists
/// across logins of the same harness.
class FederationHarness {
public:
    explicit FederationHarness(Scenario scenario);

    ScenarioTrace run_login();
    std::vector<ScenarioTrace> run_all();  // scenario.logins times

    const Scenario& scenario() const { return scenario_; }
    MockBackend& keystone() { return keystone_; }
    RecordingBackend& recorder() { return recorder_; }
    const GrantsLedger& ledger() const { return ledger_; }
    HookCore& hook() { return *hook_; }
    size_t issued_tokens() const { return tokens_.size(); }

private:
    AttributeMap merge_attributes(const PrincipalConfig& principal, ScenarioTrace& trace,
                                  int64_t& clock);

    Scenario scenario_;
    ServiceConfig config_;
    MappingRules rules_;

    MockBackend keystone_;
    FaultInjectionBackend faulty_;
    RecordingBackend recorder_;

    GrantsLedger ledger_;
    ConsentStore consent_;
    std::unique_ptr<HookCore> hook_;

    std::mt19937_64 rng_;
    std::map<std::string, std::string> tokens_;  // token -> user name
    int logins_run_ = 0;
};

/// Convenience: fresh harness, all configured logins, last trace returned.
ScenarioTrace run_scenario(const Scenario& scenario);

}  // namespace fedprov::sim
