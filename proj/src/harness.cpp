#include "fedprov/harness.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fedprov/entitlements.hpp"
#include "fedprov/error.hpp"

namespace fedprov::sim {

using nlohmann::json;

namespace {

constexpr const char* kStepLabels[] = {"i", "ii", "iii", "iv",  "v",  "vi", "vii",
                                       "viii", "ix", "x",  "xi", "xii", "xiii"};

int step_rank(const std::string& label) {
    for (int i = 0; i < 13; ++i)
        if (label == kStepLabels[i]) return i;
    return -1;
}

std::string default_mapping_document(const AttributeConfig& attributes) {
    json doc{{"mapping",
              {{"rules",
                json::array({{{"local", json::array({{{"user",
                                                       {{"domain", {{"id", "default"}}},
                                                        {"type", "local"},
                                                        {"name", "{0}"}}}}})},
                              {"remote", json::array({{{"type", attributes.identifier_attr}}})}}})}}}};
    return doc.dump();
}

}  // namespace

const char* outcome_name(Outcome outcome) {
    switch (outcome) {
    case Outcome::TokenIssued: return "token_issued";
    case Outcome::ConsentAbandoned: return "consent_abandoned";
    case Outcome::ConsentPending: return "consent_pending";
    case Outcome::DeniedNoEntitlement: return "denied_no_entitlement";
    case Outcome::BackendError: return "backend_error";
    case Outcome::DiscoveryRefused: return "discovery_refused";
    case Outcome::KeystoneAuthFailed: return "keystone_auth_failed";
    }
    return "unknown";
}

Outcome outcome_from_name(const std::string& name) {
    for (Outcome o : {Outcome::TokenIssued, Outcome::ConsentAbandoned, Outcome::ConsentPending,
                      Outcome::DeniedNoEntitlement, Outcome::BackendError, Outcome::DiscoveryRefused,
                      Outcome::KeystoneAuthFailed})
        if (name == outcome_name(o)) return o;
    raise(Errc::ScenarioError, "unknown outcome '" + name + "'");
}

Scenario Scenario::from_json(const json& node) {
    if (!node.is_object()) raise(Errc::ScenarioError, "scenario is not a JSON object");
    Scenario s;
    s.name = node.value("name", s.name);
    s.seed = node.value("seed", s.seed);
    s.logins = node.value("logins", s.logins);

    if (node.contains("entities")) {
        const json& e = node.at("entities");
        auto latency = [](const json& n) { return n.value("latency_ms", int64_t{0}); };
        if (e.contains("horizon")) s.latencies.horizon = latency(e.at("horizon"));
        if (e.contains("keystone_sp")) s.latencies.keystone_sp = latency(e.at("keystone_sp"));
        if (e.contains("keystone")) s.latencies.keystone = latency(e.at("keystone"));
        if (e.contains("hook_service")) s.latencies.hook_service = latency(e.at("hook_service"));
        if (e.contains("discovery")) {
            s.latencies.discovery = latency(e.at("discovery"));
            for (const auto& idp : e.at("discovery").value("known_idps", json::array()))
                s.discovery_known_idps.push_back(idp.get<std::string>());
        }
        for (const auto& idp : e.value("idps", json::array()))
            s.idps.push_back({idp.value("name", ""), idp.value("latency_ms", int64_t{0})});
    }

    for (const auto& p : node.value("principals", json::array())) {
        PrincipalConfig principal;
        principal.idp = p.value("idp", "");
        principal.username = p.value("username", "");
        for (const auto& [k, v] : p.value("attributes", json::object()).items())
            principal.attributes[k] = v.get<std::string>();
        s.principals.push_back(std::move(principal));
    }

    for (const auto& a : node.value("aa_chain", json::array())) {
        AaConfig aa;
        aa.name = a.value("name", "aa");
        aa.latency_ms = a.value("latency_ms", int64_t{0});
        for (const auto& [k, v] : a.value("attributes", json::object()).items())
            aa.attributes[k] = v.get<std::string>();
        s.aa_chain.push_back(std::move(aa));
    }

    if (node.contains("login")) {
        const json& l = node.at("login");
        s.login_idp = l.value("idp", "");
        s.login_user = l.value("username", "");
        std::string decision = l.value("consent_decision", "accept");
        if (decision == "accept") s.consent_decision = ConsentDecision::Accept;
        else if (decision == "abandon") s.consent_decision = ConsentDecision::Abandon;
        else if (decision == "none") s.consent_decision = ConsentDecision::None;
        else raise(Errc::ScenarioError, "login.consent_decision must be accept, abandon or none");
    }

    if (node.contains("config_overrides")) {
        const json& c = node.at("config_overrides");
        s.consent_enabled = c.value("consent_enabled", s.consent_enabled);
        s.require_entitlement = c.value("require_entitlement", s.require_entitlement);
        s.entitlement.entitlement_prefix = c.value("entitlement_prefix", s.entitlement.entitlement_prefix);
        s.entitlement.require_prefix_match =
            c.value("require_prefix_match", s.entitlement.require_prefix_match);
        s.abandon_url = c.value("abandon_url", s.abandon_url);
        if (c.contains("attributes")) {
            const json& a = c.at("attributes");
            s.attributes.identifier_attr = a.value("identifier", s.attributes.identifier_attr);
            s.attributes.entitlement_attr = a.value("entitlement", s.attributes.entitlement_attr);
            s.attributes.mail_attr = a.value("mail", s.attributes.mail_attr);
        }
        if (c.contains("mapping_rules")) s.mapping_rules_json = c.at("mapping_rules").dump();
    }

    s.inject_backend_failure = node.value("inject_backend_failure", false);
    if (node.contains("expected_outcome"))
        s.expected_outcome = outcome_from_name(node.at("expected_outcome").get<std::string>());

    // Single-principal scenarios may omit the login block.
    if (s.login_user.empty() && s.principals.size() == 1) {
        s.login_idp = s.principals.front().idp;
        s.login_user = s.principals.front().username;
    }

    s.validate();
    return s;
}

Scenario Scenario::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::ScenarioError, "cannot open scenario file " + path.string());
    json node = json::parse(in, nullptr, false);
    if (node.is_discarded()) raise(Errc::ScenarioError, "scenario file is not valid JSON");
    return from_json(node);
}

void Scenario::validate() const {
    if (logins < 1) raise(Errc::ScenarioError, "logins must be >= 1");
    if (login_user.empty()) raise(Errc::ScenarioError, "no login principal configured");
    bool idp_known = std::any_of(idps.begin(), idps.end(),
                                 [&](const IdpConfig& idp) { return idp.name == login_idp; });
    if (!idp_known) raise(Errc::ScenarioError, "login idp '" + login_idp + "' is not configured");
    (void)login_principal();
    attributes.validate();
    if (entitlement.require_prefix_match && entitlement.entitlement_prefix.empty())
        raise(Errc::ScenarioError, "entitlement prefix required when prefix matching is on");
}

const PrincipalConfig& Scenario::login_principal() const {
    for (const auto& p : principals)
        if (p.idp == login_idp && p.username == login_user) return p;
    raise(Errc::ScenarioError,
          "principal '" + login_user + "' does not exist at idp '" + login_idp + "'");
}

json TraceEvent::to_json() const {
    return {{"step", step}, {"actor", actor}, {"action", action}, {"detail", detail},
            {"sim_time_ms", sim_time_ms}};
}

json ScenarioTrace::to_json() const {
    json events_node = json::array();
    for (const auto& e : events) events_node.push_back(e.to_json());
    return {{"scenario", scenario},
            {"login_index", login_index},
            {"outcome", outcome_name(outcome)},
            {"total_login_latency_ms", total_login_latency_ms},
            {"warnings", warnings},
            {"events", std::move(events_node)}};
}

bool ScenarioTrace::has_action(const std::string& action) const {
    return first_action_index(action).has_value();
}

std::optional<size_t> ScenarioTrace::first_action_index(const std::string& action) const {
    for (size_t i = 0; i < events.size(); ++i)
        if (events[i].action == action) return i;
    return std::nullopt;
}

std::vector<std::string> ScenarioTrace::step_labels_in_order() const {
    std::vector<std::string> labels;
    for (const auto& e : events)
        if (!e.step.empty() && (labels.empty() || std::find(labels.begin(), labels.end(), e.step) ==
                                                      labels.end()))
            labels.push_back(e.step);
    return labels;
}

std::vector<std::string> assert_trace(const ScenarioTrace& trace,
                                      const TraceExpectations& expectations) {
    std::vector<std::string> violations;

    if (expectations.outcome && trace.outcome != *expectations.outcome)
        violations.push_back(std::string("outcome: expected ") + outcome_name(*expectations.outcome) +
                             ", got " + outcome_name(trace.outcome));

    // Workflow labels must appear in protocol order; a token outcome must
    // carry the complete sequence.
    auto labels = trace.step_labels_in_order();
    int previous = -1;
    for (const auto& label : labels) {
        int rank = step_rank(label);
        if (rank < 0) {
            violations.push_back("unknown step label '" + label + "'");
            continue;
        }
        if (rank <= previous)
            violations.push_back("step '" + label + "' out of order");
        previous = rank;
    }
    if (trace.outcome == Outcome::TokenIssued && labels.size() != 13)
        violations.push_back("token issued but only " + std::to_string(labels.size()) +
                             " of 13 workflow steps present");

    // Authentication at the backend requires the principal to have been
    // provisioned (or observed as already present) earlier in this trace.
    if (auto auth = trace.first_action_index("keystone_auth")) {
        auto created = trace.first_action_index("create_user");
        auto preexisting = trace.first_action_index("user_already_provisioned");
        bool provisioned_before = (created && *created < *auth) || (preexisting && *preexisting < *auth);
        if (!provisioned_before)
            violations.push_back("keystone_auth without prior provisioning of the principal");
    }
    if (trace.has_action("keystone_auth_failed"))
        violations.push_back("backend authentication failed: principal was not provisioned");

    if (expectations.min_total_latency_ms && trace.total_login_latency_ms < *expectations.min_total_latency_ms)
        violations.push_back("total latency " + std::to_string(trace.total_login_latency_ms) +
                             " below expected minimum " + std::to_string(*expectations.min_total_latency_ms));
    if (expectations.max_total_latency_ms && trace.total_login_latency_ms > *expectations.max_total_latency_ms)
        violations.push_back("total latency " + std::to_string(trace.total_login_latency_ms) +
                             " above expected maximum " + std::to_string(*expectations.max_total_latency_ms));

    return violations;
}

std::string simulate_token_issue(Backend& keystone, const std::string& user_name,
                                 const std::string& domain_id, std::mt19937_64& rng) {
    auto users = keystone.users_list();
    bool exists = std::any_of(users.begin(), users.end(), [&](const BackendUser& u) {
        return u.name == user_name && u.domain_id == domain_id;
    });
    if (!exists)
        raise(Errc::UnknownUser, "cannot issue token: user '" + user_name + "' is not provisioned");
    char buf[48];
    std::snprintf(buf, sizeof buf, "tok-%016llx%016llx", static_cast<unsigned long long>(rng()),
                  static_cast<unsigned long long>(rng()));
    return buf;
}

FederationHarness::FederationHarness(Scenario scenario)
    : scenario_(std::move(scenario)),
      rules_(parse_mapping_rules(scenario_.mapping_rules_json
                                     ? *scenario_.mapping_rules_json
                                     : default_mapping_document(scenario_.attributes))),
      faulty_(keystone_, 0),
      recorder_(scenario_.inject_backend_failure ? static_cast<Backend&>(faulty_)
                                                 : static_cast<Backend&>(keystone_)),
      rng_(scenario_.seed) {
    scenario_.validate();
    config_.hook_path = "/regsite";
    config_.attributes = scenario_.attributes;
    config_.entitlement = scenario_.entitlement;
    config_.consent_enabled = scenario_.consent_enabled;
    config_.require_entitlement = scenario_.require_entitlement;
    config_.abandon_url = scenario_.abandon_url;
    hook_ = std::make_unique<HookCore>(config_, rules_, recorder_, ledger_, consent_);
}

AttributeMap FederationHarness::merge_attributes(const PrincipalConfig& principal,
                                                 ScenarioTrace& trace, int64_t& clock) {
    AttributeMap merged = principal.attributes;
    for (const auto& aa : scenario_.aa_chain) {
        // The guard queries each authority in turn while the user waits, so
        // round-trips accumulate.
        clock += aa.latency_ms;
        trace.events.push_back({"vi", "keystone_sp", "query_attribute_authority", aa.name, clock});
        for (const auto& [name, value] : aa.attributes) {
            auto it = merged.find(name);
            if (name == scenario_.attributes.entitlement_attr && it != merged.end() &&
                !it->second.empty()) {
                it->second += ";" + value;  // authorities accumulate
            } else if (it == merged.end() || it->second.empty()) {
                merged[name] = value;
            }
        }
    }
    if (scenario_.aa_chain.size() > 5)
        trace.warnings.push_back(
            "practicality: " + std::to_string(scenario_.aa_chain.size()) +
            " attribute authorities configured; sequential queries block the user and querying "
            "more than five is not practical");
    return merged;
}

ScenarioTrace FederationHarness::run_login() {
    const PrincipalConfig& principal = scenario_.login_principal();

    ScenarioTrace trace;
    trace.scenario = scenario_.name;
    trace.login_index = logins_run_++;
    int64_t clock = 0;

    auto event = [&](const char* step, const char* actor, std::string action, std::string detail = "") {
        trace.events.push_back({step, actor, std::move(action), std::move(detail), clock});
    };
    auto finish = [&](Outcome outcome) {
        trace.outcome = outcome;
        trace.total_login_latency_ms = clock;
        return trace;
    };

    clock += scenario_.latencies.horizon;
    event("i", "browser", "request_dashboard");
    event("ii", "horizon", "redirect_to_identity_endpoint");

    clock += scenario_.latencies.keystone_sp;
    event("iii", "keystone_sp", "no_session_redirect_to_discovery");

    clock += scenario_.latencies.discovery;
    if (!scenario_.discovery_known_idps.empty() &&
        std::find(scenario_.discovery_known_idps.begin(), scenario_.discovery_known_idps.end(),
                  scenario_.login_idp) == scenario_.discovery_known_idps.end()) {
        event("iv", "discovery", "discovery_refused", scenario_.login_idp);
        return finish(Outcome::DiscoveryRefused);
    }
    event("iv", "discovery", "redirect_to_idp", scenario_.login_idp);

    auto idp = std::find_if(scenario_.idps.begin(), scenario_.idps.end(),
                            [&](const IdpConfig& i) { return i.name == scenario_.login_idp; });
    clock += idp->latency_ms;
    event("v", "idp", "authenticate", principal.username);

    AttributeMap merged = merge_attributes(principal, trace, clock);

    event("vii", "keystone_sp", "merge_and_filter_attributes");

    // Hand over to the hook service on the harness wire form.
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& [name, value] : merged) entries.emplace_back("X-Fed-Attr-" + name, value);
    const std::string resume_url = "https://sp.sim.example/Shibboleth.sso/resume?target=dashboard";

    clock += scenario_.latencies.hook_service;
    event("vii", "keystone_sp", "session_hook", resume_url);
    HookResponse response = hook_->handle_session_hook({resume_url, attributes_from_entries(entries)});

    if (response.status == 200 && !response.csrf_token.empty()) {
        event("", "hook_service", "consent_page", principal.username);
        switch (scenario_.consent_decision) {
        case ConsentDecision::None:
            event("", "browser", "consent_pending");
            return finish(Outcome::ConsentPending);
        case ConsentDecision::Abandon:
            response = hook_->handle_consent_decision({"abandon", resume_url, response.csrf_token});
            event("", "browser", "consent_abandon");
            if (!response.is_redirect())
                raise(Errc::ScenarioError, "abandon did not redirect: " + response.body);
            return finish(Outcome::ConsentAbandoned);
        case ConsentDecision::Accept:
            event("", "browser", "consent_accept");
            response = hook_->handle_consent_decision({"accept", resume_url, response.csrf_token});
            break;
        }
    }

    if (response.status == 502) {
        event("", "hook_service", "hook_error", "identity backend unavailable");
        return finish(Outcome::BackendError);
    }
    if (!response.is_redirect())
        raise(Errc::ScenarioError,
              "hook rejected the login (HTTP " + std::to_string(response.status) + "): " + response.body);

    if (response.location.rfind(scenario_.abandon_url, 0) == 0) {
        if (response.location.find("reason=no_entitlement") != std::string::npos) {
            event("", "hook_service", "denied_no_entitlement", principal.username);
            return finish(Outcome::DeniedNoEntitlement);
        }
        event("", "hook_service", "abandoned");
        return finish(Outcome::ConsentAbandoned);
    }

    // Provisioning completed; surface what the plan did.
    auto report = hook_->last_report();
    size_t executed = report ? report->outcomes.size() : 0;
    event("viii", "hook_service", "provisioning", "plan with " + std::to_string(executed) + " step(s)");
    bool created_user = false;
    if (report) {
        for (const auto& outcome : report->outcomes) {
            event("viii", "hook_service", step_kind_name(outcome.step.kind),
                  outcome.step.describe() + " [" + step_status_name(outcome.status) + "]");
            if (outcome.step.kind == StepKind::CreateUser) created_user = true;
        }
    }
    event("viii", "hook_service", "plan_executed", std::to_string(executed));
    if (!created_user) event("viii", "hook_service", "user_already_provisioned");

    if (response.location != resume_url)
        raise(Errc::ScenarioError, "hook resumed login at an unexpected URL: " + response.location);
    event("ix", "hook_service", "redirect_return_url", response.location);

    clock += scenario_.latencies.keystone_sp;
    event("x", "keystone_sp", "login_sequence_complete_attributes_delivered");

    clock += scenario_.latencies.keystone;
    AttributeBundle bundle = extract_bundle(merged, scenario_.attributes);
    LocalUserSpec local_user = apply_rules(rules_, bundle, scenario_.attributes);
    std::string token;
    try {
        token = simulate_token_issue(recorder_, local_user.name, local_user.domain_id, rng_);
    } catch (const Error& e) {
        if (e.code() != Errc::UnknownUser) throw;
        event("xi", "keystone", "keystone_auth_failed", local_user.name);
        return finish(Outcome::KeystoneAuthFailed);
    }
    event("xi", "keystone", "keystone_auth", local_user.name);
    tokens_[token] = local_user.name;
    event("xii", "keystone", "token_issued", token);

    clock += scenario_.latencies.horizon;
    if (!tokens_.contains(token)) raise(Errc::ScenarioError, "dashboard rejected a fresh token");
    event("xiii", "horizon", "session_established", principal.username);
    return finish(Outcome::TokenIssued);
}

std::vector<ScenarioTrace> FederationHarness::run_all() {
    std::vector<ScenarioTrace> traces;
    for (int i = 0; i < scenario_.logins; ++i) traces.push_back(run_login());
    return traces;
}

ScenarioTrace run_scenario(const Scenario& scenario) {
    FederationHarness harness(scenario);
    auto traces = harness.run_all();
    return traces.back();
}

}  // namespace fedprov::sim
