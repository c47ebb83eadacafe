#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fedprov/backend_server.hpp"
#include "fedprov/config.hpp"
#include "fedprov/error.hpp"
#include "fedprov/harness.hpp"
#include "fedprov/hook_server.hpp"
#include "fedprov/http_backend.hpp"
#include "fedprov/mock_backend.hpp"

using namespace fedprov;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::ConfigError, "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

MappingRules load_rules(const ServiceConfig& config) {
    return parse_mapping_rules(slurp(config.mapping_rules_path.string()));
}

std::unique_ptr<Backend> make_backend(const ServiceConfig& config) {
    if (config.backend.mode == "mock") return std::make_unique<MockBackend>();
    return std::make_unique<HttpBackend>(
        HttpBackendConfig{config.backend.endpoint, config.backend.token, config.backend.timeout_ms});
}

AttributeMap read_attribute_file(const std::string& path) {
    json node = json::parse(slurp(path), nullptr, false);
    if (node.is_discarded() || !node.is_object())
        raise(Errc::ConfigError, "attribute file " + path + " must be a JSON object");
    AttributeMap attributes;
    for (const auto& [key, value] : node.items()) {
        if (!value.is_string())
            raise(Errc::ConfigError, "attribute '" + key + "' must be a string");
        attributes[key] = value.get<std::string>();
    }
    return attributes;
}

int run_serve(const std::string& config_path) {
    ServiceConfig config = load_config(config_path);
    MappingRules rules = load_rules(config);
    auto backend = make_backend(config);
    GrantsLedger ledger =
        config.ledger_path.empty() ? GrantsLedger{} : GrantsLedger::open(config.ledger_path);
    ConsentStore consent = config.consent_store_path.empty()
                               ? ConsentStore{}
                               : ConsentStore::open(config.consent_store_path);

    HookCore core(config, std::move(rules), *backend, ledger, consent);
    HookServer server(core, config);
    std::cerr << "fedprov: listening on " << config.listen_host << ":" << config.listen_port
              << config.hook_path << " (backend " << config.backend.mode << ")\n";
    return server.listen() ? 0 : 1;
}

int run_plan(const std::string& config_path, const std::string& attrs_path, bool as_json) {
    ServiceConfig config = load_config(config_path);
    MappingRules rules = load_rules(config);
    auto backend = make_backend(config);
    GrantsLedger ledger =
        config.ledger_path.empty() ? GrantsLedger{} : GrantsLedger::open(config.ledger_path);
    ConsentStore consent;

    HookCore core(config, std::move(rules), *backend, ledger, consent);
    ProvisioningPlan plan = core.dry_run(read_attribute_file(attrs_path));
    if (as_json)
        std::cout << plan.to_json().dump(2) << "\n";
    else
        std::cout << plan.render_text();
    return 0;
}

int run_validate(const std::string& config_path) {
    ServiceConfig config = load_config(config_path);
    std::cout << "config ok\n"
              << "  listen: " << config.listen_host << ":" << config.listen_port << "\n"
              << "  hook_path: " << config.hook_path << "\n"
              << "  backend: " << config.backend.mode
              << (config.backend.endpoint.empty() ? "" : " " + config.backend.endpoint) << "\n"
              << "  consent: " << (config.consent_enabled ? "enabled" : "disabled") << "\n"
              << "  require_entitlement: " << (config.require_entitlement ? "yes" : "no") << "\n";
    return 0;
}

int run_simulate(const std::string& scenario_path, std::optional<uint64_t> seed, bool emit_trace) {
    sim::Scenario scenario = sim::Scenario::from_file(scenario_path);
    if (seed) scenario.seed = *seed;

    sim::FederationHarness harness(scenario);
    auto traces = harness.run_all();

    bool ok = true;
    for (const auto& trace : traces) {
        sim::TraceExpectations expectations;
        expectations.outcome = scenario.expected_outcome;
        auto violations = sim::assert_trace(trace, expectations);
        std::cerr << "login " << trace.login_index << ": outcome=" << sim::outcome_name(trace.outcome)
                  << " latency=" << trace.total_login_latency_ms << "ms"
                  << " events=" << trace.events.size();
        if (!trace.warnings.empty()) std::cerr << " warnings=" << trace.warnings.size();
        std::cerr << "\n";
        for (const auto& warning : trace.warnings) std::cerr << "  warning: " << warning << "\n";
        for (const auto& violation : violations) {
            std::cerr << "  violation: " << violation << "\n";
            ok = false;
        }
    }

    if (emit_trace) {
        if (traces.size() == 1) {
            std::cout << traces.front().to_json().dump(2) << "\n";
        } else {
            json arr = json::array();
            for (const auto& trace : traces) arr.push_back(trace.to_json());
            std::cout << arr.dump(2) << "\n";
        }
    }
    return ok ? 0 : 1;
}

int run_mock_backend(const std::string& listen, const std::string& token) {
    auto colon = listen.rfind(':');
    if (colon == std::string::npos) raise(Errc::ConfigError, "--listen must be host:port");
    std::string host = listen.substr(0, colon);
    int port = std::stoi(listen.substr(colon + 1));

    MockBackend backend;
    BackendServer server(backend, token);
    std::cerr << "fedprov: mock identity backend on " << host << ":" << port << "\n";
    return server.listen(host, port) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated identity provisioning gateway"};
    app.require_subcommand(1);

    std::string config_path;
    std::string attrs_path;
    std::string scenario_path;
    std::string validate_path;
    std::string listen = "127.0.0.1:5001";
    std::string token;
    bool as_json = false;
    bool emit_trace = false;
    std::optional<uint64_t> seed;

    auto* serve = app.add_subcommand("serve", "Run the session-hook service");
    serve->add_option("--config", config_path, "Service config file")
        ->envname("FEDPROV_CONFIG")
        ->required();

    auto* plan = app.add_subcommand("plan", "Print the provisioning plan for an attribute file");
    plan->add_option("--config", config_path, "Service config file")
        ->envname("FEDPROV_CONFIG")
        ->required();
    plan->add_option("--attrs", attrs_path, "JSON file with released attributes")->required();
    plan->add_flag("--json", as_json, "Emit the plan as JSON");

    auto* validate = app.add_subcommand("validate-config", "Validate a service config file");
    validate->add_option("config", validate_path, "Service config file")->required();

    auto* simulate = app.add_subcommand("simulate", "Run a federation login scenario");
    simulate->add_option("--scenario", scenario_path, "Scenario file")->required();
    uint64_t seed_value = 0;
    auto* seed_opt = simulate->add_option("--seed", seed_value, "Override the scenario seed");
    simulate->add_flag("--emit-trace", emit_trace, "Emit the trace as JSON on stdout");

    auto* mock = app.add_subcommand("mock-backend", "Serve an in-memory identity backend over HTTP");
    mock->add_option("--listen", listen, "host:port to bind");
    mock->add_option("--token", token, "Require this bearer token");

    CLI11_PARSE(app, argc, argv);

    try {
        if (serve->parsed()) return run_serve(config_path);
        if (plan->parsed()) return run_plan(config_path, attrs_path, as_json);
        if (validate->parsed()) return run_validate(validate_path);
        if (simulate->parsed()) {
            if (seed_opt->count() > 0) seed = seed_value;
            return run_simulate(scenario_path, seed, emit_trace);
        }
        if (mock->parsed()) return run_mock_backend(listen, token);
    } catch (const Error& e) {
        std::cerr << "fedprov: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fedprov: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
