#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "fedprov/attributes.hpp"
#include "fedprov/entitlements.hpp"
#include "fedprov/harness.hpp"
#include "fedprov/ledger.hpp"
#include "fedprov/mapping.hpp"
#include "fedprov/mock_backend.hpp"
#include "fedprov/planner.hpp"
#include "fedprov/recording_backend.hpp"

namespace py = pybind11;
using namespace fedprov;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Federated identity provisioning: attribute extraction, mapping rules, "
              "entitlement parsing, provisioning plans and the login simulator.";

    py::register_exception<Error>(m, "FedprovError");

    py::class_<AttributeConfig>(m, "AttributeConfig")
        .def(py::init<>())
        .def(py::init([](std::string identifier, std::string entitlement, std::string mail) {
                 return AttributeConfig{std::move(identifier), std::move(entitlement), std::move(mail)};
             }),
             py::arg("identifier") = "eppn", py::arg("entitlement") = "entitlement",
             py::arg("mail") = "mail")
        .def_readwrite("identifier_attr", &AttributeConfig::identifier_attr)
        .def_readwrite("entitlement_attr", &AttributeConfig::entitlement_attr)
        .def_readwrite("mail_attr", &AttributeConfig::mail_attr);

    py::class_<AttributeBundle>(m, "AttributeBundle")
        .def_readonly("identifier", &AttributeBundle::identifier)
        .def_readonly("entitlements", &AttributeBundle::entitlements)
        .def_readonly("mail", &AttributeBundle::mail);

    m.def("extract_bundle", &extract_bundle, py::arg("attributes"), py::arg("config") = AttributeConfig{},
          "Extract the identity payload from released attributes.");
    m.def("split_multi_value", &split_multi_value, py::arg("value"));
    m.def("attribute_digest_of", [](const AttributeMap& attributes) {
        return attribute_digest(attributes);
    }, py::arg("attributes"));

    py::class_<MappingRules>(m, "MappingRules")
        .def("serialize", &MappingRules::serialize)
        .def("__len__", [](const MappingRules& r) { return r.rules.size(); });

    py::class_<LocalUserSpec>(m, "LocalUserSpec")
        .def(py::init([](std::string name, std::string domain_id, std::string user_type) {
                 return LocalUserSpec{std::move(name), std::move(domain_id), std::move(user_type)};
             }),
             py::arg("name"), py::arg("domain_id") = "default", py::arg("user_type") = "local")
        .def_readonly("name", &LocalUserSpec::name)
        .def_readonly("domain_id", &LocalUserSpec::domain_id)
        .def_readonly("user_type", &LocalUserSpec::user_type);

    m.def("parse_mapping_rules", &parse_mapping_rules, py::arg("document"));
    m.def("apply_rules", &apply_rules, py::arg("rules"), py::arg("bundle"),
          py::arg("config") = AttributeConfig{});

    py::class_<EntitlementConfig>(m, "EntitlementConfig")
        .def(py::init([](std::string prefix, bool require_prefix_match) {
                 return EntitlementConfig{std::move(prefix), require_prefix_match};
             }),
             py::arg("prefix"), py::arg("require_prefix_match") = true)
        .def_readwrite("entitlement_prefix", &EntitlementConfig::entitlement_prefix)
        .def_readwrite("require_prefix_match", &EntitlementConfig::require_prefix_match);

    py::class_<Assignment>(m, "Assignment")
        .def_readonly("project", &Assignment::project)
        .def_readonly("role", &Assignment::role)
        .def("__repr__", [](const Assignment& a) {
            return "Assignment(project='" + a.project + "', role='" + a.role + "')";
        })
        .def("__eq__", [](const Assignment& a, const Assignment& b) { return a == b; })
        .def("__hash__", [](const Assignment& a) {
            return py::hash(py::make_tuple(a.project, a.role));
        });

    py::class_<DesiredState>(m, "DesiredState")
        .def_readonly("user", &DesiredState::user)
        .def_property_readonly("assignments",
                               [](const DesiredState& d) {
                                   return std::vector<Assignment>(d.assignments.begin(),
                                                                  d.assignments.end());
                               })
        .def_readonly("mail", &DesiredState::mail)
        .def_readonly("warnings", &DesiredState::warnings);

    m.def("parse_entitlement", &parse_entitlement, py::arg("raw"), py::arg("config"),
          "Parse one entitlement value; returns None when the value is scoped "
          "to a different prefix.");
    m.def("derive_desired_state", &derive_desired_state, py::arg("bundle"), py::arg("user"),
          py::arg("config"));

    py::class_<BackendUser>(m, "BackendUser")
        .def_readonly("id", &BackendUser::id)
        .def_readonly("name", &BackendUser::name)
        .def_readonly("domain_id", &BackendUser::domain_id)
        .def_readonly("mail", &BackendUser::mail)
        .def_readonly("enabled", &BackendUser::enabled);

    py::class_<BackendProject>(m, "BackendProject")
        .def_readonly("id", &BackendProject::id)
        .def_readonly("name", &BackendProject::name)
        .def_readonly("domain_id", &BackendProject::domain_id);

    py::class_<BackendRole>(m, "BackendRole")
        .def_readonly("id", &BackendRole::id)
        .def_readonly("name", &BackendRole::name);

    py::class_<NamedGrant>(m, "NamedGrant")
        .def_readonly("user", &NamedGrant::user)
        .def_readonly("project", &NamedGrant::project)
        .def_readonly("role", &NamedGrant::role);

    py::class_<BackendSnapshot>(m, "BackendSnapshot")
        .def_readonly("users", &BackendSnapshot::users)
        .def_readonly("projects", &BackendSnapshot::projects)
        .def_readonly("roles", &BackendSnapshot::roles)
        .def_property_readonly("grants", [](const BackendSnapshot& s) {
            return std::vector<NamedGrant>(s.named_grants().begin(), s.named_grants().end());
        });

    py::class_<Backend>(m, "Backend");

    py::class_<MockBackend, Backend>(m, "MockBackend")
        .def(py::init<>())
        .def("users_list", &MockBackend::users_list)
        .def("roles_list", &MockBackend::roles_list)
        .def("projects_list", &MockBackend::projects_list)
        .def("users_create", &MockBackend::users_create, py::arg("spec"),
             py::arg("mail") = std::nullopt)
        .def("projects_create", &MockBackend::projects_create, py::arg("name"), py::arg("domain_id"))
        .def("roles_create", &MockBackend::roles_create, py::arg("name"))
        .def("roles_grant", &MockBackend::roles_grant)
        .def("roles_revoke", &MockBackend::roles_revoke)
        .def("users_update", &MockBackend::users_update, py::arg("user_id"),
             py::arg("mail") = std::nullopt, py::arg("enabled") = std::nullopt)
        .def("snapshot", &MockBackend::snapshot);

    py::class_<GrantsLedger>(m, "GrantsLedger")
        .def(py::init<>())
        .def_static("open", &GrantsLedger::open, py::arg("path"))
        .def("record_granted", &GrantsLedger::record_granted)
        .def("record_revoked", &GrantsLedger::record_revoked)
        .def("live",
             [](const GrantsLedger& l) {
                 auto live = l.live();
                 return std::vector<NamedGrant>(live.begin(), live.end());
             })
        .def("__len__", &GrantsLedger::size);

    py::class_<PlanStep>(m, "PlanStep")
        .def_property_readonly("kind", [](const PlanStep& s) { return step_kind_name(s.kind); })
        .def_readonly("user", &PlanStep::user)
        .def_readonly("project", &PlanStep::project)
        .def_readonly("role", &PlanStep::role)
        .def_readonly("mail", &PlanStep::mail)
        .def("describe", &PlanStep::describe)
        .def("__repr__", &PlanStep::describe);

    py::class_<ProvisioningPlan>(m, "ProvisioningPlan")
        .def_readonly("steps", &ProvisioningPlan::steps)
        .def("empty", &ProvisioningPlan::empty)
        .def("render_text", &ProvisioningPlan::render_text)
        .def("to_json_text", [](const ProvisioningPlan& p) { return p.to_json().dump(); })
        .def("__len__", [](const ProvisioningPlan& p) { return p.steps.size(); });

    py::class_<StepOutcome>(m, "StepOutcome")
        .def_readonly("step", &StepOutcome::step)
        .def_property_readonly("status", [](const StepOutcome& o) { return step_status_name(o.status); })
        .def_readonly("message", &StepOutcome::message);

    py::class_<ExecutionReport>(m, "ExecutionReport")
        .def_readonly("outcomes", &ExecutionReport::outcomes)
        .def("ok", &ExecutionReport::ok)
        .def("to_json_text", [](const ExecutionReport& r) { return r.to_json().dump(); });

    m.def("compute_plan", &compute_plan, py::arg("snapshot"), py::arg("desired"), py::arg("ledger"),
          "Reconcile a backend snapshot with the desired state.");
    m.def("execute_plan", &execute_plan, py::arg("plan"), py::arg("backend"), py::arg("ledger"));

    m.def("run_scenario",
          [](const std::string& scenario_json) {
              auto scenario = sim::Scenario::from_json(nlohmann::json::parse(scenario_json));
              return sim::run_scenario(scenario).to_json().dump();
          },
          py::arg("scenario_json"),
          "Run a login scenario (JSON text in, trace JSON text out).");

#ifdef FEDPROV_VERSION
    m.attr("__version__") = FEDPROV_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
