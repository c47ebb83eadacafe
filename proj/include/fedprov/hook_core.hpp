#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>

#include "fedprov/backend.hpp"
#include "fedprov/config.hpp"
#include "fedprov/consent.hpp"
#include "fedprov/ledger.hpp"
#include "fedprov/planner.hpp"

namespace fedprov {

/// One session-hook invocation: where to resume the login afterwards and the
/// attributes the middleware released for this session.
struct HookRequest {
    std::string return_url;
    AttributeMap attributes;
};

/// The consent form posted back by the user.
struct ConsentForm {
    std::string decision;  // "accept" or "abandon"
    std::string return_url;
    std::string csrf_token;
};

struct HookResponse {
    int status = 0;
    std::string location;      // set for redirects
    std::string body;
    std::string content_type = "text/plain; charset=utf-8";
    std::string csrf_token;    // set when the body is a consent page

    bool is_redirect() const { return status == 302; }
};

/// Transport-independent core of the session-hook service. The HTTP layer and
/// the simulation harness both drive this class, so every flow test exercises
/// the same logic that runs in production.
///
/// Flow: extract bundle -> map to local user -> derive desired assignments ->
/// (optional) consent -> plan -> execute -> resume the middleware login via
/// 302 to the caller-supplied return URL. The redirect is only ever emitted
/// after the plan executed completely, so the user is provisioned before the
/// login sequence reaches the backend. On backend trouble the service fails
/// closed with 502 and the login is not resumed.
class HookCore {
public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;

    HookCore(const ServiceConfig& config, MappingRules rules, Backend& backend,
             GrantsLedger& ledger, ConsentStore& consent);

    HookResponse handle_session_hook(const HookRequest& request);
    HookResponse handle_consent_decision(const ConsentForm& form);

    /// Computes the plan a hook request would execute, without mutating
    /// anything. Operator tooling.
    ProvisioningPlan dry_run(const AttributeMap& attributes);

    /// Report of the most recent plan execution, for observability.
    std::optional<ExecutionReport> last_report() const;

    void set_clock(Clock clock) { now_ = std::move(clock); }
    size_t pending_challenges() const;

private:
    struct Challenge {
        std::string identifier;
        std::string digest;
        std::string return_url;
        AttributeMap attributes;
        std::chrono::steady_clock::time_point created;
    };

    HookResponse provision_and_resume(const AttributeMap& attributes, const std::string& return_url);
    HookResponse consent_page(const Challenge& challenge);
    std::string redirect_with_reason(const std::string& base, const std::string& reason) const;
    std::string fresh_csrf_token();
    std::mutex& identifier_mutex(const std::string& identifier);

    const ServiceConfig& config_;
    MappingRules rules_;
    Backend& backend_;
    GrantsLedger& ledger_;
    ConsentStore& consent_;
    Clock now_;

    mutable std::mutex mutex_;
    std::map<std::string, Challenge> challenges_;  // keyed by CSRF token
    std::map<std::string, std::unique_ptr<std::mutex>> user_locks_;
    std::mt19937_64 rng_;
    std::optional<ExecutionReport> last_report_;
};

/// Renders the consent page. Exposed for template tests.
std::string render_consent_page(const std::string& template_text, const std::string& identifier,
                                const AttributeMap& attributes, const std::string& action_path,
                                const std::string& csrf_token, const std::string& return_url);

/// Built-in page used when no template file is configured.
const std::string& default_consent_template();

}  // namespace fedprov
