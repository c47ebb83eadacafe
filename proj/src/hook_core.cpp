#include "fedprov/hook_core.hpp"

#include <fstream>
#include <sstream>

#include "fedprov/entitlements.hpp"
#include "fedprov/error.hpp"

namespace fedprov {

namespace {

bool is_absolute_url(const std::string& url) {
    auto scheme_end = url.find("://");
    return scheme_end != std::string::npos && scheme_end > 0;
}

std::string html_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&#39;"; break;
        default: out += c;
        }
    }
    return out;
}

void replace_all(std::string& text, const std::string& needle, const std::string& value) {
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos))
        text.replace(pos, needle.size(), value), pos += value.size();
}

HookResponse plain(int status, const std::string& body) {
    HookResponse res;
    res.status = status;
    res.body = body;
    return res;
}

HookResponse redirect(const std::string& location) {
    HookResponse res;
    res.status = 302;
    res.location = location;
    return res;
}

}  // namespace

const std::string& default_consent_template() {
    static const std::string tmpl = R"(<!DOCTYPE html>
<html>
<head><meta charset="utf-8"><title>Registration confirmation</title></head>
<body>
<h1>Confirm your registration</h1>
<p>Continuing will register the following information with the cloud service:</p>
<dl>
<dt>Identifier</dt><dd>{{identifier}}</dd>
{{attribute_rows}}
</dl>
<form method="post" action="{{action_path}}">
<input type="hidden" name="csrf_token" value="{{csrf_token}}">
<input type="hidden" name="return_url" value="{{return_url}}">
<button type="submit" name="decision" value="accept">Accept and continue</button>
<button type="submit" name="decision" value="abandon">Abandon</button>
</form>
</body>
</html>
)";
    return tmpl;
}

std::string render_consent_page(const std::string& template_text, const std::string& identifier,
                                const AttributeMap& attributes, const std::string& action_path,
                                const std::string& csrf_token, const std::string& return_url) {
    std::string rows;
    for (const auto& [name, value] : attributes) {
        rows += "<dt>" + html_escape(name) + "</dt><dd>" + html_escape(value) + "</dd>\n";
    }
    std::string page = template_text;
    replace_all(page, "{{identifier}}", html_escape(identifier));
    replace_all(page, "{{attribute_rows}}", rows);
    replace_all(page, "{{action_path}}", html_escape(action_path));
    replace_all(page, "{{csrf_token}}", html_escape(csrf_token));
    replace_all(page, "{{return_url}}", html_escape(return_url));
    return page;
}

HookCore::HookCore(const ServiceConfig& config, MappingRules rules, Backend& backend,
                   GrantsLedger& ledger, ConsentStore& consent)
    : config_(config),
      rules_(std::move(rules)),
      backend_(backend),
      ledger_(ledger),
      consent_(consent),
      now_([] { return std::chrono::steady_clock::now(); }),
      rng_(std::random_device{}()) {}

std::string HookCore::fresh_csrf_token() {
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng_()),
                  static_cast<unsigned long long>(rng_()));
    return buf;
}

std::mutex& HookCore::identifier_mutex(const std::string& identifier) {
    std::scoped_lock lock(mutex_);
    auto& slot = user_locks_[identifier];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
}

std::string HookCore::redirect_with_reason(const std::string& base, const std::string& reason) const {
    return base + (base.find('?') == std::string::npos ? "?" : "&") + "reason=" + reason;
}

HookResponse HookCore::handle_session_hook(const HookRequest& request) {
    if (request.return_url.empty() || !is_absolute_url(request.return_url))
        return plain(400, "missing or non-absolute 'return' parameter");

    AttributeBundle bundle;
    try {
        bundle = extract_bundle(request.attributes, config_.attributes);
    } catch (const Error& e) {
        if (e.code() == Errc::MissingIdentifier) return plain(400, e.what());
        throw;
    }

    LocalUserSpec user;
    try {
        user = apply_rules(rules_, bundle, config_.attributes);
    } catch (const Error& e) {
        if (e.code() == Errc::NoMatchingRule) return plain(403, e.what());
        throw;
    }

    DesiredState desired = derive_desired_state(bundle, user, config_.entitlement);
    if (config_.require_entitlement && desired.assignments.empty())
        return redirect(redirect_with_reason(config_.abandon_url, "no_entitlement"));

    const std::string digest = attribute_digest(request.attributes);
    if (config_.consent_enabled && !consent_.has_accepted(bundle.identifier, digest)) {
        Challenge challenge{bundle.identifier, digest, request.return_url, request.attributes, now_()};
        return consent_page(challenge);
    }

    return provision_and_resume(request.attributes, request.return_url);
}

HookResponse HookCore::consent_page(const Challenge& challenge) {
    std::string token;
    {
        std::scoped_lock lock(mutex_);
        token = fresh_csrf_token();
        challenges_[token] = challenge;
    }

    std::string template_text = default_consent_template();
    if (!config_.consent_template_path.empty()) {
        std::ifstream in(config_.consent_template_path);
        if (in) {
            std::stringstream buf;
            buf << in.rdbuf();
            template_text = buf.str();
        }
    }

    HookResponse res;
    res.status = 200;
    res.content_type = "text/html; charset=utf-8";
    res.csrf_token = token;
    res.body = render_consent_page(template_text, challenge.identifier, challenge.attributes,
                                   config_.hook_path + "/consent", token, challenge.return_url);
    return res;
}

HookResponse HookCore::handle_consent_decision(const ConsentForm& form) {
    Challenge challenge;
    {
        std::scoped_lock lock(mutex_);
        auto it = challenges_.find(form.csrf_token);
        if (form.csrf_token.empty() || it == challenges_.end())
            return plain(403, "unknown or missing CSRF token");
        challenge = it->second;
        challenges_.erase(it);
    }

    auto age = std::chrono::duration_cast<std::chrono::seconds>(now_() - challenge.created);
    if (age.count() > config_.consent_challenge_ttl_seconds)
        return plain(410, "consent challenge expired; restart the login");

    if (form.decision == "accept") {
        consent_.record(challenge.identifier, challenge.digest, true);
        return provision_and_resume(challenge.attributes, challenge.return_url);
    }
    if (form.decision == "abandon") {
        // Nothing was relayed to the backend at any point of this login.
        consent_.record(challenge.identifier, challenge.digest, false);
        return redirect(config_.abandon_url);
    }
    return plain(400, "decision must be 'accept' or 'abandon'");
}

HookResponse HookCore::provision_and_resume(const AttributeMap& attributes,
                                            const std::string& return_url) {
    AttributeBundle bundle = extract_bundle(attributes, config_.attributes);
    LocalUserSpec user = apply_rules(rules_, bundle, config_.attributes);
    DesiredState desired = derive_desired_state(bundle, user, config_.entitlement);

    std::scoped_lock user_lock(identifier_mutex(bundle.identifier));
    try {
        ProvisioningPlan plan = compute_plan(backend_.snapshot(), desired, ledger_);
        ExecutionReport report = execute_plan(plan, backend_, ledger_);
        {
            std::scoped_lock lock(mutex_);
            last_report_ = report;
        }
        if (!report.ok()) {
            std::string detail;
            for (const auto& outcome : report.outcomes)
                if (outcome.status == StepStatus::Failed)
                    detail += outcome.step.describe() + " -> " + outcome.message + "\n";
            return plain(502, "provisioning incomplete; login not resumed\n" + detail);
        }
    } catch (const Error& e) {
        if (e.code() == Errc::BackendUnavailable)
            return plain(502, std::string("identity backend unavailable: ") + e.what());
        throw;
    }

    // Only a fully provisioned user is handed back to the login sequence.
    return redirect(return_url);
}

ProvisioningPlan HookCore::dry_run(const AttributeMap& attributes) {
    AttributeBundle bundle = extract_bundle(attributes, config_.attributes);
    LocalUserSpec user = apply_rules(rules_, bundle, config_.attributes);
    DesiredState desired = derive_desired_state(bundle, user, config_.entitlement);
    return compute_plan(backend_.snapshot(), desired, ledger_);
}

std::optional<ExecutionReport> HookCore::last_report() const {
    std::scoped_lock lock(mutex_);
    return last_report_;
}

size_t HookCore::pending_challenges() const {
    std::scoped_lock lock(mutex_);
    return challenges_.size();
}

}  // namespace fedprov
