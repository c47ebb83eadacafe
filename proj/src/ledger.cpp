#include "fedprov/ledger.hpp"

#include <chrono>
#include <fstream>

#include <json.hpp>

#include "fedprov/error.hpp"

namespace fedprov {

using nlohmann::json;

std::string rfc3339_now() {
    auto now = std::chrono::system_clock::now();
    auto secs = std::chrono::time_point_cast<std::chrono::seconds>(now);
    std::time_t t = std::chrono::system_clock::to_time_t(secs);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

GrantsLedger::GrantsLedger(const GrantsLedger& other) {
    std::scoped_lock lock(other.mutex_);
    entries_ = other.entries_;
    path_ = other.path_;
}

GrantsLedger GrantsLedger::open(const std::filesystem::path& path) {
    GrantsLedger ledger;
    ledger.path_ = path;
    std::ifstream in(path);
    if (!in) return ledger;  // first run

    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json node = json::parse(line, nullptr, false);
        if (node.is_discarded() || !node.is_object())
            raise(Errc::ConfigError,
                  "ledger " + path.string() + ":" + std::to_string(lineno) + ": not a JSON object");
        LedgerEntry entry;
        entry.user = node.value("user", "");
        entry.project = node.value("project", "");
        entry.role = node.value("role", "");
        entry.granted = node.value("action", "") == "granted";
        entry.ts = node.value("ts", "");
        if (entry.user.empty() || entry.project.empty() || entry.role.empty())
            raise(Errc::ConfigError,
                  "ledger " + path.string() + ":" + std::to_string(lineno) + ": incomplete entry");
        ledger.entries_.push_back(std::move(entry));
    }
    return ledger;
}

void GrantsLedger::append(LedgerEntry entry) {
    std::scoped_lock lock(mutex_);
    if (!path_.empty()) {
        std::ofstream out(path_, std::ios::app);
        if (!out) raise(Errc::ConfigError, "cannot append to ledger " + path_.string());
        out << json{{"user", entry.user},
                    {"project", entry.project},
                    {"role", entry.role},
                    {"action", entry.granted ? "granted" : "revoked"},
                    {"ts", entry.ts}}
                   .dump()
            << '\n';
    }
    entries_.push_back(std::move(entry));
}

void GrantsLedger::record_granted(const std::string& user, const std::string& project,
                                  const std::string& role) {
    append({user, project, role, true, rfc3339_now()});
}

void GrantsLedger::record_revoked(const std::string& user, const std::string& project,
                                  const std::string& role) {
    append({user, project, role, false, rfc3339_now()});
}

std::set<NamedGrant> GrantsLedger::live() const {
    std::scoped_lock lock(mutex_);
    std::set<NamedGrant> live;
    for (const auto& entry : entries_) {
        NamedGrant grant{entry.user, entry.project, entry.role};
        if (entry.granted)
            live.insert(std::move(grant));
        else
            live.erase(grant);
    }
    return live;
}

std::vector<LedgerEntry> GrantsLedger::entries() const {
    std::scoped_lock lock(mutex_);
    return entries_;
}

size_t GrantsLedger::size() const {
    std::scoped_lock lock(mutex_);
    return entries_.size();
}

}  // namespace fedprov
