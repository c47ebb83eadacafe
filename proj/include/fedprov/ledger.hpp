#pragma once

#include <filesystem>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "fedprov/backend.hpp"

namespace fedprov {

/// Returns the current UTC time as an RFC 3339 string.
std::string rfc3339_now();

struct LedgerEntry {
    std::string user;
    std::string project;
    std::string role;
    bool granted = true;  // false = revoked
    std::string ts;
};

/// Append-only record of the role assignments this service made. The live set
/// (grants recorded and not later revoked) bounds what the planner may revoke,
/// so assignments made by administrators out of band are never touched.
///
/// Backed by a JSON-lines file when opened with a path; a default-constructed
/// ledger is memory-only. Appends are serialized through a single writer.
class GrantsLedger {
public:
    GrantsLedger() = default;
    GrantsLedger(const GrantsLedger& other);

    /// Loads an existing ledger file (missing file = empty ledger) and keeps
    /// the path for appends.
    static GrantsLedger open(const std::filesystem::path& path);

    void record_granted(const std::string& user, const std::string& project, const std::string& role);
    void record_revoked(const std::string& user, const std::string& project, const std::string& role);

    /// Replays the entries: granted adds, revoked removes.
    std::set<NamedGrant> live() const;

    std::vector<LedgerEntry> entries() const;
    size_t size() const;

private:
    void append(LedgerEntry entry);

    mutable std::mutex mutex_;
    std::vector<LedgerEntry> entries_;
    std::filesystem::path path_;  // empty = memory-only
};

}  // namespace fedprov
