#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "fedprov/attributes.hpp"

namespace fedprov {

/// Stable digest of a released attribute set, independent of delivery order.
/// A changed release (new entitlement, changed mail) yields a new digest and
/// therefore re-triggers consent.
std::string attribute_digest(const AttributeMap& attributes);

struct ConsentRecord {
    std::string identifier;
    std::string digest;
    bool accepted = false;
    std::string ts;
};

/// Consent decisions, persisted as JSON lines when opened with a path. The
/// latest record per (identifier, digest) wins.
class ConsentStore {
public:
    ConsentStore() = default;

    static ConsentStore open(const std::filesystem::path& path);

    bool has_accepted(const std::string& identifier, const std::string& digest) const;
    void record(const std::string& identifier, const std::string& digest, bool accepted);

    std::vector<ConsentRecord> records() const;

private:
    mutable std::mutex mutex_;
    std::vector<ConsentRecord> records_;
    std::filesystem::path path_;
};

}  // namespace fedprov
