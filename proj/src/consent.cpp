#include "fedprov/consent.hpp"

#include <cstdint>
#include <fstream>

#include <json.hpp>

#include "fedprov/error.hpp"
#include "fedprov/ledger.hpp"

namespace fedprov {

using nlohmann::json;

std::string attribute_digest(const AttributeMap& attributes) {
    // FNV-1a over the canonical name/value sequence. The map is ordered, so
    // delivery order cannot influence the result.
    uint64_t hash = 1469598103934665603ull;
    auto mix = [&hash](const std::string& s) {
        for (unsigned char c : s) {
            hash ^= c;
            hash *= 1099511628211ull;
        }
        hash ^= 0x1f;
        hash *= 1099511628211ull;
    };
    for (const auto& [name, value] : attributes) {
        mix(name);
        mix(value);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

ConsentStore ConsentStore::open(const std::filesystem::path& path) {
    ConsentStore store;
    store.path_ = path;
    std::ifstream in(path);
    if (!in) return store;

    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json node = json::parse(line, nullptr, false);
        if (node.is_discarded() || !node.is_object())
            raise(Errc::ConfigError,
                  "consent store " + path.string() + ":" + std::to_string(lineno) + ": not a JSON object");
        store.records_.push_back({node.value("identifier", ""), node.value("digest", ""),
                                  node.value("decision", "") == "accepted", node.value("ts", "")});
    }
    return store;
}

bool ConsentStore::has_accepted(const std::string& identifier, const std::string& digest) const {
    std::scoped_lock lock(mutex_);
    bool accepted = false;
    for (const auto& record : records_)
        if (record.identifier == identifier && record.digest == digest) accepted = record.accepted;
    return accepted;
}

void ConsentStore::record(const std::string& identifier, const std::string& digest, bool accepted) {
    std::scoped_lock lock(mutex_);
    ConsentRecord record{identifier, digest, accepted, rfc3339_now()};
    if (!path_.empty()) {
        std::ofstream out(path_, std::ios::app);
        if (!out) raise(Errc::ConfigError, "cannot append to consent store " + path_.string());
        out << json{{"identifier", record.identifier},
                    {"digest", record.digest},
                    {"decision", accepted ? "accepted" : "abandoned"},
                    {"ts", record.ts}}
                   .dump()
            << '\n';
    }
    records_.push_back(std::move(record));
}

std::vector<ConsentRecord> ConsentStore::records() const {
    std::scoped_lock lock(mutex_);
    return records_;
}

}  // namespace fedprov
