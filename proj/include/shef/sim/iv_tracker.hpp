#pragma once

#include <string>
#include <unordered_set>

#include "shef/crypto/aes.hpp"

namespace shef::sim {

// Global per-scenario multiset of (subkey id, IV) pairs fed to the CTR engine.
// check() is true iff no pair repeats.
class IvTracker {
public:
    void record(std::string_view subkey_id, const crypto::Iv96& iv) {
        std::string key(subkey_id);
        key.push_back('\0');
        key.append(reinterpret_cast<const char*>(iv.data()), iv.size());
        ++records_;
        if (!seen_.insert(std::move(key)).second) ++duplicates_;
    }

    bool check() const { return duplicates_ == 0; }
    uint64_t records() const { return records_; }
    uint64_t duplicates() const { return duplicates_; }

private:
    std::unordered_set<std::string> seen_;
    uint64_t records_ = 0;
    uint64_t duplicates_ = 0;
};

}  // namespace shef::sim
