#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace shef::shield {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RegionMode { ReadWrite, StreamWrite, ReadOnly };
enum class MacKind { Hmac, Pmac };
enum class RegisterMode { PlainAddress, EncryptedAddress };

// Per-chunk DRAM metadata record: 16-byte tag followed by the 12-byte IV used
// for the current sealed contents.
constexpr uint64_t kChunkMetaBytes = 16 + 12;

struct EngineSetConfig {
    uint8_t id = 0;
    uint8_t aes_engines = 1;
    uint8_t sbox_parallelism = 4;  // 4 or 16
    uint16_t key_bits = 128;       // 128 or 256
    MacKind mac_kind = MacKind::Hmac;
    uint8_t mac_engines = 1;
};

struct MemoryRegion {
    std::string name;
    uint16_t region_id = 0;
    uint64_t base = 0;
    uint64_t size = 0;
    uint32_t c_mem = 0;
    uint64_t tag_base = 0;
    RegionMode mode = RegionMode::ReadWrite;
    bool counters_enabled = false;
    uint8_t counter_bits = 64;
    uint32_t buffer_bytes = 0;
    uint8_t engine_set_id = 0;

    uint64_t chunk_count() const { return size / c_mem; }
    uint64_t chunk_data_addr(uint64_t chunk_index) const { return base + chunk_index * c_mem; }
    uint64_t chunk_meta_addr(uint64_t chunk_index) const {
        return tag_base + chunk_index * kChunkMetaBytes;
    }
    uint64_t meta_size() const { return chunk_count() * kChunkMetaBytes; }
};

struct ShieldConfig {
    std::vector<MemoryRegion> regions;
    std::vector<EngineSetConfig> engine_sets;
    uint16_t register_count = 1;
    RegisterMode register_mode = RegisterMode::PlainAddress;

    const EngineSetConfig& engine_set(uint8_t id) const;
    const MemoryRegion* region_by_id(uint16_t region_id) const;

    // Throws ConfigError on overlapping ranges, bad chunk sizes, or dangling
    // engine-set references.
    void validate() const;
};

}  // namespace shef::shield
