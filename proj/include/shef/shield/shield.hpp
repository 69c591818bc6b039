#pragma once

#include <map>
#include <optional>
#include <unordered_map>

#include "shef/crypto/aead.hpp"
#include "shef/shield/config.hpp"
#include "shef/sim/dram.hpp"
#include "shef/sim/iv_tracker.hpp"

namespace shef::shield {

using crypto::Iv96;
using crypto::SymKey;
using crypto::Tag16;

struct RegionFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CrossRegionFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PermissionFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CounterExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Spoof / splice / replay are indistinguishable at this layer.
struct AuthFailure {
    std::string what;
};

struct Ok {};

enum class BurstKind { Read, Write };

struct BurstRequest {
    BurstKind kind;
    uint64_t addr = 0;
    uint32_t len = 0;
    Bytes data;  // writes only
};

struct ChunkAccess {
    uint16_t region_id;
    uint64_t chunk_index;
    uint32_t offset_in_chunk;
    uint32_t len;
};

struct SealedChunk {
    Bytes ciphertext;
    Tag16 tag;
    Iv96 iv;
};

struct ChunkMeta {
    uint64_t write_version = 0;
    uint64_t ctr = 0;
};

// Host-side sealed register envelope: destination address in the clear,
// payload sealed. In EncryptedAddress mode every envelope targets the common
// mailbox address and the register index travels inside the ciphertext.
struct RegEnvelope {
    uint16_t dest = 0;
    Bytes sealed;

    Bytes encode() const;
    static std::optional<RegEnvelope> decode(ByteView wire);
};

constexpr uint16_t kRegMailbox = 0;
constexpr uint8_t kDirHostToAccel = 3;
constexpr uint8_t kDirAccelToHost = 4;
constexpr uint64_t kWriteVersionLimit = uint64_t(1) << 40;

class ShieldState {
public:
    ShieldState(ShieldConfig cfg, const SymKey& dek, sim::IvTracker* iv_tracker = nullptr);

    const ShieldConfig& config() const { return cfg_; }

    std::vector<ChunkAccess> decode_burst(const BurstRequest& req) const;

    SealedChunk chunk_seal(uint16_t region_id, uint64_t chunk_index, ByteView plaintext);
    Result<Bytes, AuthFailure> chunk_open(uint16_t region_id, uint64_t chunk_index,
                                          ByteView ciphertext, const Tag16& tag,
                                          const Iv96& stored_iv);

    Result<Bytes, AuthFailure> read(sim::SimDram& dram, uint64_t addr, uint32_t len);
    Result<Ok, AuthFailure> write(sim::SimDram& dram, uint64_t addr, ByteView data);
    Result<Ok, AuthFailure> flush(sim::SimDram& dram);

    // Seals an initial plaintext image for a whole region directly into DRAM
    // (no buffer, no stats). Used to establish valid cold contents.
    void provision_region(sim::SimDram& dram, uint16_t region_id, ByteView image);

    // Register interface.
    Result<Ok, AuthFailure> reg_host_write(ByteView wire);
    Bytes reg_host_read(uint16_t reg_addr);
    uint32_t reg_accel_read(uint16_t idx) const;
    void reg_accel_write(uint16_t idx, uint32_t value);

    sim::ShieldStats stats_total() const;
    const sim::ShieldStats& stats_for_set(uint8_t engine_set_id) const;
    const sim::ShieldStats& register_stats() const { return reg_stats_; }

    size_t buffered_bytes(uint16_t region_id) const;

    std::map<std::pair<uint16_t, uint64_t>, ChunkMeta> export_chunk_state() const;
    void import_chunk_state(const std::map<std::pair<uint16_t, uint64_t>, ChunkMeta>& state);

    // MAC input serialization, exposed so test oracles can recompute tags.
    static Bytes chunk_mac_input(uint16_t region_id, uint64_t chunk_index, const Iv96& iv,
                                 ByteView ciphertext, bool counters_enabled, uint64_t ctr);

private:
    struct BufferLine {
        Bytes plaintext;
        bool dirty = false;
        uint64_t lru_stamp = 0;
    };

    struct RegionState {
        const MemoryRegion* region = nullptr;
        const EngineSetConfig* engine_set = nullptr;
        SymKey enc_key;
        SymKey mac_key;
        std::string key_id;
        std::unordered_map<uint64_t, ChunkMeta> chunks;
        std::unordered_map<uint64_t, BufferLine> buffer;
        size_t capacity_lines = 0;
    };

    RegionState& region_state(uint16_t region_id);
    const RegionState& region_state(uint16_t region_id) const;
    sim::ShieldStats& set_stats(uint8_t engine_set_id);
    Tag16 compute_chunk_tag(const RegionState& rs, uint64_t chunk_index, const Iv96& iv,
                            ByteView ciphertext, uint64_t ctr) const;

    // Returns the line for the chunk, filling from DRAM on miss.
    Result<BufferLine*, AuthFailure> obtain_line(sim::SimDram& dram, RegionState& rs,
                                                 uint64_t chunk_index, bool zero_fill);
    void evict_if_needed(sim::SimDram& dram, RegionState& rs);
    void write_back(sim::SimDram& dram, RegionState& rs, uint64_t chunk_index, BufferLine& line);

    ShieldConfig cfg_;
    SymKey dek_;
    sim::IvTracker* iv_tracker_;
    std::map<uint16_t, RegionState> regions_;
    std::map<uint8_t, sim::ShieldStats> set_stats_;
    sim::ShieldStats reg_stats_;

    BufferLine transient_;  // bufferless engine sets pass data through here
    uint64_t transient_chunk_ = 0;

    std::vector<uint32_t> registers_;
    SymKey reg_key_;
    crypto::SealedChannel reg_host_in_;   // host -> accel
    crypto::SealedChannel reg_host_out_;  // accel -> host
    uint64_t lru_clock_ = 0;
};

// Models the untrusted host program's view of the register interface.
class HostRegisterClient {
public:
    HostRegisterClient(const SymKey& dek, RegisterMode mode);

    Bytes make_write(uint16_t idx, uint32_t value);
    // Opens a sealed read envelope; returns the value or failure.
    Result<uint32_t, AuthFailure> parse_read(ByteView wire);

private:
    RegisterMode mode_;
    crypto::SealedChannel tx_;
    crypto::SealedChannel rx_;
};

}  // namespace shef::shield
