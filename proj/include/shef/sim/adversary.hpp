#pragma once

#include <map>
#include <string>

#include "shef/shield/config.hpp"
#include "shef/sim/dram.hpp"

namespace shef::sim {

enum class AdversaryKind { FlipBit, SpliceChunks, Snapshot, Restore, ScanPlaintext };

struct AdversaryAction {
    AdversaryKind kind;
    uint64_t addr = 0;      // FlipBit
    unsigned bit = 0;       // FlipBit
    uint16_t region_id = 0; // chunk-level actions
    uint64_t chunk_i = 0;
    uint64_t chunk_j = 0;   // SpliceChunks
    std::string slot;       // Snapshot/Restore
    Bytes needle;           // ScanPlaintext
};

// Operates only on DRAM (and, for scans, transcripts) — never on on-chip state.
class Adversary {
public:
    void flip_bit(SimDram& dram, uint64_t addr, unsigned bit);
    // Swaps the full (data, tag, iv) records of two chunks.
    void splice_chunks(SimDram& dram, const shield::MemoryRegion& region, uint64_t i, uint64_t j);
    void snapshot(SimDram& dram, const shield::MemoryRegion& region, uint64_t i,
                  const std::string& slot);
    void restore(SimDram& dram, const shield::MemoryRegion& region, uint64_t i,
                 const std::string& slot);

    // Applies any action; ScanPlaintext returns the number of hits in DRAM
    // plus extra_haystack (channel transcripts), other actions return 0.
    uint64_t apply(SimDram& dram, const shield::ShieldConfig& cfg, const AdversaryAction& action,
                   ByteView extra_haystack = {});

private:
    std::map<std::string, Bytes> slots_;
};

// Number of occurrences of needle as a contiguous substring.
uint64_t count_occurrences(ByteView haystack, ByteView needle);

}  // namespace shef::sim
