#pragma once

#include <string>
#include <vector>

#include "shef/shield/config.hpp"
#include "shef/sim/adversary.hpp"

namespace shef::harness {

enum class TraceOpKind { Read, Write, RegWrite, RegRead, Flush, Attack };

struct TraceOp {
    TraceOpKind kind = TraceOpKind::Read;
    uint64_t addr = 0;
    uint32_t len = 0;
    uint64_t payload_seed = 0;  // write payload = DetRng(payload_seed).bytes(len)
    uint16_t reg_idx = 0;
    uint32_t reg_val = 0;
    sim::AdversaryAction attack{};
};

struct Trace {
    std::vector<TraceOp> ops;
};

Bytes trace_payload(const TraceOp& op);

enum class TracePattern { STR, RA, RMW, REG };

struct TraceParams {
    uint64_t base = 0;        // region base for memory patterns
    uint32_t c_mem = 0;       // chunk size
    uint64_t chunks = 0;      // STR: chunks streamed
    uint32_t access_len = 0;  // RA/RMW access size (defaults to c_mem for STR)
    uint64_t working_set = 0; // RA/RMW working-set bytes
    uint64_t ops = 0;         // RA/RMW/REG op count
    bool writes = false;      // STR: write instead of read
};

// Deterministic per (pattern, params, seed).
Trace gen_trace(TracePattern pattern, const TraceParams& params, uint64_t seed);

// Uniform mixture used by the transparency sweep: picks a pattern and
// parameters from the seed, sized to fit the given region.
Trace gen_mixed_trace(const shield::MemoryRegion& region, uint64_t seed);

// One op per line: `R addr len`, `W addr len seed`, `REG_W idx val`,
// `REG_R idx`, `FLUSH` (addresses in hex).
std::string trace_to_text(const Trace& trace);
Trace trace_from_text(const std::string& text);

}  // namespace shef::harness
