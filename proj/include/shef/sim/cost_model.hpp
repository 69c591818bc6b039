#pragma once

#include <string>
#include <vector>

#include "shef/shield/config.hpp"
#include "shef/sim/dram.hpp"

namespace shef::sim {

// Analytic roofline-style throughput model: per engine set the secured run
// costs max(DRAM transfer time, crypto time); the baseline replays the same
// trace with no crypto and no tag/IV traffic.
struct CostModelParams {
    double aes_bytes_per_cycle_sbox4 = 1.0;
    double aes_bytes_per_cycle_sbox16 = 4.0;
    double hmac_bytes_per_cycle = 1.0;
    double hmac_fixed_cycles_per_chunk = 64.0;
    double pmac_bytes_per_cycle_per_engine = 1.0;
    double dram_bytes_per_cycle = 16.0;
    double burst_fixed_cycles = 16.0;
    double init_fixed_cycles = 10000.0;

    void validate() const;  // all strictly positive, sbox16 > sbox4

    std::string serialize() const;
    static CostModelParams parse(const std::string& text);
};

struct BaselineStats {
    uint64_t dram_bytes = 0;
    uint64_t bursts = 0;
};

struct OverheadReport {
    uint64_t baseline_cycles = 0;
    uint64_t secured_cycles = 0;
    double overhead_pct = 0.0;
};

using EngineSetLoad = std::pair<shield::EngineSetConfig, ShieldStats>;

OverheadReport model_cycles(const std::vector<EngineSetLoad>& sets, const ShieldStats& reg_stats,
                            const CostModelParams& params, const BaselineStats& baseline);

}  // namespace shef::sim
