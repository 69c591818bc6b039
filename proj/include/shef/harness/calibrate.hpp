#pragma once

#include <string>
#include <vector>

#include "shef/harness/scenario.hpp"
#include "shef/sim/cost_model.hpp"

namespace shef::harness {

struct CalibrationTarget {
    std::string name;
    shield::ShieldConfig config;
    double overhead_pct = 0;
};

struct CalibrationResult {
    sim::CostModelParams params;
    std::vector<double> modeled;  // per target, at the fitted parameters
    double loss = 0;              // sum of squared log-residuals
    bool ordering_ok = true;
    std::string diagnostics;
};

// The canonical measurement trace: stream one 27/32-chunk read per chunk over
// every region, so secured DRAM traffic exceeds the bytes requested.
Trace calibration_trace(const shield::ShieldConfig& cfg);

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic coordinate descent over CostModelParams minimizing squared
// log-residuals; throws CalibrationError if fewer than 3 targets are given or
// the fitted model cannot reproduce the target ordering (10% tie tolerance).
CalibrationResult calibrate(const std::vector<CalibrationTarget>& targets);

// Tab-separated lines: config_path<TAB>overhead_pct.
std::vector<CalibrationTarget> load_targets_tsv(const std::string& path);

// Modeled overhead of one config under given parameters (replays the
// calibration trace).
double modeled_overhead(const shield::ShieldConfig& config, const Trace& trace,
                        const sim::CostModelParams& params);

}  // namespace shef::harness
