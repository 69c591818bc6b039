#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shef/harness/trace.hpp"
#include "shef/shield/config.hpp"
#include "shef/sim/adversary.hpp"
#include "shef/sim/cost_model.hpp"
#include "shef/sim/iv_tracker.hpp"

namespace shef::harness {

struct AttackSpec {
    size_t after_op = 0;  // injected once this many trace ops have executed
    sim::AdversaryAction action{};
    bool expect_detected = true;  // tamper actions only
};

struct Scenario {
    std::string name = "scenario";
    uint64_t seed = 0;
    uint64_t device_serial = 1;
    shield::ShieldConfig config;
    Trace trace;
    std::vector<AttackSpec> attacks;
    sim::CostModelParams params;
    bool expect_attest_accept = true;
};

struct AttackOutcome {
    size_t attack_index = 0;
    bool expected_detected = true;
    bool detected = false;
};

// Trace replay against a provisioned Shield + reference memory, attacks
// interleaved. Judgement rule: a tamper attack counts as detected iff the
// first subsequent access touching the tampered chunk fails authentication.
struct ReplayResult {
    bool transparency_ok = true;
    bool halted = false;  // replay stopped at an authentication failure
    std::string halt_reason;
    std::vector<AttackOutcome> attack_outcomes;
    std::vector<sim::EngineSetLoad> set_loads;
    sim::ShieldStats reg_stats;
    sim::ShieldStats stats_total;
    sim::BaselineStats baseline;
    uint64_t scan_hits = 0;       // hits from explicit ScanPlaintext actions
    uint64_t secrecy_hits = 0;    // automatic post-run scan for key material
    uint64_t iv_records = 0;
    uint64_t iv_duplicates = 0;
};

ReplayResult replay_trace(const shield::ShieldConfig& config, const crypto::SymKey& dek,
                          const Trace& trace, const std::vector<AttackSpec>& attacks,
                          uint64_t seed, sim::IvTracker* shared_tracker = nullptr,
                          const std::vector<Bytes>& extra_secrets = {});

struct Report {
    std::string scenario;
    uint64_t seed = 0;
    bool attest_accepted = false;
    std::string attest_error;  // verify error name when rejected
    bool session_keys_match = false;
    ReplayResult replay;
    sim::OverheadReport overhead;
    bool expectations_met = false;

    // Canonical key=value block; bit-identical across runs of the same seed.
    std::string text() const;
};

Report run_scenario(const Scenario& scn);

// Scenario text form: [scenario] / [trace] / [attack <n>] / [expect] sections.
Scenario load_scenario_file(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& base_dir);

}  // namespace shef::harness
