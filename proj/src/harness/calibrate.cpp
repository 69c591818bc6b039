#include "shef/harness/calibrate.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shef/crypto/rng.hpp"
#include "shef/harness/config_parse.hpp"

namespace shef::harness {

namespace {

struct Point {
    std::string name;
    std::vector<sim::EngineSetLoad> set_loads;
    sim::ShieldStats reg_stats;
    sim::BaselineStats baseline;
    double target = 0;
};

double model_point(const Point& p, const sim::CostModelParams& params) {
    return sim::model_cycles(p.set_loads, p.reg_stats, params, p.baseline).overhead_pct;
}

double log_loss(const std::vector<Point>& points, const sim::CostModelParams& params) {
    double loss = 0;
    for (const auto& p : points) {
        double m = std::max(model_point(p, params), 0.1);
        double t = std::max(p.target, 0.1);
        double r = std::log(m) - std::log(t);
        loss += r * r;
    }
    return loss;
}

Point measure(const CalibrationTarget& target) {
    Point p;
    p.name = target.name;
    p.target = target.overhead_pct;
    crypto::SymKey dek = crypto::SymKey::from_bytes(crypto::DetRng(uint64_t(0xCA11B)).bytes(16));
    ReplayResult res = replay_trace(target.config, dek, calibration_trace(target.config), {}, 41);
    p.set_loads = std::move(res.set_loads);
    p.reg_stats = res.reg_stats;
    p.baseline = res.baseline;
    return p;
}

}  // namespace

Trace calibration_trace(const shield::ShieldConfig& cfg) {
    Trace t;
    for (const auto& r : cfg.regions) {
        TraceParams tp;
        tp.base = r.base;
        tp.c_mem = r.c_mem;
        tp.chunks = r.chunk_count();
        tp.access_len = uint32_t(uint64_t(r.c_mem) * 27 / 32);
        Trace part = gen_trace(TracePattern::STR, tp, 7);
        t.ops.insert(t.ops.end(), part.ops.begin(), part.ops.end());
    }
    return t;
}

double modeled_overhead(const shield::ShieldConfig& config, const Trace& trace,
                        const sim::CostModelParams& params) {
    crypto::SymKey dek = crypto::SymKey::from_bytes(crypto::DetRng(uint64_t(0xCA11B)).bytes(16));
    ReplayResult res = replay_trace(config, dek, trace, {}, 41);
    return sim::model_cycles(res.set_loads, res.reg_stats, params, res.baseline).overhead_pct;
}

CalibrationResult calibrate(const std::vector<CalibrationTarget>& targets) {
    if (targets.size() < 3)
        throw CalibrationError("calibration needs at least 3 targets, got " +
                               std::to_string(targets.size()));

    std::vector<Point> points;
    points.reserve(targets.size());
    for (const auto& t : targets) points.push_back(measure(t));

    sim::CostModelParams params;  // defaults as the starting point
    std::vector<double sim::CostModelParams::*> fields = {
        &sim::CostModelParams::aes_bytes_per_cycle_sbox4,
        &sim::CostModelParams::aes_bytes_per_cycle_sbox16,
        &sim::CostModelParams::hmac_bytes_per_cycle,
        &sim::CostModelParams::hmac_fixed_cycles_per_chunk,
        &sim::CostModelParams::pmac_bytes_per_cycle_per_engine,
        &sim::CostModelParams::dram_bytes_per_cycle,
        &sim::CostModelParams::burst_fixed_cycles,
        &sim::CostModelParams::init_fixed_cycles,
    };

    double best = log_loss(points, params);
    double step = 1.6;
    for (int pass = 0; pass < 80; ++pass) {
        bool improved = false;
        for (auto field : fields) {
            for (double factor : {step, 1.0 / step}) {
                sim::CostModelParams trial = params;
                trial.*field *= factor;
                try {
                    trial.validate();
                } catch (const std::invalid_argument&) {
                    continue;
                }
                double loss = log_loss(points, trial);
                if (loss + 1e-12 < best) {
                    best = loss;
                    params = trial;
                    improved = true;
                }
            }
        }
        if (!improved) {
            step = 1.0 + (step - 1.0) * 0.5;
            if (step < 1.0005) break;
        }
    }

    CalibrationResult result;
    result.params = params;
    result.loss = best;
    for (const auto& p : points) result.modeled.push_back(model_point(p, params));

    // Ordering check: whenever targets differ by more than the 10% tie
    // tolerance, the model must rank them the same way.
    std::ostringstream diag;
    for (size_t i = 0; i < points.size(); ++i) {
        for (size_t j = 0; j < points.size(); ++j) {
            if (points[i].target <= points[j].target * 1.1) continue;
            if (result.modeled[i] <= result.modeled[j]) {
                result.ordering_ok = false;
                diag << "ordering violated: " << points[i].name << " (target "
                     << points[i].target << ", modeled " << result.modeled[i] << ") vs "
                     << points[j].name << " (target " << points[j].target << ", modeled "
                     << result.modeled[j] << ")\n";
            }
        }
    }
    result.diagnostics = diag.str();
    if (!result.ordering_ok)
        throw CalibrationError("no parameter set reproduces the target ordering:\n" +
                               result.diagnostics);
    return result;
}

std::vector<CalibrationTarget> load_targets_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::runtime_error("cannot open targets file: " + path);
    std::string base_dir = std::filesystem::path(path).parent_path().string();
    std::vector<CalibrationTarget> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ParseError(line_no, "expected config_path<TAB>overhead_pct");
        CalibrationTarget t;
        std::string cfg_path = line.substr(0, tab);
        std::filesystem::path p(cfg_path);
        if (!p.is_absolute() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        t.name = p.stem().string();
        t.config = load_config_file(p.string());
        t.overhead_pct = std::stod(line.substr(tab + 1));
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace shef::harness
