#include "shef/sim/cost_model.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace shef::sim {

void CostModelParams::validate() const {
    auto pos = [](double v, const char* name) {
        if (!(v > 0)) throw std::invalid_argument(std::string("cost model: ") + name +
                                                  " must be strictly positive");
    };
    pos(aes_bytes_per_cycle_sbox4, "aes_bytes_per_cycle_sbox4");
    pos(aes_bytes_per_cycle_sbox16, "aes_bytes_per_cycle_sbox16");
    pos(hmac_bytes_per_cycle, "hmac_bytes_per_cycle");
    pos(pmac_bytes_per_cycle_per_engine, "pmac_bytes_per_cycle_per_engine");
    pos(dram_bytes_per_cycle, "dram_bytes_per_cycle");
    if (hmac_fixed_cycles_per_chunk < 0 || burst_fixed_cycles < 0 || init_fixed_cycles < 0)
        throw std::invalid_argument("cost model: fixed cycle terms must be non-negative");
    if (!(aes_bytes_per_cycle_sbox16 > aes_bytes_per_cycle_sbox4))
        throw std::invalid_argument("cost model: sbox16 rate must exceed sbox4 rate");
}

std::string CostModelParams::serialize() const {
    std::ostringstream out;
    out.precision(17);
    out << "aes_bytes_per_cycle_sbox4=" << aes_bytes_per_cycle_sbox4 << "\n"
        << "aes_bytes_per_cycle_sbox16=" << aes_bytes_per_cycle_sbox16 << "\n"
        << "hmac_bytes_per_cycle=" << hmac_bytes_per_cycle << "\n"
        << "hmac_fixed_cycles_per_chunk=" << hmac_fixed_cycles_per_chunk << "\n"
        << "pmac_bytes_per_cycle_per_engine=" << pmac_bytes_per_cycle_per_engine << "\n"
        << "dram_bytes_per_cycle=" << dram_bytes_per_cycle << "\n"
        << "burst_fixed_cycles=" << burst_fixed_cycles << "\n"
        << "init_fixed_cycles=" << init_fixed_cycles << "\n";
    return out.str();
}

CostModelParams CostModelParams::parse(const std::string& text) {
    std::map<std::string, double> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("cost model: bad line: " + line);
        kv[line.substr(0, eq)] = std::stod(line.substr(eq + 1));
    }
    CostModelParams p;
    auto get = [&](const char* name, double& field) {
        auto it = kv.find(name);
        if (it != kv.end()) field = it->second;
    };
    get("aes_bytes_per_cycle_sbox4", p.aes_bytes_per_cycle_sbox4);
    get("aes_bytes_per_cycle_sbox16", p.aes_bytes_per_cycle_sbox16);
    get("hmac_bytes_per_cycle", p.hmac_bytes_per_cycle);
    get("hmac_fixed_cycles_per_chunk", p.hmac_fixed_cycles_per_chunk);
    get("pmac_bytes_per_cycle_per_engine", p.pmac_bytes_per_cycle_per_engine);
    get("dram_bytes_per_cycle", p.dram_bytes_per_cycle);
    get("burst_fixed_cycles", p.burst_fixed_cycles);
    get("init_fixed_cycles", p.init_fixed_cycles);
    p.validate();
    return p;
}

OverheadReport model_cycles(const std::vector<EngineSetLoad>& sets, const ShieldStats& reg_stats,
                            const CostModelParams& params, const BaselineStats& baseline) {
    params.validate();
    if (baseline.dram_bytes == 0 && baseline.bursts == 0)
        throw std::invalid_argument("cost model: empty baseline");

    uint64_t total_bursts = reg_stats.bursts;
    double secured = params.init_fixed_cycles;
    for (const auto& [es, st] : sets) {
        total_bursts += st.bursts;
        double aes_rate = es.sbox_parallelism == 16 ? params.aes_bytes_per_cycle_sbox16
                                                    : params.aes_bytes_per_cycle_sbox4;
        // AES-256 runs 14 rounds vs 10: 1.4x the per-byte cost.
        if (es.key_bits == 256) aes_rate /= 1.4;
        double aes_time = double(st.aes_bytes) / (double(es.aes_engines) * aes_rate);

        double mac_time;
        uint64_t chunks = st.chunks_opened + st.chunks_sealed;
        if (es.mac_kind == shield::MacKind::Hmac) {
            // Serial per chunk; engine count does not help within a chunk.
            mac_time = double(st.mac_bytes) / params.hmac_bytes_per_cycle +
                       double(chunks) * params.hmac_fixed_cycles_per_chunk;
        } else {
            mac_time = double(st.mac_bytes) /
                       (double(es.mac_engines) * params.pmac_bytes_per_cycle_per_engine);
        }
        double dram_time =
            double(st.dram_bytes_read + st.dram_bytes_written) / params.dram_bytes_per_cycle;
        secured += std::max(dram_time, std::max(aes_time, mac_time));
    }
    // Register interface: one AES + one HMAC engine, serial.
    secured += double(reg_stats.aes_bytes) / params.aes_bytes_per_cycle_sbox4 +
               double(reg_stats.mac_bytes) / params.hmac_bytes_per_cycle;
    secured += double(total_bursts) * params.burst_fixed_cycles;

    double base = params.init_fixed_cycles + double(baseline.bursts) * params.burst_fixed_cycles +
                  double(baseline.dram_bytes) / params.dram_bytes_per_cycle;
    if (!(base > 0)) throw std::invalid_argument("cost model: zero baseline cycles");

    OverheadReport rep;
    rep.baseline_cycles = uint64_t(std::llround(base));
    rep.secured_cycles = uint64_t(std::llround(secured));
    rep.overhead_pct = 100.0 * (secured / base - 1.0);
    return rep;
}

}  // namespace shef::sim
