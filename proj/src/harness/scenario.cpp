#include "shef/harness/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "shef/attest/protocol.hpp"
#include "shef/harness/config_parse.hpp"
#include "shef/harness/presets.hpp"
#include "shef/shield/shield.hpp"
#include "shef/trust/trust_chain.hpp"

namespace shef::harness {

namespace {

using crypto::SymKey;

// Chunks a tamper action lands on, by walking data and metadata ranges.
std::vector<std::pair<uint16_t, uint64_t>> affected_chunks(const shield::ShieldConfig& cfg,
                                                           const sim::AdversaryAction& a) {
    std::vector<std::pair<uint16_t, uint64_t>> out;
    switch (a.kind) {
        case sim::AdversaryKind::FlipBit:
            for (const auto& r : cfg.regions) {
                if (a.addr >= r.base && a.addr < r.base + r.size)
                    out.emplace_back(r.region_id, (a.addr - r.base) / r.c_mem);
                if (a.addr >= r.tag_base && a.addr < r.tag_base + r.meta_size())
                    out.emplace_back(r.region_id, (a.addr - r.tag_base) / shield::kChunkMetaBytes);
            }
            break;
        case sim::AdversaryKind::SpliceChunks:
            out.emplace_back(a.region_id, a.chunk_i);
            out.emplace_back(a.region_id, a.chunk_j);
            break;
        case sim::AdversaryKind::Restore:
            out.emplace_back(a.region_id, a.chunk_i);
            break;
        default:
            break;
    }
    return out;
}

bool is_tamper(sim::AdversaryKind k) {
    return k == sim::AdversaryKind::FlipBit || k == sim::AdversaryKind::SpliceChunks ||
           k == sim::AdversaryKind::Restore;
}

uint64_t dram_size_for(const shield::ShieldConfig& cfg) {
    uint64_t end = 1 << 20;
    for (const auto& r : cfg.regions) {
        end = std::max(end, r.base + r.size);
        end = std::max(end, r.tag_base + r.meta_size());
    }
    return end;
}

}  // namespace

ReplayResult replay_trace(const shield::ShieldConfig& config, const SymKey& dek,
                          const Trace& trace, const std::vector<AttackSpec>& attacks,
                          uint64_t seed, sim::IvTracker* shared_tracker,
                          const std::vector<Bytes>& extra_secrets) {
    ReplayResult res;
    sim::IvTracker local_tracker;
    sim::IvTracker& tracker = shared_tracker ? *shared_tracker : local_tracker;
    uint64_t tracker_base = tracker.records();

    sim::SimDram dram(dram_size_for(config));
    shield::ShieldState shield(config, dek, &tracker);
    shield::HostRegisterClient host(dek, config.register_mode);
    sim::Adversary adversary;

    // Plaintext reference images and the untouched oracle copy.
    crypto::DetRng rng(seed);
    std::map<uint16_t, Bytes> reference;
    for (const auto& r : config.regions) {
        auto img_rng = rng.fork("image-" + std::to_string(r.region_id));
        Bytes image = img_rng.bytes(r.size);
        shield.provision_region(dram, r.region_id, image);
        reference[r.region_id] = std::move(image);
    }
    std::vector<uint32_t> reg_reference(config.register_count, 0);
    Bytes reg_transcript;

    // Secrecy needles: provided secrets plus samples of written plaintext.
    std::vector<Bytes> needles = extra_secrets;
    for (const auto& [rid, image] : reference)
        if (image.size() >= 16) needles.emplace_back(image.begin(), image.begin() + 16);
    size_t payload_needles = 0;
    for (const auto& op : trace.ops) {
        if (op.kind == TraceOpKind::Write && op.len >= 16 && payload_needles < 32) {
            Bytes payload = trace_payload(op);
            needles.emplace_back(payload.begin(), payload.begin() + 16);
            ++payload_needles;
        }
    }

    // Pending tamper judgements: (region, chunk) -> attack index.
    std::map<std::pair<uint16_t, uint64_t>, size_t> pending;
    std::set<std::pair<uint16_t, uint64_t>> poisoned;
    res.attack_outcomes.reserve(attacks.size());
    std::vector<size_t> outcome_of(attacks.size(), size_t(-1));
    for (size_t i = 0; i < attacks.size(); ++i) {
        if (!is_tamper(attacks[i].action.kind)) continue;
        outcome_of[i] = res.attack_outcomes.size();
        res.attack_outcomes.push_back({i, attacks[i].expect_detected, false});
    }

    auto inject = [&](size_t op_index) {
        for (size_t i = 0; i < attacks.size(); ++i) {
            if (attacks[i].after_op != op_index) continue;
            uint64_t hits = adversary.apply(dram, config, attacks[i].action, reg_transcript);
            if (attacks[i].action.kind == sim::AdversaryKind::ScanPlaintext) res.scan_hits += hits;
            for (auto key : affected_chunks(config, attacks[i].action)) {
                pending[key] = i;
                poisoned.insert(key);
            }
        }
    };

    auto chunks_of = [&](uint64_t addr, uint32_t len) {
        std::vector<std::pair<uint16_t, uint64_t>> out;
        for (const auto& r : config.regions) {
            if (addr < r.base || addr >= r.base + r.size) continue;
            uint64_t first = (addr - r.base) / r.c_mem;
            uint64_t last = (addr - r.base + len - 1) / r.c_mem;
            for (uint64_t c = first; c <= last; ++c) out.emplace_back(r.region_id, c);
        }
        return out;
    };

    auto judge = [&](uint64_t addr, uint32_t len, bool auth_failed) {
        for (auto key : chunks_of(addr, len)) {
            auto it = pending.find(key);
            if (it == pending.end()) continue;
            size_t slot = outcome_of[it->second];
            if (slot != size_t(-1)) res.attack_outcomes[slot].detected = auth_failed;
            pending.erase(it);
        }
    };

    auto touches_poison = [&](uint64_t addr, uint32_t len) {
        for (auto key : chunks_of(addr, len))
            if (poisoned.count(key)) return true;
        return false;
    };

    size_t i = 0;
    for (; i < trace.ops.size(); ++i) {
        inject(i);
        const TraceOp& op = trace.ops[i];
        switch (op.kind) {
            case TraceOpKind::Read: {
                res.baseline.bursts += 1;
                res.baseline.dram_bytes += op.len;
                auto got = shield.read(dram, op.addr, op.len);
                if (!got.ok()) {
                    judge(op.addr, op.len, true);
                    res.halted = true;
                    res.halt_reason = got.error().what;
                    break;
                }
                judge(op.addr, op.len, false);
                if (!touches_poison(op.addr, op.len)) {
                    bool match = false;
                    for (const auto& r : config.regions) {
                        if (op.addr < r.base || op.addr >= r.base + r.size) continue;
                        uint64_t off = op.addr - r.base;
                        const Bytes& ref = reference.at(r.region_id);
                        match = std::equal(got.value().begin(), got.value().end(),
                                           ref.begin() + off);
                    }
                    if (!match) res.transparency_ok = false;
                }
                break;
            }
            case TraceOpKind::Write: {
                res.baseline.bursts += 1;
                res.baseline.dram_bytes += op.len;
                Bytes payload = trace_payload(op);
                auto got = shield.write(dram, op.addr, payload);
                if (!got.ok()) {
                    judge(op.addr, op.len, true);
                    res.halted = true;
                    res.halt_reason = got.error().what;
                    break;
                }
                judge(op.addr, op.len, false);
                for (const auto& r : config.regions) {
                    if (op.addr < r.base || op.addr >= r.base + r.size) continue;
                    uint64_t off = op.addr - r.base;
                    std::copy(payload.begin(), payload.end(),
                              reference.at(r.region_id).begin() + off);
                }
                break;
            }
            case TraceOpKind::RegWrite: {
                res.baseline.bursts += 1;
                res.baseline.dram_bytes += 4;
                Bytes wire = host.make_write(op.reg_idx, op.reg_val);
                append(reg_transcript, wire);
                auto got = shield.reg_host_write(wire);
                if (!got.ok()) {
                    res.halted = true;
                    res.halt_reason = got.error().what;
                    break;
                }
                reg_reference[op.reg_idx] = op.reg_val;
                if (shield.reg_accel_read(op.reg_idx) != op.reg_val) res.transparency_ok = false;
                break;
            }
            case TraceOpKind::RegRead: {
                res.baseline.bursts += 1;
                res.baseline.dram_bytes += 4;
                Bytes wire = shield.reg_host_read(op.reg_idx);
                append(reg_transcript, wire);
                auto got = host.parse_read(wire);
                if (!got.ok()) {
                    res.halted = true;
                    res.halt_reason = got.error().what;
                    break;
                }
                if (got.value() != reg_reference[op.reg_idx]) res.transparency_ok = false;
                break;
            }
            case TraceOpKind::Flush:
                shield.flush(dram);
                break;
            case TraceOpKind::Attack:
                break;  // attacks travel via AttackSpec, not inline ops
        }
        if (res.halted) break;
    }
    if (!res.halted) {
        inject(trace.ops.size());
        shield.flush(dram);
    }

    for (const auto& es : config.engine_sets)
        res.set_loads.emplace_back(es, shield.stats_for_set(es.id));
    res.reg_stats = shield.register_stats();
    res.stats_total = shield.stats_total();
    res.iv_records = tracker.records() - tracker_base;
    res.iv_duplicates = tracker.duplicates();

    for (const auto& needle : needles)
        res.secrecy_hits += sim::count_occurrences(dram.contents(), needle) +
                            sim::count_occurrences(reg_transcript, needle);
    return res;
}

Report run_scenario(const Scenario& scn) {
    Report report;
    report.scenario = scn.name;
    report.seed = scn.seed;

    crypto::DetRng rng(scn.seed);

    trust::CaRegistry registry;
    auto dev_rng = rng.fork("device");
    auto identity = trust::provision_device(scn.device_serial, dev_rng, registry);
    auto fw = trust::boot_rom_load(identity, identity.aes_device_key);
    Bytes kernel_image = crypto::DetRng(uint64_t(0x5ec00001)).bytes(2048);
    auto ctx = trust::firmware_boot_kernel(fw, kernel_image);
    registry.trust_kernel(ctx.kernel_hash);

    auto vrng = rng.fork("vendor");
    SymKey bitstr_key = SymKey::from_bytes(vrng.bytes(32));
    auto shield_kp = crypto::keypair_gen(vrng);
    std::string cfg_text = config_to_text(scn.config);
    Bytes descriptor = to_bytes("accelerator-image-v1");
    auto enc_bs =
        attest::vendor_package_bitstream(bitstr_key, descriptor, shield_kp, cfg_text, vrng);

    attest::ProxyChannel proxy;
    uint64_t sid = rng.fork("session").u64();

    attest::Vendor vendor;
    vendor.device_serial = scn.device_serial;
    auto challenge = attest::vendor_begin(vendor, vrng);
    proxy.send({attest::MsgTag::Challenge, sid, 1, challenge.canonical()});
    auto m1 = proxy.recv();
    auto ch = attest::Challenge::parse(m1->body);

    auto [report_msg, kernel_session] = attest::kernel_attest(ctx, *ch, enc_bs);
    proxy.send({attest::MsgTag::Report, sid, 2, report_msg.encode()});
    auto m2 = proxy.recv();
    auto parsed = attest::ReportMessage::parse(m2->body);

    auto verdict = attest::vendor_verify(vendor, *parsed, registry, enc_bs.hash());
    report.attest_accepted = verdict.ok();
    if (!verdict.ok()) {
        report.attest_error = attest::verify_error_name(verdict.error());
        report.expectations_met = !scn.expect_attest_accept;
        return report;
    }
    auto& vendor_session = verdict.value();
    report.session_keys_match = vendor_session.key.bytes() == kernel_session.key.bytes();

    Bytes key_msg = attest::vendor_release_key(vendor_session, bitstr_key);
    proxy.send({attest::MsgTag::KeyRelease, sid, 3, key_msg});
    auto m3 = proxy.recv();
    auto loaded = attest::kernel_load_bitstream(ctx, kernel_session, m3->body, enc_bs);
    if (!loaded.ok()) {
        report.attest_accepted = false;
        report.attest_error = loaded.error().what;
        report.expectations_met = !scn.expect_attest_accept;
        return report;
    }

    auto orng = rng.fork("owner");
    auto [dek, envelope] = attest::owner_provision(loaded.value().shield_enc_keypair.pub, orng);
    proxy.send({attest::MsgTag::LoadKey, sid, 4, envelope.ciphertext});
    auto m4 = proxy.recv();
    auto unwrapped = attest::shield_unwrap(loaded.value().shield_enc_keypair,
                                           attest::LoadKeyEnvelope{m4->body});
    if (!unwrapped.ok()) {
        report.attest_accepted = false;
        report.attest_error = unwrapped.error().what;
        report.expectations_met = false;
        return report;
    }

    std::vector<Bytes> secrets = {
        unwrapped.value().bytes(), bitstr_key.bytes(),         fw.device_keypair.priv,
        ctx.attest_keypair.priv,  loaded.value().shield_enc_keypair.priv,
    };
    report.replay = replay_trace(scn.config, unwrapped.value(), scn.trace, scn.attacks, scn.seed,
                                 nullptr, secrets);
    for (const auto& needle : secrets)
        report.replay.secrecy_hits += sim::count_occurrences(proxy.transcript(), needle);

    if (report.replay.baseline.dram_bytes || report.replay.baseline.bursts)
        report.overhead =
            sim::model_cycles(report.replay.set_loads, report.replay.reg_stats, scn.params,
                              report.replay.baseline);

    bool attacks_met = true;
    for (const auto& ao : report.replay.attack_outcomes)
        if (ao.detected != ao.expected_detected) attacks_met = false;
    report.expectations_met = scn.expect_attest_accept && report.session_keys_match &&
                              attacks_met && report.replay.transparency_ok &&
                              report.replay.iv_duplicates == 0 && report.replay.secrecy_hits == 0;
    return report;
}

std::string Report::text() const {
    std::ostringstream out;
    out << "scenario=" << scenario << "\n";
    out << "seed=" << seed << "\n";
    out << "attest_accepted=" << (attest_accepted ? 1 : 0) << "\n";
    if (!attest_error.empty()) out << "attest_error=" << attest_error << "\n";
    out << "session_keys_match=" << (session_keys_match ? 1 : 0) << "\n";
    out << "transparency_ok=" << (replay.transparency_ok ? 1 : 0) << "\n";
    out << "halted=" << (replay.halted ? 1 : 0) << "\n";
    if (replay.halted) out << "halt_reason=" << replay.halt_reason << "\n";
    for (const auto& ao : replay.attack_outcomes)
        out << "attack" << ao.attack_index << "="
            << (ao.detected ? "detected" : "undetected") << "/expect_"
            << (ao.expected_detected ? "detected" : "undetected") << "\n";
    out << "scan_hits=" << replay.scan_hits << "\n";
    out << "secrecy_hits=" << replay.secrecy_hits << "\n";
    out << "iv_records=" << replay.iv_records << "\n";
    out << "iv_duplicates=" << replay.iv_duplicates << "\n";
    const auto& st = replay.stats_total;
    out << "buffer_hits=" << st.buffer_hits << "\n";
    out << "buffer_misses=" << st.buffer_misses << "\n";
    out << "chunks_sealed=" << st.chunks_sealed << "\n";
    out << "chunks_opened=" << st.chunks_opened << "\n";
    out << "dram_bytes_read=" << st.dram_bytes_read << "\n";
    out << "dram_bytes_written=" << st.dram_bytes_written << "\n";
    out << "mac_bytes=" << st.mac_bytes << "\n";
    out << "aes_bytes=" << st.aes_bytes << "\n";
    out << "bursts=" << st.bursts << "\n";
    out << "baseline_bytes=" << replay.baseline.dram_bytes << "\n";
    out << "baseline_bursts=" << replay.baseline.bursts << "\n";
    out << "baseline_cycles=" << overhead.baseline_cycles << "\n";
    out << "secured_cycles=" << overhead.secured_cycles << "\n";
    char pct[64];
    std::snprintf(pct, sizeof pct, "%.4f", overhead.overhead_pct);
    out << "overhead_pct=" << pct << "\n";
    out << "status=" << (expectations_met ? "ok" : "expectation_failed") << "\n";
    return out.str();
}

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
    Scenario scn;
    bool have_config = false;
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        if (path.is_absolute() || base_dir.empty()) return p;
        return (std::filesystem::path(base_dir) / path).string();
    };
    for (const auto& s : parse_sections(text)) {
        auto num_or = [&](const std::string& key, uint64_t dflt) {
            const std::string* v = s.find(key);
            return v ? parse_u64(*v, s.line_no) : dflt;
        };
        if (s.name == "scenario") {
            scn.name = s.get_or("name", scn.name);
            scn.seed = num_or("seed", 0);
            scn.device_serial = num_or("serial", 1);
            if (const std::string* preset = s.find("preset")) {
                Preset p = preset_by_name(*preset);
                scn.config = p.config;
                scn.trace = p.trace;
                have_config = true;
            }
            if (const std::string* cfg = s.find("config")) {
                scn.config = load_config_file(resolve(*cfg));
                have_config = true;
            }
            if (const std::string* params = s.find("params")) {
                std::ifstream in(resolve(*params));
                if (!in.good())
                    throw ParseError(s.line_no, "cannot open params file: " + *params);
                std::stringstream ss;
                ss << in.rdbuf();
                scn.params = sim::CostModelParams::parse(ss.str());
            }
        } else if (s.name == "trace") {
            if (const std::string* file = s.find("file")) {
                std::ifstream in(resolve(*file));
                if (!in.good()) throw ParseError(s.line_no, "cannot open trace file: " + *file);
                std::stringstream ss;
                ss << in.rdbuf();
                scn.trace = trace_from_text(ss.str());
            } else if (const std::string* pattern = s.find("pattern")) {
                TraceParams tp;
                tp.base = num_or("base", 0);
                tp.c_mem = uint32_t(num_or("c_mem", 0));
                tp.chunks = num_or("chunks", 0);
                tp.access_len = uint32_t(num_or("access_len", 0));
                tp.working_set = num_or("working_set", 0);
                tp.ops = num_or("ops", 0);
                tp.writes = s.get_or("writes", "off") == "on";
                TracePattern pat;
                if (*pattern == "str") pat = TracePattern::STR;
                else if (*pattern == "ra") pat = TracePattern::RA;
                else if (*pattern == "rmw") pat = TracePattern::RMW;
                else if (*pattern == "reg") pat = TracePattern::REG;
                else throw ParseError(s.line_no, "pattern must be str|ra|rmw|reg");
                scn.trace = gen_trace(pat, tp, num_or("seed", scn.seed));
            } else {
                throw ParseError(s.line_no, "[trace] needs file= or pattern=");
            }
        } else if (s.name == "attack") {
            AttackSpec spec;
            spec.after_op = num_or("after_op", 0);
            std::string kind = s.get("kind", s.line_no);
            if (kind == "flipbit") {
                spec.action.kind = sim::AdversaryKind::FlipBit;
                spec.action.addr = parse_u64(s.get("addr", s.line_no), s.line_no);
                spec.action.bit = unsigned(num_or("bit", 0));
            } else if (kind == "splice") {
                spec.action.kind = sim::AdversaryKind::SpliceChunks;
                spec.action.region_id = uint16_t(num_or("region", 0));
                spec.action.chunk_i = parse_u64(s.get("chunk_i", s.line_no), s.line_no);
                spec.action.chunk_j = parse_u64(s.get("chunk_j", s.line_no), s.line_no);
            } else if (kind == "snapshot" || kind == "restore") {
                spec.action.kind = kind == "snapshot" ? sim::AdversaryKind::Snapshot
                                                      : sim::AdversaryKind::Restore;
                spec.action.region_id = uint16_t(num_or("region", 0));
                spec.action.chunk_i = parse_u64(s.get("chunk_i", s.line_no), s.line_no);
                spec.action.slot = s.get_or("slot", "s0");
            } else if (kind == "scan") {
                spec.action.kind = sim::AdversaryKind::ScanPlaintext;
                spec.action.needle = from_hex(s.get("needle", s.line_no));
            } else {
                throw ParseError(s.line_no, "unknown attack kind '" + kind + "'");
            }
            spec.expect_detected = s.get_or("expect", "detected") == "detected";
            scn.attacks.push_back(std::move(spec));
        } else if (s.name == "expect") {
            scn.expect_attest_accept = s.get_or("attest", "accept") == "accept";
        } else {
            throw ParseError(s.line_no, "unknown section [" + s.name + "]");
        }
    }
    if (!have_config) throw ParseError(0, "[scenario] needs preset= or config=");
    return scn;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::runtime_error("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace shef::harness
