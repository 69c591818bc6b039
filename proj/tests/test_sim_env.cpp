#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "shef/crypto/rng.hpp"
#include "shef/sim/adversary.hpp"
#include "shef/sim/cost_model.hpp"
#include "shef/sim/iv_tracker.hpp"
#include "shef/shield/shield.hpp"

using namespace shef;
using namespace shef::sim;

namespace {

shield::ShieldConfig one_region_config(bool counters = false) {
    shield::ShieldConfig cfg;
    shield::EngineSetConfig es;
    es.id = 0;
    cfg.engine_sets = {es};
    shield::MemoryRegion r;
    r.name = "data";
    r.region_id = 1;
    r.base = 0x1000;
    r.c_mem = 256;
    r.size = 4 * 256;
    r.tag_base = 0x4000;
    r.buffer_bytes = 256;
    r.counters_enabled = counters;
    cfg.regions = {r};
    cfg.validate();
    return cfg;
}

ShieldStats stats_with(uint64_t aes, uint64_t mac, uint64_t dram_rw, uint64_t chunks,
                       uint64_t bursts) {
    ShieldStats s;
    s.aes_bytes = aes;
    s.mac_bytes = mac;
    s.dram_bytes_read = dram_rw;
    s.chunks_opened = chunks;
    s.bursts = bursts;
    return s;
}

}  // namespace

TEST_CASE("sim dram counts accesses and enforces bounds") {
    SimDram dram(1024);
    dram.write(10, Bytes{1, 2, 3});
    Bytes got = dram.read(10, 3);
    CHECK(got == (Bytes{1, 2, 3}));
    CHECK(dram.read_count() == 1);
    CHECK(dram.write_count() == 1);
    CHECK(dram.bytes_read() == 3);
    CHECK(dram.bytes_written() == 3);
    CHECK_THROWS_AS(dram.read(1023, 2), DramFault);
    CHECK_THROWS_AS(dram.write(1025, Bytes{0}), DramFault);
    // Adversary raw access leaves the counters alone.
    *dram.raw(10, 1) = 9;
    CHECK(dram.read_count() == 1);
    CHECK(dram.read(10, 1)[0] == 9);
}

TEST_CASE("adversary bit flip toggles exactly one bit") {
    SimDram dram(64);
    Adversary adv;
    adv.flip_bit(dram, 5, 3);
    CHECK(dram.contents()[5] == 0x08);
    adv.flip_bit(dram, 5, 3);
    CHECK(dram.contents()[5] == 0x00);
}

TEST_CASE("adversary splice swaps whole records including metadata") {
    shield::ShieldConfig cfg = one_region_config();
    const auto& region = cfg.regions[0];
    SimDram dram(64 * 1024);
    for (uint64_t i = 0; i < 4; ++i) {
        dram.write(region.chunk_data_addr(i), Bytes(region.c_mem, uint8_t(i + 1)));
        dram.write(region.chunk_meta_addr(i), Bytes(shield::kChunkMetaBytes, uint8_t(0x10 + i)));
    }
    Adversary adv;
    adv.splice_chunks(dram, region, 0, 2);
    CHECK(dram.read(region.chunk_data_addr(0), 1)[0] == 3);
    CHECK(dram.read(region.chunk_data_addr(2), 1)[0] == 1);
    CHECK(dram.read(region.chunk_meta_addr(0), 1)[0] == 0x12);
    CHECK(dram.read(region.chunk_meta_addr(2), 1)[0] == 0x10);
    // Chunks 1 and 3 are untouched.
    CHECK(dram.read(region.chunk_data_addr(1), 1)[0] == 2);
    CHECK(dram.read(region.chunk_data_addr(3), 1)[0] == 4);
}

TEST_CASE("adversary snapshot/restore replays an old record byte for byte") {
    shield::ShieldConfig cfg = one_region_config();
    const auto& region = cfg.regions[0];
    SimDram dram(64 * 1024);
    dram.write(region.chunk_data_addr(1), Bytes(region.c_mem, 0xAA));
    dram.write(region.chunk_meta_addr(1), Bytes(shield::kChunkMetaBytes, 0xBB));
    Adversary adv;
    adv.snapshot(dram, region, 1, "s0");
    dram.write(region.chunk_data_addr(1), Bytes(region.c_mem, 0xCC));
    dram.write(region.chunk_meta_addr(1), Bytes(shield::kChunkMetaBytes, 0xDD));
    adv.restore(dram, region, 1, "s0");
    CHECK(dram.read(region.chunk_data_addr(1), 1)[0] == 0xAA);
    CHECK(dram.read(region.chunk_meta_addr(1), 1)[0] == 0xBB);
    CHECK_THROWS_AS(adv.restore(dram, region, 1, "missing"), std::invalid_argument);
}

TEST_CASE("substring counting finds overlapping occurrences and honors extra haystack") {
    Bytes hay = to_bytes("aaa-aaa");
    CHECK(count_occurrences(hay, to_bytes("aa")) == 4);
    CHECK(count_occurrences(hay, to_bytes("zz")) == 0);
    CHECK(count_occurrences(hay, Bytes{}) == 0);
    CHECK(count_occurrences(to_bytes("a"), to_bytes("aa")) == 0);

    shield::ShieldConfig cfg = one_region_config();
    SimDram dram(1024);
    dram.write(100, to_bytes("secret"));
    Adversary adv;
    AdversaryAction scan;
    scan.kind = AdversaryKind::ScanPlaintext;
    scan.needle = to_bytes("secret");
    CHECK(adv.apply(dram, cfg, scan) == 1);
    CHECK(adv.apply(dram, cfg, scan, to_bytes("secret in transcript")) == 2);
}

TEST_CASE("a scan of shield-managed DRAM finds no trace of the plaintext image") {
    shield::ShieldConfig cfg = one_region_config();
    shield::ShieldState shield(cfg, crypto::SymKey::from_bytes(Bytes(32, 7)));
    SimDram dram(64 * 1024);
    Bytes image = crypto::DetRng(99).bytes(cfg.regions[0].size);
    shield.provision_region(dram, 1, image);
    Adversary adv;
    AdversaryAction scan;
    scan.kind = AdversaryKind::ScanPlaintext;
    scan.needle = Bytes(image.begin(), image.begin() + 16);
    CHECK(adv.apply(dram, cfg, scan) == 0);
}

TEST_CASE("iv tracker flags the first repeated (key, iv) pair") {
    IvTracker t;
    crypto::Iv96 iv{};
    t.record("k1", iv);
    CHECK(t.check());
    t.record("k2", iv);  // same IV under another key is fine
    CHECK(t.check());
    iv[11] = 1;
    t.record("k1", iv);
    CHECK(t.check());
    t.record("k1", iv);  // repeat
    CHECK_FALSE(t.check());
    CHECK(t.records() == 4);
    CHECK(t.duplicates() == 1);
}

TEST_CASE("cost model rejects non-positive or inverted parameters") {
    CostModelParams p;
    p.validate();
    SUBCASE("zero rate") {
        p.dram_bytes_per_cycle = 0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("negative fixed cost") {
        p.init_fixed_cycles = -1;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("sbox16 must beat sbox4") {
        p.aes_bytes_per_cycle_sbox16 = p.aes_bytes_per_cycle_sbox4;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
}

TEST_CASE("cost model parameters round-trip through text") {
    CostModelParams p;
    p.aes_bytes_per_cycle_sbox4 = 1.25;
    p.hmac_fixed_cycles_per_chunk = 12.5;
    p.init_fixed_cycles = 151.03125;
    CostModelParams q = CostModelParams::parse(p.serialize());
    CHECK(q.aes_bytes_per_cycle_sbox4 == p.aes_bytes_per_cycle_sbox4);
    CHECK(q.hmac_fixed_cycles_per_chunk == p.hmac_fixed_cycles_per_chunk);
    CHECK(q.init_fixed_cycles == p.init_fixed_cycles);
    CHECK_THROWS_AS(CostModelParams::parse("not a parameter line"), std::invalid_argument);
}

TEST_CASE("cost model is a pure function of its inputs") {
    shield::EngineSetConfig es;
    auto sets = std::vector<EngineSetLoad>{{es, stats_with(4096, 4096, 8192, 8, 8)}};
    ShieldStats reg;
    BaselineStats base{6000, 8};
    CostModelParams p;
    OverheadReport a = model_cycles(sets, reg, p, base);
    OverheadReport b = model_cycles(sets, reg, p, base);
    CHECK(a.secured_cycles == b.secured_cycles);
    CHECK(a.baseline_cycles == b.baseline_cycles);
    CHECK(a.overhead_pct == b.overhead_pct);
    CHECK(a.secured_cycles > a.baseline_cycles);
    CHECK_THROWS_AS(model_cycles(sets, reg, p, BaselineStats{}), std::invalid_argument);
}

TEST_CASE("secured time takes the roofline maximum of dram and crypto time") {
    shield::EngineSetConfig es;  // 1 engine, sbox4, hmac x1
    CostModelParams p;
    p.aes_bytes_per_cycle_sbox4 = 1;
    p.aes_bytes_per_cycle_sbox16 = 4;
    p.hmac_bytes_per_cycle = 1;
    p.hmac_fixed_cycles_per_chunk = 0;
    p.dram_bytes_per_cycle = 16;
    p.burst_fixed_cycles = 0;
    p.init_fixed_cycles = 0;
    ShieldStats reg;
    BaselineStats base{1600, 1};

    // Crypto-bound: 1000 aes/mac bytes at 1 B/cyc dominates 1600/16 = 100 dram cycles.
    auto crypto_bound = model_cycles({{es, stats_with(1000, 1000, 1600, 0, 1)}}, reg, p, base);
    CHECK(crypto_bound.secured_cycles == 1000);
    // DRAM-bound: tiny crypto load, same traffic.
    auto dram_bound = model_cycles({{es, stats_with(16, 16, 1600, 0, 1)}}, reg, p, base);
    CHECK(dram_bound.secured_cycles == 100);
    CHECK(crypto_bound.baseline_cycles == 100);
}

TEST_CASE("aes-256 costs 1.4x the cycles of aes-128 at equal sbox width") {
    shield::EngineSetConfig es128;
    shield::EngineSetConfig es256;
    es256.key_bits = 256;
    CostModelParams p;
    p.hmac_fixed_cycles_per_chunk = 0;
    p.burst_fixed_cycles = 0;
    p.init_fixed_cycles = 0;
    ShieldStats reg;
    BaselineStats base{16, 1};
    ShieldStats load = stats_with(14000, 1, 1, 0, 1);  // aes-dominated
    auto a = model_cycles({{es128, load}}, reg, p, base);
    auto b = model_cycles({{es256, load}}, reg, p, base);
    CHECK(b.secured_cycles == doctest::Approx(a.secured_cycles * 1.4).epsilon(0.001));
}

TEST_CASE("mac engines parallelize pmac but not hmac") {
    CostModelParams p;
    p.hmac_fixed_cycles_per_chunk = 0;
    p.burst_fixed_cycles = 0;
    p.init_fixed_cycles = 0;
    p.pmac_bytes_per_cycle_per_engine = p.hmac_bytes_per_cycle;
    ShieldStats reg;
    BaselineStats base{16, 1};
    ShieldStats load = stats_with(1, 80000, 1, 0, 1);  // mac-dominated

    shield::EngineSetConfig hmac1, hmac4, pmac1, pmac4;
    hmac4.mac_engines = 4;
    pmac1.mac_kind = shield::MacKind::Pmac;
    pmac4.mac_kind = shield::MacKind::Pmac;
    pmac4.mac_engines = 4;

    uint64_t h1 = model_cycles({{hmac1, load}}, reg, p, base).secured_cycles;
    uint64_t h4 = model_cycles({{hmac4, load}}, reg, p, base).secured_cycles;
    uint64_t p1 = model_cycles({{pmac1, load}}, reg, p, base).secured_cycles;
    uint64_t p4 = model_cycles({{pmac4, load}}, reg, p, base).secured_cycles;
    CHECK(h1 == h4);  // serial per chunk: extra engines are wasted
    CHECK(p1 == h1);  // at equal per-engine rate a single pmac engine ties hmac
    CHECK(p4 == doctest::Approx(double(p1) / 4).epsilon(0.001));
}

TEST_CASE("hmac pays a fixed serialization cost per chunk") {
    CostModelParams p;
    p.hmac_fixed_cycles_per_chunk = 50;
    p.burst_fixed_cycles = 0;
    p.init_fixed_cycles = 0;
    ShieldStats reg;
    BaselineStats base{16, 1};
    shield::EngineSetConfig es;
    uint64_t none = model_cycles({{es, stats_with(1, 80000, 1, 0, 1)}}, reg, p, base).secured_cycles;
    uint64_t many = model_cycles({{es, stats_with(1, 80000, 1, 100, 1)}}, reg, p, base).secured_cycles;
    CHECK(many == none + 100 * 50);
}

TEST_CASE("secured cycles grow monotonically with traffic") {
    shield::EngineSetConfig es;
    CostModelParams p;
    ShieldStats reg;
    BaselineStats base{4096, 4};
    uint64_t prev = 0;
    for (uint64_t scale = 1; scale <= 8; scale *= 2) {
        auto rep = model_cycles({{es, stats_with(1024 * scale, 1024 * scale, 2048 * scale, scale,
                                                 scale)}},
                                reg, p, base);
        CHECK(rep.secured_cycles > prev);
        prev = rep.secured_cycles;
    }
}

TEST_CASE("register traffic is charged serially on top of the engine sets") {
    shield::EngineSetConfig es;
    CostModelParams p;
    p.burst_fixed_cycles = 0;
    p.init_fixed_cycles = 0;
    BaselineStats base{16, 1};
    ShieldStats load = stats_with(100, 100, 1600, 0, 1);
    ShieldStats reg;
    uint64_t without = model_cycles({{es, load}}, ShieldStats{}, p, base).secured_cycles;
    reg.aes_bytes = 400;
    reg.mac_bytes = 800;
    uint64_t with = model_cycles({{es, load}}, reg, p, base).secured_cycles;
    CHECK(with == without + 400 / 1 + 800 / 1);
}
