#include "shef/harness/presets.hpp"

#include <stdexcept>

#include "shef/crypto/rng.hpp"

namespace shef::harness {

namespace {

using shield::EngineSetConfig;
using shield::MacKind;
using shield::MemoryRegion;
using shield::RegionMode;
using shield::ShieldConfig;

EngineSetConfig engine_set(uint8_t id, uint8_t aes_engines, uint8_t sbox, MacKind mac,
                           uint8_t mac_engines, uint16_t key_bits = 128) {
    EngineSetConfig es;
    es.id = id;
    es.aes_engines = aes_engines;
    es.sbox_parallelism = sbox;
    es.key_bits = key_bits;
    es.mac_kind = mac;
    es.mac_engines = mac_engines;
    return es;
}

MemoryRegion region(std::string name, uint16_t id, uint64_t base, uint64_t size, uint32_t c_mem,
                    uint64_t tag_base, uint32_t buffer_bytes, uint8_t engine_set_id) {
    MemoryRegion r;
    r.name = std::move(name);
    r.region_id = id;
    r.base = base;
    r.size = size;
    r.c_mem = c_mem;
    r.tag_base = tag_base;
    r.buffer_bytes = buffer_bytes;
    r.engine_set_id = engine_set_id;
    return r;
}

}  // namespace

Preset sdp_preset(uint8_t aes_engines, uint8_t sbox, MacKind mac, uint8_t mac_engines) {
    Preset p;
    p.name = "sdp-" + std::to_string(aes_engines) + "e-" + std::to_string(sbox) + "x-" +
             (mac == MacKind::Hmac ? "hmac" : "pmac");
    p.config.engine_sets = {engine_set(0, aes_engines, sbox, mac, mac_engines),
                            engine_set(1, aes_engines, sbox, mac, mac_engines)};
    constexpr uint64_t kChunks = 512;
    constexpr uint32_t kCMem = 4096;
    p.config.regions = {
        region("bank0", 0, 0x0400000, kChunks * kCMem, kCMem, 0x1000000, 16 * 1024, 0),
        region("bank1", 1, 0x0800000, kChunks * kCMem, kCMem, 0x1100000, 16 * 1024, 1),
    };
    p.config.validate();

    // Requests touch 27/32 of each chunk; the engine still fetches whole
    // sealed chunks, so the secured run moves more DRAM bytes than requested.
    constexpr uint32_t kAccess = kCMem * 27 / 32;
    for (const auto& r : p.config.regions) {
        TraceParams tp;
        tp.base = r.base;
        tp.c_mem = r.c_mem;
        tp.chunks = r.chunk_count();
        tp.access_len = kAccess;
        Trace t = gen_trace(TracePattern::STR, tp, 7);
        p.trace.ops.insert(p.trace.ops.end(), t.ops.begin(), t.ops.end());
    }
    return p;
}

Preset vecadd_preset(uint64_t vector_bytes, uint8_t sbox) {
    constexpr uint32_t kCMem = 512;
    if (vector_bytes == 0 || vector_bytes % kCMem != 0)
        throw std::invalid_argument("vecadd: vector length must be a positive multiple of 512");
    Preset p;
    p.name = "vecadd-" + std::to_string(sbox) + "x";
    p.config.engine_sets = {engine_set(0, 4, sbox, MacKind::Pmac, 8)};
    uint64_t chunks = vector_bytes / kCMem;
    // a, b inputs and c output laid out back to back.
    p.config.regions = {
        region("vectors", 0, 0x0400000, 3 * vector_bytes, kCMem, 0x2000000, 8 * 1024, 0)};
    p.config.validate();

    uint64_t a = p.config.regions[0].base;
    uint64_t b = a + vector_bytes;
    uint64_t c = b + vector_bytes;
    crypto::DetRng rng(11);
    for (uint64_t i = 0; i < chunks; ++i) {
        p.trace.ops.push_back(TraceOp{TraceOpKind::Read, a + i * kCMem, kCMem});
        p.trace.ops.push_back(TraceOp{TraceOpKind::Read, b + i * kCMem, kCMem});
        p.trace.ops.push_back(TraceOp{TraceOpKind::Write, c + i * kCMem, kCMem, rng.u64()});
    }
    return p;
}

Preset dnnweaver_preset(bool pmac_weights) {
    Preset p;
    p.name = pmac_weights ? "dnn-pmac" : "dnn-hmac";
    p.config.engine_sets = {
        pmac_weights ? engine_set(0, 4, 16, MacKind::Pmac, 4)
                     : engine_set(0, 4, 16, MacKind::Hmac, 1),
        engine_set(1, 2, 16, MacKind::Hmac, 1),
    };
    constexpr uint64_t kWeightChunks = 512;  // 2 MiB of weights in 4 KiB chunks
    constexpr uint64_t kFmBytes = 128 * 1024;
    shield::MemoryRegion fm = region("fmaps", 1, 0x1000000, kFmBytes, 64, 0x3200000, 16 * 1024, 1);
    fm.counters_enabled = true;
    fm.counter_bits = 16;
    p.config.regions = {
        region("weights", 0, 0x0400000, kWeightChunks * 4096, 4096, 0x3000000, 128 * 1024, 0),
        fm,
    };
    p.config.validate();

    TraceParams w;
    w.base = p.config.regions[0].base;
    w.c_mem = 4096;
    w.chunks = kWeightChunks;
    Trace tw = gen_trace(TracePattern::STR, w, 13);

    TraceParams f;
    f.base = fm.base;
    f.c_mem = 64;
    f.access_len = 64;
    f.working_set = kFmBytes;
    f.ops = 16384;  // read-modify-write pairs
    Trace tf = gen_trace(TracePattern::RMW, f, 17);

    // Interleave: weights stream ahead of bursts of feature-map updates.
    size_t wi = 0, fi = 0;
    while (wi < tw.ops.size() || fi < tf.ops.size()) {
        if (wi < tw.ops.size()) p.trace.ops.push_back(tw.ops[wi++]);
        for (int k = 0; k < 64 && fi < tf.ops.size(); ++k) p.trace.ops.push_back(tf.ops[fi++]);
    }
    return p;
}

Preset conv_preset() {
    Preset p;
    p.name = "conv";
    p.config.engine_sets = {engine_set(0, 4, 16, MacKind::Hmac, 1)};
    p.config.regions = {region("acts", 0, 0x0400000, 128 * 4096, 4096, 0x2000000, 16 * 1024, 0)};
    p.config.validate();
    TraceParams tp;
    tp.base = p.config.regions[0].base;
    tp.c_mem = 4096;
    tp.chunks = 128;
    p.trace = gen_trace(TracePattern::STR, tp, 19);
    TraceParams wr = tp;
    wr.chunks = 64;
    wr.writes = true;
    Trace t2 = gen_trace(TracePattern::STR, wr, 23);
    p.trace.ops.insert(p.trace.ops.end(), t2.ops.begin(), t2.ops.end());
    return p;
}

Preset digit_preset() {
    Preset p;
    p.name = "digit";
    p.config.engine_sets = {engine_set(0, 2, 4, MacKind::Hmac, 1)};
    p.config.regions = {region("digits", 0, 0x0400000, 256 * 256, 256, 0x2000000, 4 * 1024, 0)};
    p.config.validate();
    TraceParams tp;
    tp.base = p.config.regions[0].base;
    tp.c_mem = 256;
    tp.chunks = 256;
    p.trace = gen_trace(TracePattern::STR, tp, 29);
    return p;
}

Preset affine_preset() {
    Preset p;
    p.name = "affine";
    p.config.engine_sets = {engine_set(0, 2, 16, MacKind::Hmac, 1)};
    // Working set (8 KiB) fits in the 16 KiB buffer: steady state runs on-chip.
    p.config.regions = {region("table", 0, 0x0400000, 64 * 1024, 64, 0x2000000, 16 * 1024, 0)};
    p.config.validate();
    TraceParams tp;
    tp.base = p.config.regions[0].base;
    tp.c_mem = 64;
    tp.access_len = 64;
    tp.working_set = 8 * 1024;
    tp.ops = 2000;
    p.trace = gen_trace(TracePattern::RA, tp, 31);
    return p;
}

Preset bitcoin_preset() {
    Preset p;
    p.name = "bitcoin";
    p.config.engine_sets = {engine_set(0, 1, 4, MacKind::Hmac, 1)};
    p.config.register_count = 8;
    // A region must exist for the layout to validate; the trace never touches it.
    p.config.regions = {region("scratch", 0, 0x0400000, 4096, 4096, 0x2000000, 0, 0)};
    p.config.validate();
    TraceParams tp;
    tp.c_mem = 1;  // unused by REG
    tp.chunks = 8;
    tp.ops = 64;
    p.trace = gen_trace(TracePattern::REG, tp, 37);
    return p;
}

std::vector<std::string> preset_names() {
    return {"conv", "digit", "affine", "bitcoin", "vecadd", "dnn-hmac", "dnn-pmac", "sdp"};
}

Preset preset_by_name(const std::string& name) {
    if (name == "conv") return conv_preset();
    if (name == "digit") return digit_preset();
    if (name == "affine") return affine_preset();
    if (name == "bitcoin") return bitcoin_preset();
    if (name == "vecadd") return vecadd_preset(1 << 20, 16);
    if (name == "dnn-hmac") return dnnweaver_preset(false);
    if (name == "dnn-pmac") return dnnweaver_preset(true);
    if (name == "sdp") return sdp_preset(8, 16, MacKind::Pmac, 8);
    throw std::invalid_argument("unknown preset: " + name);
}

}  // namespace shef::harness
