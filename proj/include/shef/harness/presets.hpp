#pragma once

#include <string>
#include <vector>

#include "shef/harness/trace.hpp"
#include "shef/shield/config.hpp"

namespace shef::harness {

// A ready-to-run workload: a Shield configuration plus the memory/register
// trace an accelerator with that layout would issue.
struct Preset {
    std::string name;
    shield::ShieldConfig config;
    Trace trace;
};

// Two identical engine sets with 16 KiB buffers over 4 KiB chunks; the trace
// streams partial-chunk reads so DRAM traffic is amplified by full-chunk
// fetches. The five bundled design points vary engines / S-box width / MAC.
Preset sdp_preset(uint8_t aes_engines, uint8_t sbox, shield::MacKind mac, uint8_t mac_engines);

// Streaming a + b = c over 512-byte chunks; sbox selects the AES datapath.
Preset vecadd_preset(uint64_t vector_bytes, uint8_t sbox);

// Streamed 4 KiB weight chunks plus random-access 64-byte feature-map chunks
// with replay counters. pmac_weights swaps the weight region's MAC engine.
Preset dnnweaver_preset(bool pmac_weights);

Preset conv_preset();     // batched streaming over large chunks
Preset digit_preset();    // streaming over small chunks
Preset affine_preset();   // random 64-byte accesses
Preset bitcoin_preset();  // register-only ping-pong

std::vector<std::string> preset_names();
Preset preset_by_name(const std::string& name);

}  // namespace shef::harness
