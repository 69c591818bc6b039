#include "shef/shield/config.hpp"

#include <algorithm>

namespace shef::shield {

const EngineSetConfig& ShieldConfig::engine_set(uint8_t id) const {
    for (const auto& es : engine_sets)
        if (es.id == id) return es;
    throw ConfigError("unknown engine set id " + std::to_string(int(id)));
}

const MemoryRegion* ShieldConfig::region_by_id(uint16_t region_id) const {
    for (const auto& r : regions)
        if (r.region_id == region_id) return &r;
    return nullptr;
}

void ShieldConfig::validate() const {
    if (register_count < 1) throw ConfigError("register_count must be >= 1");
    for (const auto& es : engine_sets) {
        if (es.aes_engines < 1) throw ConfigError("engine set: aes_engines must be >= 1");
        if (es.mac_engines < 1) throw ConfigError("engine set: mac_engines must be >= 1");
        if (es.sbox_parallelism != 4 && es.sbox_parallelism != 16)
            throw ConfigError("engine set: sbox parallelism must be 4 or 16");
        if (es.key_bits != 128 && es.key_bits != 256)
            throw ConfigError("engine set: key_bits must be 128 or 256");
    }

    std::vector<std::pair<uint64_t, uint64_t>> ranges;  // [start, end)
    std::vector<uint16_t> ids;
    for (const auto& r : regions) {
        if (r.c_mem == 0) throw ConfigError("region " + r.name + ": c_mem must be nonzero");
        if (r.size == 0 || r.size % r.c_mem != 0)
            throw ConfigError("region " + r.name + ": size must be a nonzero multiple of c_mem");
        if (std::find(ids.begin(), ids.end(), r.region_id) != ids.end())
            throw ConfigError("region " + r.name + ": duplicate region id");
        ids.push_back(r.region_id);
        engine_set(r.engine_set_id);  // throws on dangling reference
        if (r.counter_bits == 0 || r.counter_bits > 64)
            throw ConfigError("region " + r.name + ": counter_bits must be in [1,64]");
        ranges.emplace_back(r.base, r.base + r.size);
        ranges.emplace_back(r.tag_base, r.tag_base + r.meta_size());
    }
    std::sort(ranges.begin(), ranges.end());
    for (size_t i = 1; i < ranges.size(); ++i)
        if (ranges[i].first < ranges[i - 1].second)
            throw ConfigError("overlapping data/metadata ranges");
}

}  // namespace shef::shield
