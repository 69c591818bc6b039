#include "shef/sim/adversary.hpp"

#include <algorithm>
#include <cstring>

namespace shef::sim {

namespace {

Bytes read_record(SimDram& dram, const shield::MemoryRegion& region, uint64_t i) {
    Bytes rec(region.c_mem + shield::kChunkMetaBytes);
    std::memcpy(rec.data(), dram.raw(region.chunk_data_addr(i), region.c_mem), region.c_mem);
    std::memcpy(rec.data() + region.c_mem, dram.raw(region.chunk_meta_addr(i), shield::kChunkMetaBytes),
                shield::kChunkMetaBytes);
    return rec;
}

void write_record(SimDram& dram, const shield::MemoryRegion& region, uint64_t i, ByteView rec) {
    std::memcpy(dram.raw(region.chunk_data_addr(i), region.c_mem), rec.data(), region.c_mem);
    std::memcpy(dram.raw(region.chunk_meta_addr(i), shield::kChunkMetaBytes),
                rec.data() + region.c_mem, shield::kChunkMetaBytes);
}

}  // namespace

void Adversary::flip_bit(SimDram& dram, uint64_t addr, unsigned bit) {
    *dram.raw(addr, 1) ^= uint8_t(1u << (bit % 8));
}

void Adversary::splice_chunks(SimDram& dram, const shield::MemoryRegion& region, uint64_t i,
                              uint64_t j) {
    Bytes ri = read_record(dram, region, i);
    Bytes rj = read_record(dram, region, j);
    write_record(dram, region, i, rj);
    write_record(dram, region, j, ri);
}

void Adversary::snapshot(SimDram& dram, const shield::MemoryRegion& region, uint64_t i,
                         const std::string& slot) {
    slots_[slot] = read_record(dram, region, i);
}

void Adversary::restore(SimDram& dram, const shield::MemoryRegion& region, uint64_t i,
                        const std::string& slot) {
    auto it = slots_.find(slot);
    if (it == slots_.end()) throw std::invalid_argument("unknown snapshot slot: " + slot);
    if (it->second.size() != region.c_mem + shield::kChunkMetaBytes)
        throw std::invalid_argument("snapshot slot size mismatch");
    write_record(dram, region, i, it->second);
}

uint64_t count_occurrences(ByteView haystack, ByteView needle) {
    if (needle.empty() || haystack.size() < needle.size()) return 0;
    uint64_t hits = 0;
    auto it = haystack.begin();
    while (true) {
        it = std::search(it, haystack.end(), needle.begin(), needle.end());
        if (it == haystack.end()) break;
        ++hits;
        ++it;
    }
    return hits;
}

uint64_t Adversary::apply(SimDram& dram, const shield::ShieldConfig& cfg,
                          const AdversaryAction& action, ByteView extra_haystack) {
    auto region_of = [&](uint16_t id) -> const shield::MemoryRegion& {
        const auto* r = cfg.region_by_id(id);
        if (!r) throw std::invalid_argument("adversary: unknown region id");
        return *r;
    };
    switch (action.kind) {
        case AdversaryKind::FlipBit:
            flip_bit(dram, action.addr, action.bit);
            return 0;
        case AdversaryKind::SpliceChunks:
            splice_chunks(dram, region_of(action.region_id), action.chunk_i, action.chunk_j);
            return 0;
        case AdversaryKind::Snapshot:
            snapshot(dram, region_of(action.region_id), action.chunk_i, action.slot);
            return 0;
        case AdversaryKind::Restore:
            restore(dram, region_of(action.region_id), action.chunk_i, action.slot);
            return 0;
        case AdversaryKind::ScanPlaintext:
            return count_occurrences(dram.contents(), action.needle) +
                   count_occurrences(extra_haystack, action.needle);
    }
    return 0;
}

}  // namespace shef::sim
