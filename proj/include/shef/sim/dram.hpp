#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "shef/bytes.hpp"

namespace shef::sim {

struct DramFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Untrusted backing store: a flat byte array with access counters. Raw access
// never fails inside bounds; the adversary may mutate any byte.
class SimDram {
public:
    explicit SimDram(size_t size_bytes = 64 * 1024 * 1024) : bytes_(size_bytes, 0) {}

    Bytes read(uint64_t addr, size_t len) {
        check(addr, len);
        ++read_count_;
        bytes_read_ += len;
        return Bytes(bytes_.begin() + addr, bytes_.begin() + addr + len);
    }

    void write(uint64_t addr, ByteView data) {
        check(addr, data.size());
        ++write_count_;
        bytes_written_ += data.size();
        std::copy(data.begin(), data.end(), bytes_.begin() + addr);
    }

    // Adversary access: no bookkeeping, no shield involvement.
    uint8_t* raw(uint64_t addr, size_t len) {
        check(addr, len);
        return bytes_.data() + addr;
    }
    const std::vector<uint8_t>& contents() const { return bytes_; }

    size_t size() const { return bytes_.size(); }
    uint64_t read_count() const { return read_count_; }
    uint64_t write_count() const { return write_count_; }
    uint64_t bytes_read() const { return bytes_read_; }
    uint64_t bytes_written() const { return bytes_written_; }

private:
    void check(uint64_t addr, size_t len) const {
        if (addr > bytes_.size() || len > bytes_.size() - addr)
            throw DramFault("DRAM access out of bounds");
    }

    std::vector<uint8_t> bytes_;
    uint64_t read_count_ = 0;
    uint64_t write_count_ = 0;
    uint64_t bytes_read_ = 0;
    uint64_t bytes_written_ = 0;
};

struct ShieldStats {
    uint64_t buffer_hits = 0;
    uint64_t buffer_misses = 0;
    uint64_t chunks_sealed = 0;
    uint64_t chunks_opened = 0;
    uint64_t dram_bytes_read = 0;
    uint64_t dram_bytes_written = 0;
    uint64_t mac_bytes = 0;
    uint64_t aes_bytes = 0;
    uint64_t bursts = 0;

    void add(const ShieldStats& o) {
        buffer_hits += o.buffer_hits;
        buffer_misses += o.buffer_misses;
        chunks_sealed += o.chunks_sealed;
        chunks_opened += o.chunks_opened;
        dram_bytes_read += o.dram_bytes_read;
        dram_bytes_written += o.dram_bytes_written;
        mac_bytes += o.mac_bytes;
        aes_bytes += o.aes_bytes;
        bursts += o.bursts;
    }
};

}  // namespace shef::sim
