#pragma once

#include "shef/crypto/sha256.hpp"

namespace shef::crypto {

// Deterministic byte stream: block i is SHA-256(seed || be64(i)). All
// randomness in the simulator flows through instances of this, so every
// scenario replays bit-identically from its seed.
class DetRng {
public:
    explicit DetRng(ByteView seed) : seed_(seed.begin(), seed.end()) {}
    explicit DetRng(uint64_t seed) {
        append_u64be(seed_, seed);
    }

    Bytes bytes(size_t n) {
        Bytes out;
        out.reserve(n);
        while (out.size() < n) {
            if (pos_ == 32) refill();
            size_t take = std::min(n - out.size(), size_t(32) - pos_);
            out.insert(out.end(), block_.begin() + pos_, block_.begin() + pos_ + take);
            pos_ += take;
        }
        return out;
    }

    std::array<uint8_t, 32> seed32() {
        Bytes b = bytes(32);
        std::array<uint8_t, 32> out;
        std::copy(b.begin(), b.end(), out.begin());
        return out;
    }

    uint64_t u64() {
        Bytes b = bytes(8);
        return read_u64be(b.data());
    }

    // Child generator with an independent stream.
    DetRng fork(std::string_view label) {
        Bytes s = seed_;
        append(s, ByteView(reinterpret_cast<const uint8_t*>(label.data()), label.size()));
        append(s, bytes(8));
        return DetRng(ByteView(s));
    }

private:
    void refill() {
        Bytes input = seed_;
        append_u64be(input, counter_++);
        block_ = sha256(input);
        pos_ = 0;
    }

    Bytes seed_;
    uint64_t counter_ = 0;
    Digest32 block_{};
    size_t pos_ = 32;
};

}  // namespace shef::crypto
