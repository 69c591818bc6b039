#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include "shef/bytes.hpp"

namespace shef::crypto {

class SymKey {
public:
    static SymKey from_bytes(ByteView b) {
        if (b.size() != 16 && b.size() != 32)
            throw std::invalid_argument("SymKey: length must be 16 or 32 bytes");
        SymKey k;
        k.bytes_.assign(b.begin(), b.end());
        return k;
    }

    const Bytes& bytes() const { return bytes_; }
    unsigned bits() const { return unsigned(bytes_.size()) * 8; }
    bool operator==(const SymKey& o) const { return bytes_ == o.bytes_; }

private:
    Bytes bytes_;
};

using Iv96 = std::array<uint8_t, 12>;
using Tag16 = std::array<uint8_t, 16>;

// AES-128/256 block encryption (encrypt direction only; CTR and PMAC need no inverse).
class AesBlock {
public:
    explicit AesBlock(const SymKey& key);
    void encrypt_block(const uint8_t in[16], uint8_t out[16]) const;

private:
    std::array<uint32_t, 60> round_keys_{};
    int rounds_;
};

struct CtrOverflowError : std::runtime_error {
    CtrOverflowError() : std::runtime_error("CTR block counter overflow") {}
};

// AES-CTR keystream XOR. The low 4 IV-extension bytes are a big-endian block
// counter starting at block_offset; exceeding 2^32 blocks raises CtrOverflowError.
// Involution: applying twice with identical arguments returns the input.
Bytes ctr_encrypt(const SymKey& key, const Iv96& iv, uint32_t block_offset, ByteView data);

}  // namespace shef::crypto
