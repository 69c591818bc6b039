#pragma once

#include "shef/crypto/aes.hpp"
#include "shef/crypto/sha256.hpp"

namespace shef::crypto {

// HMAC-SHA-256 truncated to the leading 16 bytes.
Tag16 mac_hmac(const SymKey& key, ByteView msg);

// Parallelizable AES-based MAC. The message is cut into 16-byte blocks (last
// block 0x80-padded); block i contributes E_k(M_i xor E_k(offset_block(i)))
// and contributions combine by XOR, so disjoint block ranges can be processed
// by independent engines in any order. The tag binds the message length.
class PmacAccumulator {
public:
    explicit PmacAccumulator(const SymKey& key);

    // Absorb whole 16-byte blocks starting at absolute block index.
    void process_blocks(uint64_t first_block_index, ByteView blocks);
    void combine(const PmacAccumulator& other);
    Tag16 finalize(uint64_t msg_len) const;

private:
    AesBlock aes_;
    std::array<uint8_t, 16> acc_{};
};

Tag16 mac_pmac(const SymKey& key, ByteView msg);

// Constant-shape tag comparison.
bool tag_equal(const Tag16& a, const Tag16& b);

}  // namespace shef::crypto
