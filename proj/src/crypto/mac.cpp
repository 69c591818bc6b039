#include "shef/crypto/mac.hpp"

#include <cstring>

namespace shef::crypto {

Tag16 mac_hmac(const SymKey& key, ByteView msg) {
    Digest32 full = hmac_sha256(key.bytes(), msg);
    Tag16 tag;
    std::memcpy(tag.data(), full.data(), 16);
    return tag;
}

namespace {

void domain_block(uint8_t out[16], uint8_t domain, uint64_t v) {
    std::memset(out, 0, 16);
    out[0] = domain;
    for (int i = 0; i < 8; ++i) out[8 + i] = uint8_t(v >> (8 * (7 - i)));
}

}  // namespace

PmacAccumulator::PmacAccumulator(const SymKey& key) : aes_(key) {}

void PmacAccumulator::process_blocks(uint64_t first_block_index, ByteView blocks) {
    if (blocks.size() % 16 != 0)
        throw std::invalid_argument("PmacAccumulator: needs whole 16-byte blocks");
    uint8_t off[16], tmp[16], enc[16];
    for (size_t b = 0; b < blocks.size() / 16; ++b) {
        domain_block(off, 0x01, first_block_index + b);
        aes_.encrypt_block(off, tmp);
        for (int i = 0; i < 16; ++i) tmp[i] ^= blocks[16 * b + i];
        aes_.encrypt_block(tmp, enc);
        for (int i = 0; i < 16; ++i) acc_[i] ^= enc[i];
    }
}

void PmacAccumulator::combine(const PmacAccumulator& other) {
    for (int i = 0; i < 16; ++i) acc_[i] ^= other.acc_[i];
}

Tag16 PmacAccumulator::finalize(uint64_t msg_len) const {
    uint8_t lb[16], lenc[16], pre[16];
    domain_block(lb, 0x02, msg_len);
    aes_.encrypt_block(lb, lenc);
    for (int i = 0; i < 16; ++i) pre[i] = uint8_t(acc_[i] ^ lenc[i]);
    Tag16 tag;
    aes_.encrypt_block(pre, tag.data());
    return tag;
}

Tag16 mac_pmac(const SymKey& key, ByteView msg) {
    PmacAccumulator acc(key);
    size_t full = (msg.size() / 16) * 16;
    acc.process_blocks(0, msg.subspan(0, full));
    if (full < msg.size()) {
        uint8_t last[16] = {};
        std::memcpy(last, msg.data() + full, msg.size() - full);
        last[msg.size() - full] = 0x80;
        acc.process_blocks(full / 16, ByteView(last, 16));
    }
    return acc.finalize(msg.size());
}

bool tag_equal(const Tag16& a, const Tag16& b) {
    uint8_t diff = 0;
    for (int i = 0; i < 16; ++i) diff |= uint8_t(a[i] ^ b[i]);
    return diff == 0;
}

}  // namespace shef::crypto
