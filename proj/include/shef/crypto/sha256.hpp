#pragma once

#include <array>
#include <cstdint>

#include "shef/bytes.hpp"

namespace shef::crypto {

using Digest32 = std::array<uint8_t, 32>;

class Sha256 {
public:
    Sha256();
    void update(ByteView data);
    Digest32 finish();

private:
    void compress(const uint8_t* block);

    std::array<uint32_t, 8> state_;
    uint64_t total_len_ = 0;
    std::array<uint8_t, 64> buf_{};
    size_t buf_len_ = 0;
};

Digest32 sha256(ByteView data);

// HMAC-SHA-256, full 32-byte output.
Digest32 hmac_sha256(ByteView key, ByteView msg);

}  // namespace shef::crypto
