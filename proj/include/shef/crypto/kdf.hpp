#pragma once

#include "shef/crypto/sha256.hpp"

namespace shef::crypto {

// HKDF-SHA-256 (extract with zero salt, then expand with the info label).
// out_len is capped at 255 * 32 = 8160 bytes.
Bytes kdf(ByteView ikm, ByteView info, size_t out_len);

inline Bytes kdf(ByteView ikm, std::string_view info, size_t out_len) {
    return kdf(ikm, ByteView(reinterpret_cast<const uint8_t*>(info.data()), info.size()),
               out_len);
}

}  // namespace shef::crypto
