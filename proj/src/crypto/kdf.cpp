#include "shef/crypto/kdf.hpp"

#include <cstring>

namespace shef::crypto {

Bytes kdf(ByteView ikm, ByteView info, size_t out_len) {
    if (out_len > 255 * 32) throw std::invalid_argument("kdf: out_len exceeds 8160 bytes");
    const uint8_t zero_salt[32] = {};
    Digest32 prk = hmac_sha256(ByteView(zero_salt, 32), ikm);

    Bytes out;
    out.reserve(out_len);
    Bytes t;  // T(i-1)
    uint8_t counter = 1;
    while (out.size() < out_len) {
        Bytes block = t;
        append(block, info);
        block.push_back(counter++);
        Digest32 ti = hmac_sha256(prk, block);
        t.assign(ti.begin(), ti.end());
        size_t take = std::min<size_t>(32, out_len - out.size());
        out.insert(out.end(), t.begin(), t.begin() + take);
    }
    return out;
}

}  // namespace shef::crypto
