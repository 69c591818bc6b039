#pragma once

#include "shef/crypto/aes.hpp"
#include "shef/crypto/group.hpp"
#include "shef/crypto/kdf.hpp"
#include "shef/crypto/mac.hpp"
#include "shef/crypto/rng.hpp"

namespace shef::crypto {

struct IntegrityError {
    std::string what;
};

// Encrypt-then-MAC envelope: subkeys derived from `key` per label, ciphertext
// CTR-encrypted under the given IV, tag over iv || aad || ciphertext.
// Wire form: iv(12) || ciphertext || tag(16).
Bytes aead_seal(const SymKey& key, const Iv96& iv, ByteView aad, ByteView plaintext);
Result<Bytes, IntegrityError> aead_open(const SymKey& key, ByteView aad, ByteView sealed);

// Hybrid public-key envelope: ephemeral DH + KDF + CTR + HMAC.
// Wire form: ephemeral_pub(192) || ciphertext || tag(16). msg up to 4 KiB.
Bytes asym_encrypt(const PublicKey& pub, ByteView msg, DetRng& rng);
Result<Bytes, IntegrityError> asym_decrypt(const KeyPair& own, ByteView ct);

// Counter-sealed datagrams for session traffic and the register interface.
// Wire form: counter(8 BE) || ciphertext || tag(16). The IV binds direction
// and counter so each (key, direction, counter) triple seals at most once.
class SealedChannel {
public:
    SealedChannel(const SymKey& key, uint8_t direction);

    Bytes seal_next(ByteView payload);
    // Accepts only counters strictly greater than any previously accepted one.
    Result<Bytes, IntegrityError> open_next(ByteView wire);

    uint64_t send_counter() const { return send_counter_; }

private:
    SymKey enc_key_;
    SymKey mac_key_;
    uint8_t direction_;
    uint64_t send_counter_ = 0;
    uint64_t last_recv_ = 0;  // 0 = none consumed; counters start at 1
};

}  // namespace shef::crypto
