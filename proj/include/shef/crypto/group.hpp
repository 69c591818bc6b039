#pragma once

#include <stdexcept>

#include "shef/bytes.hpp"
#include "shef/crypto/rng.hpp"
#include "shef/crypto/sha256.hpp"

namespace shef::crypto {

// Schnorr-style signatures and Diffie-Hellman over the prime-order subgroup of
// quadratic residues of a 1536-bit safe prime (RFC 3526 group 5), generator 4.
// Elements and scalars serialize as 192-byte big-endian strings.

constexpr size_t kGroupElementBytes = 192;
constexpr size_t kSignatureBytes = 32 + kGroupElementBytes;  // e || s

struct PublicKey {
    Bytes bytes;  // 192-byte group element
    bool operator==(const PublicKey&) const = default;
};

struct Signature {
    Bytes bytes;  // 32-byte challenge digest || 192-byte response scalar
    bool operator==(const Signature&) const = default;
};

struct KeyPair {
    Bytes priv;  // 192-byte scalar mod q, big-endian
    PublicKey pub;
};

struct GroupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic: the seed is expanded to a nonzero scalar mod q.
KeyPair keypair_from_seed(const std::array<uint8_t, 32>& seed);

inline KeyPair keypair_gen(DetRng& rng) { return keypair_from_seed(rng.seed32()); }

// Deterministic Schnorr signature: nonce derived from (priv, msg).
Signature sign(const KeyPair& signer, ByteView msg);
bool verify(const PublicKey& pub, ByteView msg, const Signature& sig);

// DH: shared secret = SHA-256 of the 192-byte shared element.
// Throws GroupError on identity or out-of-range peer elements.
Digest32 key_exchange(const KeyPair& own, const PublicKey& peer);

}  // namespace shef::crypto
