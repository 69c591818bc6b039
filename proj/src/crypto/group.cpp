#include "shef/crypto/group.hpp"

#include <gmpxx.h>

#include "shef/crypto/kdf.hpp"

namespace shef::crypto {

namespace {

// RFC 3526 group 5: 1536-bit MODP safe prime.
const char* kPrimeHex =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA237327FFFFFFFFFFFFFFFF";

struct GroupCtx {
    mpz_class p;
    mpz_class q;  // (p-1)/2, prime
    mpz_class g;  // 4, generator of the order-q subgroup

    GroupCtx() {
        p.set_str(kPrimeHex, 16);
        q = (p - 1) / 2;
        g = 4;
    }
};

const GroupCtx& ctx() {
    static const GroupCtx c;
    return c;
}

mpz_class from_be(ByteView b) {
    mpz_class v;
    mpz_import(v.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
    return v;
}

Bytes to_be192(const mpz_class& v) {
    Bytes out(kGroupElementBytes, 0);
    size_t count = 0;
    mpz_export(nullptr, &count, 1, 1, 1, 0, v.get_mpz_t());
    if (count > kGroupElementBytes) throw GroupError("element exceeds 192 bytes");
    mpz_export(out.data() + (kGroupElementBytes - count), &count, 1, 1, 1, 0, v.get_mpz_t());
    return out;
}

mpz_class powm(const mpz_class& base, const mpz_class& exp) {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), ctx().p.get_mpz_t());
    return r;
}

// Expand arbitrary input material to a nonzero scalar mod q.
mpz_class scalar_from_material(ByteView material, std::string_view label) {
    for (uint8_t attempt = 0;; ++attempt) {
        Bytes input(material.begin(), material.end());
        input.push_back(attempt);
        Bytes wide = kdf(input, label, kGroupElementBytes);
        mpz_class s = from_be(wide) % ctx().q;
        if (s != 0) return s;
    }
}

void check_peer_element(const mpz_class& e) {
    if (e <= 1 || e >= ctx().p - 1) throw GroupError("invalid group element");
}

}  // namespace

KeyPair keypair_from_seed(const std::array<uint8_t, 32>& seed) {
    mpz_class x = scalar_from_material(seed, "shef-keygen");
    KeyPair kp;
    kp.priv = to_be192(x);
    kp.pub.bytes = to_be192(powm(ctx().g, x));
    return kp;
}

Signature sign(const KeyPair& signer, ByteView msg) {
    mpz_class x = from_be(signer.priv);
    // Deterministic nonce from (priv, H(msg)).
    Digest32 mh = sha256(msg);
    Bytes material = signer.priv;
    append(material, mh);
    mpz_class k = scalar_from_material(material, "shef-nonce");
    mpz_class r_elem = powm(ctx().g, k);

    Bytes challenge_input;
    append_field(challenge_input, to_be192(r_elem));
    append_field(challenge_input, signer.pub.bytes);
    append_field(challenge_input, msg);
    Digest32 e = sha256(challenge_input);
    mpz_class e_int = from_be(e) % ctx().q;

    mpz_class s = (k + e_int * x) % ctx().q;

    Signature sig;
    sig.bytes.assign(e.begin(), e.end());
    append(sig.bytes, to_be192(s));
    return sig;
}

bool verify(const PublicKey& pub, ByteView msg, const Signature& sig) {
    if (sig.bytes.size() != kSignatureBytes) return false;
    if (pub.bytes.size() != kGroupElementBytes) return false;
    mpz_class y = from_be(pub.bytes);
    if (y <= 1 || y >= ctx().p - 1) return false;

    Digest32 e;
    std::copy(sig.bytes.begin(), sig.bytes.begin() + 32, e.begin());
    mpz_class e_int = from_be(e) % ctx().q;
    mpz_class s = from_be(ByteView(sig.bytes.data() + 32, kGroupElementBytes));
    if (s >= ctx().q) return false;

    // R' = g^s * y^(q - e) mod p  (y has order q)
    mpz_class r_elem = (powm(ctx().g, s) * powm(y, ctx().q - e_int)) % ctx().p;

    Bytes challenge_input;
    append_field(challenge_input, to_be192(r_elem));
    append_field(challenge_input, pub.bytes);
    append_field(challenge_input, msg);
    Digest32 e2 = sha256(challenge_input);
    return e == e2;
}

Digest32 key_exchange(const KeyPair& own, const PublicKey& peer) {
    if (peer.bytes.size() != kGroupElementBytes) throw GroupError("bad element size");
    mpz_class y = from_be(peer.bytes);
    check_peer_element(y);
    mpz_class x = from_be(own.priv);
    mpz_class shared = powm(y, x);
    if (shared == 1) throw GroupError("degenerate shared element");
    return sha256(to_be192(shared));
}

}  // namespace shef::crypto
