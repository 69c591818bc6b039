#include "shef/crypto/aead.hpp"

#include <cstring>

namespace shef::crypto {

namespace {

SymKey derive_subkey(const SymKey& key, std::string_view label, size_t len) {
    return SymKey::from_bytes(kdf(key.bytes(), label, len));
}

Tag16 envelope_tag(const SymKey& mac_key, const Iv96& iv, ByteView aad, ByteView ct) {
    Bytes mac_input;
    append_field(mac_input, iv);
    append_field(mac_input, aad);
    append_field(mac_input, ct);
    return mac_hmac(mac_key, mac_input);
}

}  // namespace

Bytes aead_seal(const SymKey& key, const Iv96& iv, ByteView aad, ByteView plaintext) {
    SymKey ke = derive_subkey(key, "aead-enc", 32);
    SymKey km = derive_subkey(key, "aead-mac", 32);
    Bytes ct = ctr_encrypt(ke, iv, 0, plaintext);
    Tag16 tag = envelope_tag(km, iv, aad, ct);
    Bytes out;
    append(out, iv);
    append(out, ct);
    append(out, tag);
    return out;
}

Result<Bytes, IntegrityError> aead_open(const SymKey& key, ByteView aad, ByteView sealed) {
    if (sealed.size() < 12 + 16) return IntegrityError{"envelope too short"};
    Iv96 iv;
    std::memcpy(iv.data(), sealed.data(), 12);
    ByteView ct = sealed.subspan(12, sealed.size() - 12 - 16);
    Tag16 tag;
    std::memcpy(tag.data(), sealed.data() + sealed.size() - 16, 16);

    SymKey ke = derive_subkey(key, "aead-enc", 32);
    SymKey km = derive_subkey(key, "aead-mac", 32);
    Tag16 expect = envelope_tag(km, iv, aad, ct);
    if (!tag_equal(tag, expect)) return IntegrityError{"tag mismatch"};
    return ctr_encrypt(ke, iv, 0, ct);
}

Bytes asym_encrypt(const PublicKey& pub, ByteView msg, DetRng& rng) {
    if (msg.size() > 4096) throw std::invalid_argument("asym_encrypt: msg exceeds 4 KiB");
    KeyPair eph = keypair_gen(rng);
    Digest32 shared = key_exchange(eph, pub);
    SymKey env_key = SymKey::from_bytes(kdf(shared, "hybrid-envelope", 32));
    // Fresh key per message: fixed zero IV is safe here.
    Bytes sealed = aead_seal(env_key, Iv96{}, eph.pub.bytes, msg);
    Bytes out = eph.pub.bytes;
    append(out, sealed);
    return out;
}

Result<Bytes, IntegrityError> asym_decrypt(const KeyPair& own, ByteView ct) {
    if (ct.size() < kGroupElementBytes + 12 + 16) return IntegrityError{"ciphertext too short"};
    PublicKey eph{Bytes(ct.begin(), ct.begin() + kGroupElementBytes)};
    Digest32 shared;
    try {
        shared = key_exchange(own, eph);
    } catch (const GroupError&) {
        return IntegrityError{"invalid ephemeral element"};
    }
    SymKey env_key = SymKey::from_bytes(kdf(shared, "hybrid-envelope", 32));
    return aead_open(env_key, eph.bytes, ct.subspan(kGroupElementBytes));
}

SealedChannel::SealedChannel(const SymKey& key, uint8_t direction)
    : enc_key_(derive_subkey(key, "chan-enc", 32)),
      mac_key_(derive_subkey(key, "chan-mac", 32)),
      direction_(direction) {}

Bytes SealedChannel::seal_next(ByteView payload) {
    uint64_t counter = ++send_counter_;
    Iv96 iv{};
    iv[0] = direction_;
    for (int i = 0; i < 8; ++i) iv[1 + i] = uint8_t(counter >> (8 * (7 - i)));
    Bytes ct = ctr_encrypt(enc_key_, iv, 0, payload);
    Bytes header;
    append_u64be(header, counter);
    Bytes mac_input;
    append_field(mac_input, header);
    append_field(mac_input, ct);
    mac_input.push_back(direction_);
    Tag16 tag = mac_hmac(mac_key_, mac_input);
    Bytes out = header;
    append(out, ct);
    append(out, tag);
    return out;
}

Result<Bytes, IntegrityError> SealedChannel::open_next(ByteView wire) {
    if (wire.size() < 8 + 16) return IntegrityError{"datagram too short"};
    uint64_t counter = read_u64be(wire.data());
    ByteView ct = wire.subspan(8, wire.size() - 8 - 16);
    Tag16 tag;
    std::memcpy(tag.data(), wire.data() + wire.size() - 16, 16);

    Bytes header(wire.begin(), wire.begin() + 8);
    Bytes mac_input;
    append_field(mac_input, header);
    append_field(mac_input, ct);
    mac_input.push_back(direction_);
    Tag16 expect = mac_hmac(mac_key_, mac_input);
    if (!tag_equal(tag, expect)) return IntegrityError{"tag mismatch"};
    if (counter <= last_recv_) return IntegrityError{"stale counter"};
    last_recv_ = counter;

    Iv96 iv{};
    iv[0] = direction_;
    for (int i = 0; i < 8; ++i) iv[1 + i] = uint8_t(counter >> (8 * (7 - i)));
    return ctr_encrypt(enc_key_, iv, 0, ct);
}

}  // namespace shef::crypto
