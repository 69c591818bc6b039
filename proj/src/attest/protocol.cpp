#include "shef/attest/protocol.hpp"

#include <cstring>

#include "shef/crypto/kdf.hpp"

namespace shef::attest {

namespace {

// Cursor over length-prefixed fields.
struct FieldReader {
    ByteView data;
    size_t pos = 0;

    std::optional<Bytes> next() {
        if (pos + 4 > data.size()) return std::nullopt;
        uint32_t len = read_u32be(data.data() + pos);
        pos += 4;
        if (pos + len > data.size()) return std::nullopt;
        Bytes out(data.begin() + pos, data.begin() + pos + len);
        pos += len;
        return out;
    }

    bool done() const { return pos == data.size(); }
};

std::optional<Digest32> to_digest(const Bytes& b) {
    if (b.size() != 32) return std::nullopt;
    Digest32 d;
    std::copy(b.begin(), b.end(), d.begin());
    return d;
}

SymKey derive_session_key(const Digest32& shared) {
    return SymKey::from_bytes(crypto::kdf(shared, "session", 32));
}

// Transcript binding signed as sigma_session: hash(challenge || attest_pub || verif_pub).
Bytes session_binding(const Challenge& ch, const PublicKey& attest_pub) {
    Bytes input;
    append_field(input, ch.canonical());
    append_field(input, attest_pub.bytes);
    append_field(input, ch.verif_public.bytes);
    Digest32 h = crypto::sha256(input);
    return Bytes(h.begin(), h.end());
}

}  // namespace

Bytes Challenge::canonical() const {
    Bytes out;
    append_field(out, nonce);
    append_field(out, verif_public.bytes);
    return out;
}

std::optional<Challenge> Challenge::parse(ByteView body) {
    FieldReader r{body};
    auto nonce = r.next();
    auto pub = r.next();
    if (!nonce || !pub || !r.done() || nonce->size() != 32) return std::nullopt;
    return Challenge{*nonce, PublicKey{*pub}};
}

Bytes AttestationReport::canonical() const {
    Bytes out;
    append_field(out, nonce);
    append_field(out, enc_bitstream_hash);
    append_field(out, attest_public.bytes);
    append_field(out, kernel_hash);
    append_field(out, sigma_seckrnl.bytes);
    return out;
}

Bytes ReportMessage::encode() const {
    Bytes out;
    append_field(out, report.canonical());
    append_field(out, sigma_alpha.bytes);
    append_field(out, sigma_session.bytes);
    return out;
}

std::optional<ReportMessage> ReportMessage::parse(ByteView body) {
    FieldReader outer{body};
    auto rep = outer.next();
    auto sa = outer.next();
    auto ss = outer.next();
    if (!rep || !sa || !ss || !outer.done()) return std::nullopt;

    FieldReader r{*rep};
    auto nonce = r.next();
    auto bsh = r.next();
    auto apub = r.next();
    auto khash = r.next();
    auto sk = r.next();
    if (!nonce || !bsh || !apub || !khash || !sk || !r.done()) return std::nullopt;
    auto bsh_d = to_digest(*bsh);
    auto khash_d = to_digest(*khash);
    if (!bsh_d || !khash_d) return std::nullopt;

    ReportMessage msg;
    msg.report.nonce = *nonce;
    msg.report.enc_bitstream_hash = *bsh_d;
    msg.report.attest_public = PublicKey{*apub};
    msg.report.kernel_hash = *khash_d;
    msg.report.sigma_seckrnl = Signature{*sk};
    msg.sigma_alpha = Signature{*sa};
    msg.sigma_session = Signature{*ss};
    return msg;
}

Session::Session(const SymKey& session_key, Peer p)
    : key(session_key),
      peer(p),
      tx(session_key, p == Peer::Kernel ? kDirVendorToKernel : kDirKernelToVendor),
      rx(session_key, p == Peer::Kernel ? kDirKernelToVendor : kDirVendorToKernel) {}

Digest32 EncryptedBitstream::hash() const { return crypto::sha256(ciphertext); }

const char* verify_error_name(VerifyError e) {
    switch (e) {
        case VerifyError::BadDeviceCert: return "BadDeviceCert";
        case VerifyError::UnknownKernel: return "UnknownKernel";
        case VerifyError::BadReportSig: return "BadReportSig";
        case VerifyError::NonceMismatch: return "NonceMismatch";
        case VerifyError::BitstreamMismatch: return "BitstreamMismatch";
        case VerifyError::BadSessionCert: return "BadSessionCert";
    }
    return "?";
}

EncryptedBitstream vendor_package_bitstream(const SymKey& bitstr_key, ByteView descriptor,
                                            const KeyPair& shield_enc_keypair,
                                            std::string_view shield_config_text,
                                            crypto::DetRng& rng) {
    Bytes payload;
    append_field(payload, descriptor);
    append_field(payload, shield_enc_keypair.priv);
    append_field(payload, shield_enc_keypair.pub.bytes);
    append_field(payload, to_bytes(shield_config_text));

    crypto::Iv96 iv{};
    Bytes ivb = rng.bytes(12);
    std::copy(ivb.begin(), ivb.end(), iv.begin());
    return EncryptedBitstream{crypto::aead_seal(bitstr_key, iv, to_bytes("bitstream"), payload)};
}

Challenge vendor_begin(Vendor& vendor, crypto::DetRng& rng) {
    vendor.nonce = rng.bytes(32);
    vendor.verif_keypair = crypto::keypair_gen(rng);
    return Challenge{vendor.nonce, vendor.verif_keypair->pub};
}

Result<Session, VerifyError> vendor_verify(Vendor& vendor, const ReportMessage& msg,
                                           const trust::CaRegistry& registry,
                                           const Digest32& expected_bitstream_hash) {
    const AttestationReport& rep = msg.report;

    // (1) device certificate over (kernel_hash, attest_pub)
    const PublicKey* device_pub = registry.lookup(vendor.device_serial);
    if (!device_pub ||
        !crypto::verify(*device_pub,
                        trust::seckrnl_cert_message(rep.kernel_hash, rep.attest_public),
                        rep.sigma_seckrnl))
        return VerifyError::BadDeviceCert;

    // (2) kernel hash on the published trusted list
    if (!registry.kernel_trusted(rep.kernel_hash)) return VerifyError::UnknownKernel;

    // (3) report signature under the attestation key
    if (!crypto::verify(rep.attest_public, rep.canonical(), msg.sigma_alpha))
        return VerifyError::BadReportSig;

    // (4) nonce freshness
    if (vendor.nonce.empty() || rep.nonce != vendor.nonce) return VerifyError::NonceMismatch;

    // (5) attested bitstream matches what the vendor published
    if (rep.enc_bitstream_hash != expected_bitstream_hash) return VerifyError::BitstreamMismatch;

    // (6) session-key certificate
    SymKey session_key;
    try {
        session_key = derive_session_key(crypto::key_exchange(*vendor.verif_keypair, rep.attest_public));
    } catch (const crypto::GroupError&) {
        return VerifyError::BadSessionCert;
    }
    Challenge ch{vendor.nonce, vendor.verif_keypair->pub};
    if (!crypto::verify(rep.attest_public, session_binding(ch, rep.attest_public),
                        msg.sigma_session))
        return VerifyError::BadSessionCert;

    // Accepted: close the challenge so the report cannot be accepted twice.
    vendor.nonce.clear();
    Session s(session_key, Session::Peer::Vendor);
    s.attested_bitstream_hash = rep.enc_bitstream_hash;
    return s;
}

Bytes vendor_release_key(Session& session, const SymKey& bitstr_key) {
    return session.tx.seal_next(bitstr_key.bytes());
}

std::pair<ReportMessage, Session> kernel_attest(const trust::SecurityKernelContext& ctx,
                                                const Challenge& ch,
                                                const EncryptedBitstream& enc_bs) {
    if (ctx.port_state != trust::PortState::Clean)
        throw trust::TrustError("refusing to attest: port monitor reports tampering");

    ReportMessage msg;
    msg.report.nonce = ch.nonce;
    msg.report.enc_bitstream_hash = enc_bs.hash();
    msg.report.attest_public = ctx.attest_keypair.pub;
    msg.report.kernel_hash = ctx.kernel_hash;
    msg.report.sigma_seckrnl = ctx.sigma_seckrnl;
    msg.sigma_alpha = crypto::sign(ctx.attest_keypair, msg.report.canonical());
    msg.sigma_session =
        crypto::sign(ctx.attest_keypair, session_binding(ch, ctx.attest_keypair.pub));

    SymKey session_key =
        derive_session_key(crypto::key_exchange(ctx.attest_keypair, ch.verif_public));
    Session s(session_key, Session::Peer::Kernel);
    s.attested_bitstream_hash = msg.report.enc_bitstream_hash;
    return {msg, std::move(s)};
}

Result<LoadedAccelerator, ProtocolError> kernel_load_bitstream(trust::SecurityKernelContext& ctx,
                                                               Session& session,
                                                               ByteView sealed_key_msg,
                                                               const EncryptedBitstream& enc_bs) {
    auto key_bytes = session.rx.open_next(sealed_key_msg);
    if (!key_bytes.ok()) return ProtocolError{"key release rejected: " + key_bytes.error().what};
    if (key_bytes.value().size() != 16 && key_bytes.value().size() != 32)
        return ProtocolError{"released key has invalid length"};
    SymKey bitstr_key = SymKey::from_bytes(key_bytes.value());

    if (enc_bs.hash() != session.attested_bitstream_hash)
        return ProtocolError{"bitstream hash does not match attested value"};

    auto payload = crypto::aead_open(bitstr_key, to_bytes("bitstream"), enc_bs.ciphertext);
    if (!payload.ok())
        return ProtocolError{"bitstream authentication failed: " + payload.error().what};

    FieldReader r{payload.value()};
    auto descriptor = r.next();
    auto priv = r.next();
    auto pub = r.next();
    auto cfg = r.next();
    if (!descriptor || !priv || !pub || !cfg || !r.done())
        return ProtocolError{"bitstream payload malformed"};

    LoadedAccelerator acc;
    acc.descriptor = *descriptor;
    acc.shield_enc_keypair.priv = *priv;
    acc.shield_enc_keypair.pub = PublicKey{*pub};
    acc.shield_config_text.assign(cfg->begin(), cfg->end());

    ctx.reconfig_authorized = true;
    trust::monitor_event(ctx, trust::PortEvent::PartialReconfig);
    return acc;
}

std::pair<SymKey, LoadKeyEnvelope> owner_provision(const PublicKey& shield_public,
                                                   crypto::DetRng& rng) {
    SymKey dek = SymKey::from_bytes(rng.bytes(32));
    LoadKeyEnvelope env{crypto::asym_encrypt(shield_public, dek.bytes(), rng)};
    return {dek, env};
}

Result<SymKey, crypto::IntegrityError> shield_unwrap(const KeyPair& shield_enc_keypair,
                                                     const LoadKeyEnvelope& envelope) {
    auto pt = crypto::asym_decrypt(shield_enc_keypair, envelope.ciphertext);
    if (!pt.ok()) return pt.error();
    if (pt.value().size() != 16 && pt.value().size() != 32)
        return crypto::IntegrityError{"unwrapped key has invalid length"};
    return SymKey::from_bytes(pt.value());
}

}  // namespace shef::attest
