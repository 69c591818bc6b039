#include "shef/trust/trust_chain.hpp"

#include "shef/crypto/kdf.hpp"

namespace shef::trust {

void CaRegistry::register_device(uint64_t serial, const PublicKey& pub) {
    if (devices_.count(serial)) throw TrustError("duplicate device serial");
    devices_.emplace(serial, pub);
}

const PublicKey* CaRegistry::lookup(uint64_t serial) const {
    auto it = devices_.find(serial);
    return it == devices_.end() ? nullptr : &it->second;
}

void CaRegistry::trust_kernel(const Digest32& kernel_hash) {
    trusted_kernels_.push_back(kernel_hash);
}

bool CaRegistry::kernel_trusted(const Digest32& kernel_hash) const {
    for (const auto& h : trusted_kernels_)
        if (h == kernel_hash) return true;
    return false;
}

namespace {

constexpr uint32_t kFirmwareVersion = 1;

Bytes firmware_payload(const KeyPair& device_kp) {
    Bytes payload;
    append_field(payload, device_kp.priv);
    append_u32be(payload, kFirmwareVersion);
    return payload;
}

DeviceIdentity provision_with(uint64_t serial, const SymKey& aes_key, const KeyPair& device_kp,
                              const crypto::Iv96& iv, CaRegistry& registry) {
    registry.register_device(serial, device_kp.pub);
    DeviceIdentity id;
    id.device_serial = serial;
    id.aes_device_key = aes_key;
    id.device_public = device_kp.pub;
    Bytes aad;
    append_u64be(aad, serial);
    id.encrypted_firmware = crypto::aead_seal(aes_key, iv, aad, firmware_payload(device_kp));
    return id;
}

}  // namespace

DeviceIdentity provision_device(uint64_t serial, crypto::DetRng& rng, CaRegistry& registry) {
    SymKey aes_key = SymKey::from_bytes(rng.bytes(32));
    KeyPair device_kp = crypto::keypair_gen(rng);
    crypto::Iv96 iv{};
    Bytes ivb = rng.bytes(12);
    std::copy(ivb.begin(), ivb.end(), iv.begin());
    return provision_with(serial, aes_key, device_kp, iv, registry);
}

DeviceIdentity provision_device_from_seed(uint64_t serial, const std::array<uint8_t, 32>& seed,
                                          CaRegistry& registry) {
    crypto::DetRng rng{ByteView(seed.data(), seed.size())};
    return provision_device(serial, rng, registry);
}

Firmware boot_rom_load(const DeviceIdentity& identity, const SymKey& candidate_key) {
    Bytes aad;
    append_u64be(aad, identity.device_serial);
    auto payload = crypto::aead_open(candidate_key, aad, identity.encrypted_firmware);
    if (!payload.ok()) throw TrustError("firmware authentication failed: " + payload.error().what);
    const Bytes& p = payload.value();
    if (p.size() < 4 + 4) throw TrustError("firmware payload malformed");
    uint32_t priv_len = read_u32be(p.data());
    if (p.size() != 4 + priv_len + 4) throw TrustError("firmware payload malformed");

    Firmware fw;
    fw.device_keypair.priv.assign(p.begin() + 4, p.begin() + 4 + priv_len);
    fw.device_keypair.pub = identity.device_public;
    fw.firmware_version = read_u32be(p.data() + 4 + priv_len);
    return fw;
}

Bytes seckrnl_cert_message(const Digest32& kernel_hash, const PublicKey& attest_pub) {
    Bytes msg;
    append(msg, kernel_hash);
    append(msg, attest_pub.bytes);
    return msg;
}

SecurityKernelContext firmware_boot_kernel(const Firmware& fw, ByteView kernel_image) {
    if (kernel_image.empty()) throw TrustError("empty kernel image");
    SecurityKernelContext ctx;
    ctx.kernel_hash = crypto::sha256(kernel_image);
    ctx.device_public = fw.device_keypair.pub;

    // Deterministic signature over the kernel hash seeds the attestation key;
    // the KDF fixes the seed width regardless of signature encoding.
    Signature hash_sig = crypto::sign(fw.device_keypair, ctx.kernel_hash);
    Bytes seed_bytes = crypto::kdf(hash_sig.bytes, "attest-seed", 32);
    std::array<uint8_t, 32> seed;
    std::copy(seed_bytes.begin(), seed_bytes.end(), seed.begin());
    ctx.attest_keypair = crypto::keypair_from_seed(seed);

    ctx.sigma_seckrnl =
        crypto::sign(fw.device_keypair, seckrnl_cert_message(ctx.kernel_hash, ctx.attest_keypair.pub));
    ctx.port_state = PortState::Clean;
    return ctx;
}

PortState monitor_event(SecurityKernelContext& ctx, PortEvent event, uint64_t timestamp) {
    bool authorized = false;
    switch (event) {
        case PortEvent::JtagAccess:
            break;  // never authorized
        case PortEvent::IcapWrite:
        case PortEvent::PartialReconfig:
            authorized = ctx.reconfig_authorized;
            break;
    }
    ctx.event_log.push_back({event, timestamp, authorized});
    if (!authorized) ctx.port_state = PortState::Tampered;
    if (authorized && event == PortEvent::PartialReconfig) ctx.reconfig_authorized = false;
    return ctx.port_state;
}

}  // namespace shef::trust
