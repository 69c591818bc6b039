#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shef/crypto/aead.hpp"
#include "shef/crypto/group.hpp"
#include "shef/crypto/rng.hpp"

namespace shef::trust {

using crypto::Digest32;
using crypto::KeyPair;
using crypto::PublicKey;
using crypto::Signature;
using crypto::SymKey;

struct TrustError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Manufacturer-side certificate authority: device serial -> public key, plus
// the published list of trusted Security Kernel hashes. Append-only.
class CaRegistry {
public:
    void register_device(uint64_t serial, const PublicKey& pub);
    const PublicKey* lookup(uint64_t serial) const;
    void trust_kernel(const Digest32& kernel_hash);
    bool kernel_trusted(const Digest32& kernel_hash) const;

private:
    std::map<uint64_t, PublicKey> devices_;
    std::vector<Digest32> trusted_kernels_;
};

struct DeviceIdentity {
    uint64_t device_serial = 0;
    SymKey aes_device_key;            // burned into secure storage
    PublicKey device_public;          // registered with the CA
    Bytes encrypted_firmware;         // device private key sealed under aes_device_key
};

struct Firmware {
    KeyPair device_keypair;
    uint32_t firmware_version = 0;
};

enum class PortState { Clean, Tampered };
enum class PortEvent { JtagAccess, IcapWrite, PartialReconfig };

struct PortEventRecord {
    PortEvent event;
    uint64_t timestamp;
    bool authorized;
};

struct SecurityKernelContext {
    Digest32 kernel_hash{};
    KeyPair attest_keypair;
    Signature sigma_seckrnl;      // Sign_DeviceKey(kernel_hash || attest_pub)
    PublicKey device_public;
    PortState port_state = PortState::Clean;
    std::vector<PortEventRecord> event_log;
    bool reconfig_authorized = false;  // armed by an authenticated bitstream load
};

// Manufacturer provisioning: burns the AES device key, seals the device
// private key into the firmware blob, registers the public key with the CA.
DeviceIdentity provision_device(uint64_t serial, crypto::DetRng& rng, CaRegistry& registry);

// Deterministic variant for scenario fixtures: `device serial=<u64> seed=<hex32>`.
DeviceIdentity provision_device_from_seed(uint64_t serial, const std::array<uint8_t, 32>& seed,
                                          CaRegistry& registry);

// BootROM stage: recovers the firmware iff the candidate key matches and the
// blob authenticates. Throws TrustError otherwise (boot halts).
Firmware boot_rom_load(const DeviceIdentity& identity, const SymKey& candidate_key);

// SPB firmware stage: hash the kernel image, derive the attestation keypair
// from the device-key signature over the hash, certify it.
SecurityKernelContext firmware_boot_kernel(const Firmware& fw, ByteView kernel_image);

// Port monitor. Unauthorized programming/debug activity latches Tampered.
PortState monitor_event(SecurityKernelContext& ctx, PortEvent event, uint64_t timestamp = 0);

// Canonical message certified by sigma_seckrnl.
Bytes seckrnl_cert_message(const Digest32& kernel_hash, const PublicKey& attest_pub);

}  // namespace shef::trust
