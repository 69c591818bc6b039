#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "shef/crypto/kdf.hpp"
#include "shef/trust/trust_chain.hpp"

using namespace shef;
using namespace shef::trust;

namespace {

struct Fixture {
    CaRegistry registry;
    DeviceIdentity identity;
    Firmware fw;
    Bytes kernel_image;
    SecurityKernelContext ctx;

    explicit Fixture(uint64_t seed = 1) {
        crypto::DetRng rng(seed);
        identity = provision_device(42, rng, registry);
        fw = boot_rom_load(identity, identity.aes_device_key);
        kernel_image = crypto::DetRng(seed ^ 0xFEED).bytes(1024);
        ctx = firmware_boot_kernel(fw, kernel_image);
    }
};

}  // namespace

TEST_CASE("registry rejects duplicate serials and answers lookups") {
    CaRegistry reg;
    crypto::DetRng rng(3);
    auto kp = crypto::keypair_gen(rng);
    reg.register_device(7, kp.pub);
    CHECK(reg.lookup(7) != nullptr);
    CHECK(*reg.lookup(7) == kp.pub);
    CHECK(reg.lookup(8) == nullptr);
    CHECK_THROWS_AS(reg.register_device(7, kp.pub), TrustError);
}

TEST_CASE("trusted kernel list is append-only membership") {
    CaRegistry reg;
    crypto::Digest32 h = crypto::sha256(to_bytes("kernel-a"));
    CHECK_FALSE(reg.kernel_trusted(h));
    reg.trust_kernel(h);
    CHECK(reg.kernel_trusted(h));
    CHECK_FALSE(reg.kernel_trusted(crypto::sha256(to_bytes("kernel-b"))));
}

TEST_CASE("boot rom recovers the sealed firmware with the burned key") {
    Fixture f;
    CHECK(f.fw.device_keypair.pub == f.identity.device_public);
    CHECK(f.fw.firmware_version == 1);
    // The private key actually signs for the registered public key.
    Bytes msg = to_bytes("probe");
    CHECK(crypto::verify(f.identity.device_public, msg, crypto::sign(f.fw.device_keypair, msg)));
}

TEST_CASE("boot rom halts on a wrong device key") {
    Fixture f;
    crypto::DetRng rng(99);
    auto wrong = crypto::SymKey::from_bytes(rng.bytes(32));
    CHECK_THROWS_AS(boot_rom_load(f.identity, wrong), TrustError);
}

TEST_CASE("boot rom halts on a tampered firmware blob") {
    Fixture f;
    DeviceIdentity broken = f.identity;
    for (size_t pos : {size_t(0), broken.encrypted_firmware.size() / 2,
                       broken.encrypted_firmware.size() - 1}) {
        broken.encrypted_firmware = f.identity.encrypted_firmware;
        broken.encrypted_firmware[pos] ^= 0x01;
        CHECK_THROWS_AS(boot_rom_load(broken, f.identity.aes_device_key), TrustError);
    }
}

TEST_CASE("firmware blob is bound to the device serial") {
    CaRegistry reg;
    crypto::DetRng rng(5);
    auto identity = provision_device(1000, rng, reg);
    DeviceIdentity other = identity;
    other.device_serial = 1001;  // sealed under serial 1000
    CHECK_THROWS_AS(boot_rom_load(other, identity.aes_device_key), TrustError);
}

TEST_CASE("deterministic provisioning fixture reproduces identities bit for bit") {
    std::array<uint8_t, 32> seed{};
    seed[0] = 0xAB;
    CaRegistry r1, r2;
    auto a = provision_device_from_seed(9, seed, r1);
    auto b = provision_device_from_seed(9, seed, r2);
    CHECK(a.encrypted_firmware == b.encrypted_firmware);
    CHECK(a.device_public == b.device_public);
    CHECK(a.aes_device_key == b.aes_device_key);
}

TEST_CASE("kernel boot measures the image and certifies the attestation key") {
    Fixture f;
    CHECK(f.ctx.kernel_hash == crypto::sha256(f.kernel_image));
    CHECK(f.ctx.port_state == PortState::Clean);
    CHECK(crypto::verify(f.identity.device_public,
                         seckrnl_cert_message(f.ctx.kernel_hash, f.ctx.attest_keypair.pub),
                         f.ctx.sigma_seckrnl));
}

TEST_CASE("attestation keypair derivation is deterministic per (device, kernel)") {
    Fixture f;
    auto ctx2 = firmware_boot_kernel(f.fw, f.kernel_image);
    CHECK(ctx2.attest_keypair.pub == f.ctx.attest_keypair.pub);
    CHECK(ctx2.attest_keypair.priv == f.ctx.attest_keypair.priv);

    Bytes other_image = f.kernel_image;
    other_image[0] ^= 1;
    auto ctx3 = firmware_boot_kernel(f.fw, other_image);
    CHECK_FALSE(ctx3.attest_keypair.pub == f.ctx.attest_keypair.pub);
    CHECK_FALSE(ctx3.kernel_hash == f.ctx.kernel_hash);
}

TEST_CASE("kernel boot rejects an empty image") {
    Fixture f;
    CHECK_THROWS_AS(firmware_boot_kernel(f.fw, Bytes{}), TrustError);
}

TEST_CASE("port monitor: jtag access always tampers") {
    Fixture f;
    CHECK(monitor_event(f.ctx, PortEvent::JtagAccess, 10) == PortState::Tampered);
    CHECK(f.ctx.event_log.size() == 1);
    CHECK_FALSE(f.ctx.event_log[0].authorized);
}

TEST_CASE("port monitor: unauthorized reconfiguration tampers, authorized does not") {
    Fixture f;
    SUBCASE("unarmed partial reconfig latches tampered") {
        CHECK(monitor_event(f.ctx, PortEvent::PartialReconfig) == PortState::Tampered);
    }
    SUBCASE("armed reconfig passes exactly once") {
        f.ctx.reconfig_authorized = true;
        CHECK(monitor_event(f.ctx, PortEvent::PartialReconfig) == PortState::Clean);
        CHECK_FALSE(f.ctx.reconfig_authorized);  // single-shot arm
        CHECK(monitor_event(f.ctx, PortEvent::PartialReconfig) == PortState::Tampered);
    }
    SUBCASE("icap write follows the same authorization") {
        f.ctx.reconfig_authorized = true;
        CHECK(monitor_event(f.ctx, PortEvent::IcapWrite) == PortState::Clean);
        CHECK(monitor_event(f.ctx, PortEvent::IcapWrite) == PortState::Clean);  // not consumed
    }
}

TEST_CASE("tampered state latches: later benign events do not clear it") {
    Fixture f;
    monitor_event(f.ctx, PortEvent::JtagAccess);
    f.ctx.reconfig_authorized = true;
    CHECK(monitor_event(f.ctx, PortEvent::PartialReconfig) == PortState::Tampered);
}
