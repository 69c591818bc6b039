#pragma once

#include <optional>

#include "shef/attest/channel.hpp"
#include "shef/crypto/aead.hpp"
#include "shef/trust/trust_chain.hpp"

namespace shef::attest {

using crypto::Digest32;
using crypto::KeyPair;
using crypto::PublicKey;
using crypto::Signature;
using crypto::SymKey;

struct Challenge {
    Bytes nonce;           // 32 bytes, fresh per session
    PublicKey verif_public;

    Bytes canonical() const;
    static std::optional<Challenge> parse(ByteView body);
};

struct AttestationReport {
    Bytes nonce;
    Digest32 enc_bitstream_hash{};
    PublicKey attest_public;
    Digest32 kernel_hash{};
    Signature sigma_seckrnl;

    // Length-prefixed field concatenation; this is the signing message for sigma_alpha.
    Bytes canonical() const;
};

struct ReportMessage {
    AttestationReport report;
    Signature sigma_alpha;
    Signature sigma_session;

    Bytes encode() const;
    static std::optional<ReportMessage> parse(ByteView body);
};

// Channel directions for session-sealed traffic.
constexpr uint8_t kDirVendorToKernel = 1;
constexpr uint8_t kDirKernelToVendor = 2;

struct Session {
    enum class Peer { Vendor, Kernel };

    Session(const SymKey& session_key, Peer peer);

    SymKey key;
    Peer peer;
    crypto::SealedChannel tx;
    crypto::SealedChannel rx;
    Digest32 attested_bitstream_hash{};  // kernel side: pinned at attest time
};

struct LoadKeyEnvelope {
    Bytes ciphertext;  // asym_encrypt(ShieldEncKey_pub, DataEncKey)
};

struct EncryptedBitstream {
    Bytes ciphertext;  // authenticated blob; its hash is the attested value

    Digest32 hash() const;
};

struct LoadedAccelerator {
    Bytes descriptor;
    KeyPair shield_enc_keypair;
    std::string shield_config_text;
};

enum class VerifyError {
    BadDeviceCert,
    UnknownKernel,
    BadReportSig,
    NonceMismatch,
    BitstreamMismatch,
    BadSessionCert,
};

const char* verify_error_name(VerifyError e);

struct ProtocolError {
    std::string what;
};

// IP Vendor session state.
struct Vendor {
    uint64_t device_serial = 0;
    std::optional<KeyPair> verif_keypair;
    Bytes nonce;  // empty = no open challenge
};

// Builds the encrypted accelerator bundle the vendor publishes: descriptor,
// embedded Shield encryption private key, and the Shield configuration text.
EncryptedBitstream vendor_package_bitstream(const SymKey& bitstr_key, ByteView descriptor,
                                            const KeyPair& shield_enc_keypair,
                                            std::string_view shield_config_text,
                                            crypto::DetRng& rng);

Challenge vendor_begin(Vendor& vendor, crypto::DetRng& rng);

Result<Session, VerifyError> vendor_verify(Vendor& vendor, const ReportMessage& msg,
                                           const trust::CaRegistry& registry,
                                           const Digest32& expected_bitstream_hash);

// Seals the bitstream key into the next vendor->kernel datagram.
Bytes vendor_release_key(Session& session, const SymKey& bitstr_key);

// Kernel side of the exchange. Refuses to attest from a tampered context.
std::pair<ReportMessage, Session> kernel_attest(const trust::SecurityKernelContext& ctx,
                                                const Challenge& ch,
                                                const EncryptedBitstream& enc_bs);

Result<LoadedAccelerator, ProtocolError> kernel_load_bitstream(trust::SecurityKernelContext& ctx,
                                                               Session& session,
                                                               ByteView sealed_key_msg,
                                                               const EncryptedBitstream& enc_bs);

// Data Owner: generate a Data Encryption Key and wrap it for the Shield.
std::pair<SymKey, LoadKeyEnvelope> owner_provision(const PublicKey& shield_public,
                                                   crypto::DetRng& rng);

Result<SymKey, crypto::IntegrityError> shield_unwrap(const KeyPair& shield_enc_keypair,
                                                     const LoadKeyEnvelope& envelope);

}  // namespace shef::attest
