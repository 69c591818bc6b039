#pragma once

#include <deque>
#include <functional>
#include <optional>

#include "shef/bytes.hpp"

namespace shef::attest {

enum class MsgTag : uint8_t {
    Challenge = 1,
    Report = 2,
    KeyRelease = 3,
    LoadKey = 4,
    RegWrite = 5,
    RegRead = 6,
};

// Every wire message: tag(1) || session_id(8) || counter(8) || body.
struct WireMessage {
    MsgTag tag;
    uint64_t session_id = 0;
    uint64_t counter = 0;
    Bytes body;

    Bytes encode() const;
    static std::optional<WireMessage> decode(ByteView wire);
};

// Untrusted proxy: preserves nothing. Adversary hooks may drop, modify,
// reorder or replay traffic. Every byte that transits is appended to the
// transcript, which the secrecy scan searches for leaked key material.
class ProxyChannel {
public:
    using Interceptor = std::function<std::optional<Bytes>(const Bytes&)>;

    void send(const WireMessage& msg);
    std::optional<WireMessage> recv();

    // Interceptor sees raw wire bytes; return nullopt to drop, or
    // (possibly modified) bytes to deliver.
    void set_interceptor(Interceptor f) { interceptor_ = std::move(f); }

    void replay_last_sent();
    void reorder_last_two();

    const Bytes& transcript() const { return transcript_; }
    size_t pending() const { return queue_.size(); }

private:
    std::deque<Bytes> queue_;
    Bytes last_sent_;
    Bytes transcript_;
    Interceptor interceptor_;
};

}  // namespace shef::attest
