#include "shef/attest/channel.hpp"

namespace shef::attest {

Bytes WireMessage::encode() const {
    Bytes out;
    out.push_back(uint8_t(tag));
    append_u64be(out, session_id);
    append_u64be(out, counter);
    append(out, body);
    return out;
}

std::optional<WireMessage> WireMessage::decode(ByteView wire) {
    if (wire.size() < 17) return std::nullopt;
    WireMessage m;
    m.tag = MsgTag(wire[0]);
    m.session_id = read_u64be(wire.data() + 1);
    m.counter = read_u64be(wire.data() + 9);
    m.body.assign(wire.begin() + 17, wire.end());
    return m;
}

void ProxyChannel::send(const WireMessage& msg) {
    Bytes wire = msg.encode();
    last_sent_ = wire;
    if (interceptor_) {
        auto delivered = interceptor_(wire);
        if (!delivered) {
            append(transcript_, wire);  // dropped messages were still observed
            return;
        }
        wire = *delivered;
    }
    append(transcript_, wire);
    queue_.push_back(std::move(wire));
}

std::optional<WireMessage> ProxyChannel::recv() {
    if (queue_.empty()) return std::nullopt;
    Bytes wire = std::move(queue_.front());
    queue_.pop_front();
    return WireMessage::decode(wire);
}

void ProxyChannel::replay_last_sent() {
    if (last_sent_.empty()) return;
    append(transcript_, last_sent_);
    queue_.push_back(last_sent_);
}

void ProxyChannel::reorder_last_two() {
    if (queue_.size() >= 2) std::swap(queue_[queue_.size() - 1], queue_[queue_.size() - 2]);
}

}  // namespace shef::attest
