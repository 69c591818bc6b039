#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace shef {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline Bytes concat(std::initializer_list<ByteView> parts) {
    Bytes out;
    size_t total = 0;
    for (auto p : parts) total += p.size();
    out.reserve(total);
    for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

inline void append(Bytes& out, ByteView v) { out.insert(out.end(), v.begin(), v.end()); }

inline void append_u16be(Bytes& out, uint16_t v) {
    out.push_back(uint8_t(v >> 8));
    out.push_back(uint8_t(v));
}

inline void append_u32be(Bytes& out, uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(uint8_t(v >> (8 * i)));
}

inline void append_u64be(Bytes& out, uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(uint8_t(v >> (8 * i)));
}

// Length-prefixed field append, used for every canonical signing / MAC input.
inline void append_field(Bytes& out, ByteView v) {
    append_u32be(out, uint32_t(v.size()));
    append(out, v);
}

inline uint64_t read_u64be(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
    return v;
}

inline uint32_t read_u32be(const uint8_t* p) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | p[i];
    return v;
}

inline uint16_t read_u16be(const uint8_t* p) { return uint16_t((uint16_t(p[0]) << 8) | p[1]); }

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

// Minimal result type: success value or typed error.
template <typename T, typename E>
class Result {
public:
    Result(T value) : v_(std::move(value)) {}
    Result(E error) : v_(std::move(error)) {}

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    T& value() {
        if (!ok()) throw std::logic_error("Result: value() on error");
        return std::get<T>(v_);
    }
    const T& value() const {
        if (!ok()) throw std::logic_error("Result: value() on error");
        return std::get<T>(v_);
    }
    const E& error() const {
        if (ok()) throw std::logic_error("Result: error() on success");
        return std::get<E>(v_);
    }

private:
    std::variant<T, E> v_;
};

}  // namespace shef
