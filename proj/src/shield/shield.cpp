#include "shef/shield/shield.hpp"

#include <algorithm>
#include <cstring>

#include "shef/crypto/kdf.hpp"
#include "shef/crypto/mac.hpp"

namespace shef::shield {

namespace {

Iv96 compose_iv(uint16_t region_id, uint64_t chunk_index, uint64_t write_version) {
    // region_id(2) || chunk_index(5) || write_version(5), big-endian
    Iv96 iv{};
    iv[0] = uint8_t(region_id >> 8);
    iv[1] = uint8_t(region_id);
    for (int i = 0; i < 5; ++i) iv[2 + i] = uint8_t(chunk_index >> (8 * (4 - i)));
    for (int i = 0; i < 5; ++i) iv[7 + i] = uint8_t(write_version >> (8 * (4 - i)));
    return iv;
}

Bytes region_label(const char* prefix, uint16_t region_id) {
    Bytes label = to_bytes(prefix);
    append_u16be(label, region_id);
    return label;
}

}  // namespace

Bytes RegEnvelope::encode() const {
    Bytes out;
    append_u16be(out, dest);
    append(out, sealed);
    return out;
}

std::optional<RegEnvelope> RegEnvelope::decode(ByteView wire) {
    if (wire.size() < 2) return std::nullopt;
    RegEnvelope env;
    env.dest = read_u16be(wire.data());
    env.sealed.assign(wire.begin() + 2, wire.end());
    return env;
}

ShieldState::ShieldState(ShieldConfig cfg, const SymKey& dek, sim::IvTracker* iv_tracker)
    : cfg_(std::move(cfg)),
      dek_(dek),
      iv_tracker_(iv_tracker),
      reg_key_(SymKey::from_bytes(crypto::kdf(dek.bytes(), "reg", 32))),
      reg_host_in_(reg_key_, kDirHostToAccel),
      reg_host_out_(reg_key_, kDirAccelToHost) {
    cfg_.validate();
    registers_.assign(cfg_.register_count, 0);

    for (const auto& region : cfg_.regions) {
        RegionState rs;
        rs.region = &region;
        rs.engine_set = &cfg_.engine_set(region.engine_set_id);
        size_t key_bytes = rs.engine_set->key_bits / 8;
        rs.enc_key = SymKey::from_bytes(
            crypto::kdf(dek_.bytes(), ByteView(region_label("enc", region.region_id)), key_bytes));
        rs.mac_key = SymKey::from_bytes(
            crypto::kdf(dek_.bytes(), ByteView(region_label("mac", region.region_id)), 32));
        rs.key_id = to_hex(crypto::sha256(rs.enc_key.bytes())).substr(0, 16);
        rs.capacity_lines = region.buffer_bytes / region.c_mem;
        set_stats_[region.engine_set_id];  // ensure slot exists
        regions_.emplace(region.region_id, std::move(rs));
    }
}

ShieldState::RegionState& ShieldState::region_state(uint16_t region_id) {
    auto it = regions_.find(region_id);
    if (it == regions_.end()) throw RegionFault("unknown region id");
    return it->second;
}

const ShieldState::RegionState& ShieldState::region_state(uint16_t region_id) const {
    auto it = regions_.find(region_id);
    if (it == regions_.end()) throw RegionFault("unknown region id");
    return it->second;
}

sim::ShieldStats& ShieldState::set_stats(uint8_t engine_set_id) {
    return set_stats_[engine_set_id];
}

const sim::ShieldStats& ShieldState::stats_for_set(uint8_t engine_set_id) const {
    auto it = set_stats_.find(engine_set_id);
    if (it == set_stats_.end()) throw ConfigError("no stats for engine set");
    return it->second;
}

sim::ShieldStats ShieldState::stats_total() const {
    sim::ShieldStats total;
    for (const auto& [id, s] : set_stats_) total.add(s);
    total.add(reg_stats_);
    return total;
}

size_t ShieldState::buffered_bytes(uint16_t region_id) const {
    const RegionState& rs = region_state(region_id);
    return rs.buffer.size() * rs.region->c_mem;
}

std::vector<ChunkAccess> ShieldState::decode_burst(const BurstRequest& req) const {
    if (req.len < 1) throw RegionFault("zero-length burst");
    const MemoryRegion* region = nullptr;
    for (const auto& r : cfg_.regions) {
        if (req.addr >= r.base && req.addr < r.base + r.size) {
            region = &r;
            break;
        }
    }
    if (!region) throw RegionFault("address outside all regions");
    if (req.addr + req.len > region->base + region->size)
        throw CrossRegionFault("burst crosses region boundary");

    std::vector<ChunkAccess> out;
    uint64_t offset = req.addr - region->base;
    uint64_t remaining = req.len;
    while (remaining > 0) {
        uint64_t chunk = offset / region->c_mem;
        uint32_t in_chunk = uint32_t(offset % region->c_mem);
        uint32_t take = uint32_t(std::min<uint64_t>(remaining, region->c_mem - in_chunk));
        out.push_back({region->region_id, chunk, in_chunk, take});
        offset += take;
        remaining -= take;
    }
    return out;
}

Bytes ShieldState::chunk_mac_input(uint16_t region_id, uint64_t chunk_index, const Iv96& iv,
                                   ByteView ciphertext, bool counters_enabled, uint64_t ctr) {
    Bytes rid;
    append_u16be(rid, region_id);
    Bytes cidx;
    append_u64be(cidx, chunk_index);
    Bytes input;
    append_field(input, rid);
    append_field(input, cidx);
    append_field(input, iv);
    append_field(input, ciphertext);
    if (counters_enabled) {
        Bytes c;
        append_u64be(c, ctr);
        append_field(input, c);
    }
    return input;
}

Tag16 ShieldState::compute_chunk_tag(const RegionState& rs, uint64_t chunk_index, const Iv96& iv,
                                     ByteView ciphertext, uint64_t ctr) const {
    Bytes input = chunk_mac_input(rs.region->region_id, chunk_index, iv, ciphertext,
                                  rs.region->counters_enabled, ctr);
    if (rs.engine_set->mac_kind == MacKind::Hmac) return crypto::mac_hmac(rs.mac_key, input);
    return crypto::mac_pmac(rs.mac_key, input);
}

SealedChunk ShieldState::chunk_seal(uint16_t region_id, uint64_t chunk_index, ByteView plaintext) {
    RegionState& rs = region_state(region_id);
    if (plaintext.size() != rs.region->c_mem)
        throw ConfigError("chunk_seal: plaintext length != c_mem");
    ChunkMeta& meta = rs.chunks[chunk_index];
    if (meta.write_version >= kWriteVersionLimit)
        throw CounterExhausted("chunk write version exhausted");

    SealedChunk sealed;
    sealed.iv = compose_iv(region_id, chunk_index, meta.write_version);
    if (iv_tracker_) iv_tracker_->record(rs.key_id, sealed.iv);
    sealed.ciphertext = crypto::ctr_encrypt(rs.enc_key, sealed.iv, 0, plaintext);
    ++meta.write_version;
    if (rs.region->counters_enabled) {
        uint64_t limit =
            rs.region->counter_bits >= 64 ? ~uint64_t(0) : (uint64_t(1) << rs.region->counter_bits) - 1;
        if (meta.ctr >= limit) throw CounterExhausted("replay counter exhausted");
        ++meta.ctr;  // one increment per DRAM write-back; tag binds the new value
    }
    sealed.tag = compute_chunk_tag(rs, chunk_index, sealed.iv, sealed.ciphertext, meta.ctr);

    sim::ShieldStats& st = set_stats(rs.region->engine_set_id);
    ++st.chunks_sealed;
    st.aes_bytes += plaintext.size();
    st.mac_bytes += sealed.ciphertext.size();
    return sealed;
}

Result<Bytes, AuthFailure> ShieldState::chunk_open(uint16_t region_id, uint64_t chunk_index,
                                                   ByteView ciphertext, const Tag16& tag,
                                                   const Iv96& stored_iv) {
    RegionState& rs = region_state(region_id);
    if (ciphertext.size() != rs.region->c_mem)
        return AuthFailure{"chunk_open: ciphertext length != c_mem"};
    uint64_t ctr = 0;
    if (rs.region->counters_enabled) {
        auto it = rs.chunks.find(chunk_index);
        ctr = it == rs.chunks.end() ? 0 : it->second.ctr;
    }
    Tag16 expect = compute_chunk_tag(rs, chunk_index, stored_iv, ciphertext, ctr);

    sim::ShieldStats& st = set_stats(rs.region->engine_set_id);
    ++st.chunks_opened;
    st.mac_bytes += ciphertext.size();
    if (!crypto::tag_equal(tag, expect)) return AuthFailure{"chunk authentication failed"};
    st.aes_bytes += ciphertext.size();
    return crypto::ctr_encrypt(rs.enc_key, stored_iv, 0, ciphertext);
}

void ShieldState::write_back(sim::SimDram& dram, RegionState& rs, uint64_t chunk_index,
                             BufferLine& line) {
    SealedChunk sealed = chunk_seal(rs.region->region_id, chunk_index, line.plaintext);
    dram.write(rs.region->chunk_data_addr(chunk_index), sealed.ciphertext);
    Bytes meta;
    append(meta, sealed.tag);
    append(meta, sealed.iv);
    dram.write(rs.region->chunk_meta_addr(chunk_index), meta);
    sim::ShieldStats& st = set_stats(rs.region->engine_set_id);
    st.dram_bytes_written += sealed.ciphertext.size() + meta.size();
    line.dirty = false;
}

void ShieldState::evict_if_needed(sim::SimDram& dram, RegionState& rs) {
    while (rs.buffer.size() >= rs.capacity_lines && !rs.buffer.empty()) {
        auto victim = rs.buffer.begin();
        for (auto it = rs.buffer.begin(); it != rs.buffer.end(); ++it)
            if (it->second.lru_stamp < victim->second.lru_stamp) victim = it;
        if (victim->second.dirty) write_back(dram, rs, victim->first, victim->second);
        rs.buffer.erase(victim);
    }
}

Result<ShieldState::BufferLine*, AuthFailure> ShieldState::obtain_line(sim::SimDram& dram,
                                                                       RegionState& rs,
                                                                       uint64_t chunk_index,
                                                                       bool zero_fill) {
    sim::ShieldStats& st = set_stats(rs.region->engine_set_id);
    auto it = rs.buffer.find(chunk_index);
    if (it != rs.buffer.end()) {
        ++st.buffer_hits;
        it->second.lru_stamp = ++lru_clock_;
        return &it->second;
    }
    ++st.buffer_misses;

    BufferLine line;
    line.lru_stamp = ++lru_clock_;
    if (zero_fill) {
        line.plaintext.assign(rs.region->c_mem, 0);
    } else {
        Bytes ct = dram.read(rs.region->chunk_data_addr(chunk_index), rs.region->c_mem);
        Bytes meta = dram.read(rs.region->chunk_meta_addr(chunk_index), kChunkMetaBytes);
        st.dram_bytes_read += ct.size() + meta.size();
        Tag16 tag;
        std::memcpy(tag.data(), meta.data(), 16);
        Iv96 iv;
        std::memcpy(iv.data(), meta.data() + 16, 12);
        auto pt = chunk_open(rs.region->region_id, chunk_index, ct, tag, iv);
        if (!pt.ok()) return pt.error();
        line.plaintext = std::move(pt.value());
    }

    if (rs.capacity_lines == 0) {
        // Bufferless engine set: hand back a transient line.
        transient_ = std::move(line);
        transient_chunk_ = chunk_index;
        return &transient_;
    }
    evict_if_needed(dram, rs);
    auto [pos, inserted] = rs.buffer.emplace(chunk_index, std::move(line));
    return &pos->second;
}

Result<Bytes, AuthFailure> ShieldState::read(sim::SimDram& dram, uint64_t addr, uint32_t len) {
    BurstRequest req{BurstKind::Read, addr, len, {}};
    auto accesses = decode_burst(req);
    RegionState& rs = region_state(accesses.front().region_id);
    ++set_stats(rs.region->engine_set_id).bursts;

    Bytes out;
    out.reserve(len);
    for (const auto& acc : accesses) {
        auto line = obtain_line(dram, rs, acc.chunk_index, false);
        if (!line.ok()) return line.error();
        Bytes& pt = line.value()->plaintext;
        out.insert(out.end(), pt.begin() + acc.offset_in_chunk,
                   pt.begin() + acc.offset_in_chunk + acc.len);
        if (rs.capacity_lines == 0 && transient_.dirty)
            write_back(dram, rs, transient_chunk_, transient_);
    }
    return out;
}

Result<Ok, AuthFailure> ShieldState::write(sim::SimDram& dram, uint64_t addr, ByteView data) {
    BurstRequest req{BurstKind::Write, addr, uint32_t(data.size()), {}};
    auto accesses = decode_burst(req);
    RegionState& rs = region_state(accesses.front().region_id);
    if (rs.region->mode == RegionMode::ReadOnly)
        throw PermissionFault("write to read-only region");
    ++set_stats(rs.region->engine_set_id).bursts;

    size_t consumed = 0;
    for (const auto& acc : accesses) {
        bool full_chunk = acc.offset_in_chunk == 0 && acc.len == rs.region->c_mem;
        bool stream = rs.region->mode == RegionMode::StreamWrite;
        bool already_buffered = rs.buffer.count(acc.chunk_index) > 0;
        // StreamWrite allocates a zero-filled line; ReadWrite fills from DRAM
        // unless the whole chunk is being overwritten anyway.
        bool zero_fill = stream || (full_chunk && !already_buffered);
        auto line = obtain_line(dram, rs, acc.chunk_index, zero_fill);
        if (!line.ok()) return line.error();
        Bytes& pt = line.value()->plaintext;
        std::copy(data.begin() + consumed, data.begin() + consumed + acc.len,
                  pt.begin() + acc.offset_in_chunk);
        line.value()->dirty = true;
        consumed += acc.len;
        if (rs.capacity_lines == 0) write_back(dram, rs, transient_chunk_, transient_);
    }
    return Ok{};
}

Result<Ok, AuthFailure> ShieldState::flush(sim::SimDram& dram) {
    for (const auto& region : cfg_.regions) {
        RegionState& rs = regions_.at(region.region_id);
        std::vector<uint64_t> chunks;
        for (auto& [idx, line] : rs.buffer) chunks.push_back(idx);
        std::sort(chunks.begin(), chunks.end());
        for (uint64_t idx : chunks) {
            BufferLine& line = rs.buffer.at(idx);
            if (line.dirty) write_back(dram, rs, idx, line);
        }
        rs.buffer.clear();
    }
    return Ok{};
}

void ShieldState::provision_region(sim::SimDram& dram, uint16_t region_id, ByteView image) {
    RegionState& rs = region_state(region_id);
    if (image.size() != rs.region->size)
        throw ConfigError("provision_region: image size != region size");
    // Direct seal path: bypasses buffers and statistics.
    sim::ShieldStats saved = set_stats(rs.region->engine_set_id);
    for (uint64_t i = 0; i < rs.region->chunk_count(); ++i) {
        SealedChunk sealed =
            chunk_seal(region_id, i, image.subspan(i * rs.region->c_mem, rs.region->c_mem));
        dram.write(rs.region->chunk_data_addr(i), sealed.ciphertext);
        Bytes meta;
        append(meta, sealed.tag);
        append(meta, sealed.iv);
        dram.write(rs.region->chunk_meta_addr(i), meta);
    }
    set_stats(rs.region->engine_set_id) = saved;
}

Result<Ok, AuthFailure> ShieldState::reg_host_write(ByteView wire) {
    auto env = RegEnvelope::decode(wire);
    if (!env) return AuthFailure{"malformed register envelope"};
    auto payload = reg_host_in_.open_next(env->sealed);
    ++reg_stats_.bursts;
    reg_stats_.mac_bytes += env->sealed.size();
    if (!payload.ok()) return AuthFailure{"register write rejected: " + payload.error().what};
    reg_stats_.aes_bytes += payload.value().size();

    uint16_t idx;
    uint32_t value;
    if (cfg_.register_mode == RegisterMode::PlainAddress) {
        if (payload.value().size() != 4) return AuthFailure{"register payload malformed"};
        idx = env->dest;
        value = read_u32be(payload.value().data());
    } else {
        if (env->dest != kRegMailbox) return AuthFailure{"expected common mailbox address"};
        if (payload.value().size() != 6) return AuthFailure{"register payload malformed"};
        idx = read_u16be(payload.value().data());
        value = read_u32be(payload.value().data() + 2);
    }
    if (idx >= registers_.size()) return AuthFailure{"register index out of range"};
    registers_[idx] = value;
    return Ok{};
}

Bytes ShieldState::reg_host_read(uint16_t reg_addr) {
    if (reg_addr >= registers_.size()) throw std::out_of_range("register index out of range");
    Bytes payload;
    if (cfg_.register_mode == RegisterMode::EncryptedAddress) append_u16be(payload, reg_addr);
    append_u32be(payload, registers_[reg_addr]);
    RegEnvelope env;
    env.dest = cfg_.register_mode == RegisterMode::PlainAddress ? reg_addr : kRegMailbox;
    env.sealed = reg_host_out_.seal_next(payload);
    ++reg_stats_.bursts;
    reg_stats_.aes_bytes += payload.size();
    reg_stats_.mac_bytes += env.sealed.size();
    return env.encode();
}

uint32_t ShieldState::reg_accel_read(uint16_t idx) const {
    if (idx >= registers_.size()) throw std::out_of_range("register index out of range");
    return registers_[idx];
}

void ShieldState::reg_accel_write(uint16_t idx, uint32_t value) {
    if (idx >= registers_.size()) throw std::out_of_range("register index out of range");
    registers_[idx] = value;
}

std::map<std::pair<uint16_t, uint64_t>, ChunkMeta> ShieldState::export_chunk_state() const {
    std::map<std::pair<uint16_t, uint64_t>, ChunkMeta> out;
    for (const auto& [rid, rs] : regions_)
        for (const auto& [idx, meta] : rs.chunks) out[{rid, idx}] = meta;
    return out;
}

void ShieldState::import_chunk_state(
    const std::map<std::pair<uint16_t, uint64_t>, ChunkMeta>& state) {
    for (const auto& [key, meta] : state) region_state(key.first).chunks[key.second] = meta;
}

HostRegisterClient::HostRegisterClient(const SymKey& dek, RegisterMode mode)
    : mode_(mode),
      tx_(SymKey::from_bytes(crypto::kdf(dek.bytes(), "reg", 32)), kDirHostToAccel),
      rx_(SymKey::from_bytes(crypto::kdf(dek.bytes(), "reg", 32)), kDirAccelToHost) {}

Bytes HostRegisterClient::make_write(uint16_t idx, uint32_t value) {
    Bytes payload;
    RegEnvelope env;
    if (mode_ == RegisterMode::PlainAddress) {
        env.dest = idx;
        append_u32be(payload, value);
    } else {
        env.dest = kRegMailbox;
        append_u16be(payload, idx);
        append_u32be(payload, value);
    }
    env.sealed = tx_.seal_next(payload);
    return env.encode();
}

Result<uint32_t, AuthFailure> HostRegisterClient::parse_read(ByteView wire) {
    auto env = RegEnvelope::decode(wire);
    if (!env) return AuthFailure{"malformed register envelope"};
    auto payload = rx_.open_next(env->sealed);
    if (!payload.ok()) return AuthFailure{payload.error().what};
    const Bytes& p = payload.value();
    if (mode_ == RegisterMode::PlainAddress) {
        if (p.size() != 4) return AuthFailure{"register payload malformed"};
        return read_u32be(p.data());
    }
    if (p.size() != 6) return AuthFailure{"register payload malformed"};
    return read_u32be(p.data() + 2);
}

}  // namespace shef::shield
