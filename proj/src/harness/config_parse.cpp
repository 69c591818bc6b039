#include "shef/harness/config_parse.hpp"

#include <fstream>
#include <sstream>

namespace shef::harness {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

const std::string* Section::find(const std::string& key) const {
    for (const auto& [k, v, line] : entries)
        if (k == key) return &v;
    return nullptr;
}

std::string Section::get(const std::string& key, int fallback_line) const {
    const std::string* v = find(key);
    if (!v) throw ParseError(fallback_line, "missing key '" + key + "' in section [" + name + "]");
    return *v;
}

std::string Section::get_or(const std::string& key, const std::string& dflt) const {
    const std::string* v = find(key);
    return v ? *v : dflt;
}

std::vector<Section> parse_sections(const std::string& text) {
    std::vector<Section> sections;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            std::string inner = trim(line.substr(1, line.size() - 2));
            Section s;
            s.line_no = line_no;
            auto space = inner.find(' ');
            if (space == std::string::npos) {
                s.name = inner;
            } else {
                s.name = inner.substr(0, space);
                s.arg = trim(inner.substr(space + 1));
            }
            sections.push_back(std::move(s));
        } else {
            auto eq = line.find('=');
            if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
            if (sections.empty()) throw ParseError(line_no, "entry outside any section");
            sections.back().entries.emplace_back(trim(line.substr(0, eq)),
                                                 trim(line.substr(eq + 1)), line_no);
        }
    }
    return sections;
}

uint64_t parse_u64(const std::string& value, int line) {
    try {
        size_t pos = 0;
        uint64_t v;
        if (value.rfind("0x", 0) == 0 || value.rfind("0X", 0) == 0)
            v = std::stoull(value.substr(2), &pos, 16), pos += 2;
        else
            v = std::stoull(value, &pos, 10);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "bad number '" + value + "'");
    }
}

shield::ShieldConfig parse_config(const std::string& text) {
    shield::ShieldConfig cfg;
    auto sections = parse_sections(text);
    for (const auto& s : sections) {
        auto num = [&](const std::string& key) { return parse_u64(s.get(key, s.line_no), s.line_no); };
        auto num_or = [&](const std::string& key, uint64_t dflt) {
            const std::string* v = s.find(key);
            return v ? parse_u64(*v, s.line_no) : dflt;
        };
        if (s.name == "shield") {
            cfg.register_count = uint16_t(num_or("registers", 1));
            std::string mode = s.get_or("register_mode", "plain");
            if (mode == "plain")
                cfg.register_mode = shield::RegisterMode::PlainAddress;
            else if (mode == "encaddr")
                cfg.register_mode = shield::RegisterMode::EncryptedAddress;
            else
                throw ParseError(s.line_no, "register_mode must be plain|encaddr");
        } else if (s.name == "engine_set") {
            shield::EngineSetConfig es;
            if (s.arg.empty()) throw ParseError(s.line_no, "engine_set needs an id argument");
            es.id = uint8_t(parse_u64(s.arg, s.line_no));
            es.aes_engines = uint8_t(num_or("aes_engines", 1));
            es.sbox_parallelism = uint8_t(num_or("sbox", 4));
            es.key_bits = uint16_t(num_or("key_bits", 128));
            es.mac_engines = uint8_t(num_or("mac_engines", 1));
            std::string mac = s.get_or("mac", "hmac");
            if (mac == "hmac")
                es.mac_kind = shield::MacKind::Hmac;
            else if (mac == "pmac")
                es.mac_kind = shield::MacKind::Pmac;
            else
                throw ParseError(s.line_no, "mac must be hmac|pmac");
            for (const auto& other : cfg.engine_sets)
                if (other.id == es.id) throw ParseError(s.line_no, "duplicate engine set id");
            cfg.engine_sets.push_back(es);
        } else if (s.name == "region") {
            shield::MemoryRegion r;
            r.name = s.arg.empty() ? ("region" + std::to_string(cfg.regions.size())) : s.arg;
            r.region_id = uint16_t(num("id"));
            r.base = num("base");
            r.size = num("size");
            r.c_mem = uint32_t(num("c_mem"));
            r.tag_base = num("tag_base");
            r.engine_set_id = uint8_t(num("engine_set"));
            r.buffer_bytes = uint32_t(num_or("buffer_bytes", 0));
            r.counter_bits = uint8_t(num_or("counter_bits", 64));
            std::string mode = s.get_or("mode", "rw");
            if (mode == "rw")
                r.mode = shield::RegionMode::ReadWrite;
            else if (mode == "stream_write")
                r.mode = shield::RegionMode::StreamWrite;
            else if (mode == "ro")
                r.mode = shield::RegionMode::ReadOnly;
            else
                throw ParseError(s.line_no, "mode must be rw|stream_write|ro");
            std::string counters = s.get_or("counters", "off");
            if (counters == "on")
                r.counters_enabled = true;
            else if (counters == "off")
                r.counters_enabled = false;
            else
                throw ParseError(s.line_no, "counters must be on|off");
            for (const auto& other : cfg.regions)
                if (other.region_id == r.region_id)
                    throw ParseError(s.line_no, "duplicate region id in region '" + r.name + "'");
            cfg.regions.push_back(std::move(r));
        } else {
            throw ParseError(s.line_no, "unknown section [" + s.name + "]");
        }
    }
    try {
        cfg.validate();
    } catch (const shield::ConfigError& e) {
        throw ParseError(0, e.what());
    }
    return cfg;
}

shield::ShieldConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_text(const shield::ShieldConfig& cfg) {
    std::ostringstream out;
    out << "[shield]\n";
    out << "registers = " << cfg.register_count << "\n";
    out << "register_mode = "
        << (cfg.register_mode == shield::RegisterMode::PlainAddress ? "plain" : "encaddr") << "\n";
    for (const auto& es : cfg.engine_sets) {
        out << "\n[engine_set " << int(es.id) << "]\n";
        out << "aes_engines = " << int(es.aes_engines) << "\n";
        out << "sbox = " << int(es.sbox_parallelism) << "\n";
        out << "key_bits = " << es.key_bits << "\n";
        out << "mac = " << (es.mac_kind == shield::MacKind::Hmac ? "hmac" : "pmac") << "\n";
        out << "mac_engines = " << int(es.mac_engines) << "\n";
    }
    for (const auto& r : cfg.regions) {
        out << "\n[region " << r.name << "]\n";
        out << "id = " << r.region_id << "\n";
        out << std::hex;
        out << "base = 0x" << r.base << "\n";
        out << "size = 0x" << r.size << "\n";
        out << std::dec;
        out << "c_mem = " << r.c_mem << "\n";
        out << std::hex << "tag_base = 0x" << r.tag_base << std::dec << "\n";
        const char* mode = r.mode == shield::RegionMode::ReadWrite     ? "rw"
                           : r.mode == shield::RegionMode::StreamWrite ? "stream_write"
                                                                       : "ro";
        out << "mode = " << mode << "\n";
        out << "counters = " << (r.counters_enabled ? "on" : "off") << "\n";
        out << "counter_bits = " << int(r.counter_bits) << "\n";
        out << "buffer_bytes = " << r.buffer_bytes << "\n";
        out << "engine_set = " << int(r.engine_set_id) << "\n";
    }
    return out.str();
}

}  // namespace shef::harness
