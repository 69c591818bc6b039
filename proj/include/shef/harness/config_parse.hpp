#pragma once

#include <map>
#include <string>
#include <vector>

#include "shef/shield/config.hpp"

namespace shef::harness {

struct ParseError : std::runtime_error {
    ParseError(int line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_no(line) {}
    int line_no;
};

// Line-oriented section/key grammar shared by shield configs and scenario
// files: `[section args...]` headers, `key = value` entries, `#` comments.
struct Section {
    std::string name;          // e.g. "engine_set", "region", "shield"
    std::string arg;           // e.g. set id or region name
    int line_no = 0;
    std::vector<std::tuple<std::string, std::string, int>> entries;  // key, value, line

    const std::string* find(const std::string& key) const;
    std::string get(const std::string& key, int fallback_line) const;
    std::string get_or(const std::string& key, const std::string& dflt) const;
};

std::vector<Section> parse_sections(const std::string& text);

uint64_t parse_u64(const std::string& value, int line);

shield::ShieldConfig parse_config(const std::string& text);
shield::ShieldConfig load_config_file(const std::string& path);

std::string config_to_text(const shield::ShieldConfig& cfg);

}  // namespace shef::harness
