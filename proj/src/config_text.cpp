#include "tft/config_text.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tft {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(value);
    while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0' || errno == ERANGE) {
        throw ConfigError(what + ": '" + s + "' is not a number");
    }
    return v;
}

long long parse_int(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (end == t.c_str() || *end != '\0' || errno == ERANGE) {
        throw ConfigError(what + ": '" + s + "' is not an integer");
    }
    return v;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool ConfigText::Section::has(const std::string& key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return true;
    }
    return false;
}

const std::string& ConfigText::Section::get(const std::string& key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return v;
    }
    throw ConfigError("missing key '" + key + "' in section [" + name + "]");
}

std::string ConfigText::Section::get_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
}

double ConfigText::Section::get_double(const std::string& key) const {
    return parse_double(get(key), "[" + name + "] " + key);
}

double ConfigText::Section::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long ConfigText::Section::get_int(const std::string& key) const {
    return parse_int(get(key), "[" + name + "] " + key);
}

long long ConfigText::Section::get_int_or(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

void ConfigText::Section::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries.emplace_back(key, value);
}

void ConfigText::Section::set_double(const std::string& key, double value) {
    set(key, format_double(value));
}

void ConfigText::Section::set_int(const std::string& key, long long value) {
    set(key, std::to_string(value));
}

ConfigText ConfigText::parse(const std::string& text) {
    ConfigText cfg;
    Section* current = nullptr;
    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        std::string line = trim(raw);
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header '" +
                                  raw + "'");
            }
            cfg.sections.push_back({trim(line.substr(1, line.size() - 2)), {}});
            current = &cfg.sections.back();
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos || current == nullptr) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                              raw + "'");
        }
        current->entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ConfigText ConfigText::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ConfigText::serialize() const {
    std::string out;
    for (const auto& s : sections) {
        out += "[" + s.name + "]\n";
        for (const auto& [k, v] : s.entries) out += k + " = " + v + "\n";
        out += "\n";
    }
    return out;
}

void ConfigText::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path);
    out << serialize();
}

const ConfigText::Section* ConfigText::find(const std::string& name) const {
    for (const auto& s : sections) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

const ConfigText::Section& ConfigText::require(const std::string& name) const {
    const Section* s = find(name);
    if (s == nullptr) throw ConfigError("missing section [" + name + "]");
    return *s;
}

ConfigText::Section& ConfigText::add(const std::string& name) {
    sections.push_back({name, {}});
    return sections.back();
}

}  // namespace tft
