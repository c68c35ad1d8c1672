#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tft/errors.hpp"

namespace tft {

// Minimal ordered INI-style format shared by schema files, run configs and
// the checkpoint config blob: [section] headers, key = value lines, '#'
// comments. Both section and entry order are preserved.
struct ConfigText {
    struct Section {
        std::string name;
        std::vector<std::pair<std::string, std::string>> entries;

        bool has(const std::string& key) const;
        const std::string& get(const std::string& key) const;  // throws ConfigError
        std::string get_or(const std::string& key, const std::string& fallback) const;
        double get_double(const std::string& key) const;
        double get_double_or(const std::string& key, double fallback) const;
        long long get_int(const std::string& key) const;
        long long get_int_or(const std::string& key, long long fallback) const;
        void set(const std::string& key, const std::string& value);
        void set_double(const std::string& key, double value);  // %.17g, round-trip exact
        void set_int(const std::string& key, long long value);
    };

    std::vector<Section> sections;

    static ConfigText parse(const std::string& text);
    static ConfigText load(const std::string& path);

    std::string serialize() const;
    void save(const std::string& path) const;

    const Section* find(const std::string& name) const;
    const Section& require(const std::string& name) const;  // throws ConfigError
    Section& add(const std::string& name);
};

std::vector<std::string> split_list(const std::string& value);  // comma-separated, trimmed
std::string trim(const std::string& s);
double parse_double(const std::string& s, const std::string& what);
long long parse_int(const std::string& s, const std::string& what);
std::string format_double(double v);  // shortest round-trip-exact decimal

}  // namespace tft
