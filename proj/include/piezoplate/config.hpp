#pragma once

// Flat "key = value" configuration files. '#' starts a comment, blank lines
// are ignored, keys are unique. Every lookup is recorded so that unknown
// (misspelled) keys can be rejected after parsing.

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "piezoplate/errors.hpp"

namespace piezoplate {

class Config {
public:
    static Config parse(std::istream& in, const std::string& source = "<config>") {
        Config cfg;
        cfg.source_ = source;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const std::string text = trim(line);
            if (text.empty()) continue;
            const auto eq = text.find('=');
            if (eq == std::string::npos) cfg.fail(lineno, "expected 'key = value'");
            const std::string key = trim(text.substr(0, eq));
            const std::string value = trim(text.substr(eq + 1));
            if (key.empty()) cfg.fail(lineno, "empty key");
            if (value.empty()) cfg.fail(lineno, "empty value for '" + key + "'");
            if (key.find_first_of(" \t") != std::string::npos) cfg.fail(lineno, "key contains whitespace");
            if (cfg.entries_.contains(key)) cfg.fail(lineno, "duplicate key '" + key + "'");
            cfg.entries_[key] = {value, lineno};
        }
        return cfg;
    }

    static Config parse_string(const std::string& text, const std::string& source = "<string>") {
        std::istringstream in(text);
        return parse(in, source);
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError(path + ": cannot open configuration file");
        return parse(in, path);
    }

    bool has(const std::string& key) const { return entries_.contains(key); }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        return has(key) ? raw(key) : fallback;
    }
    std::string require_string(const std::string& key) const {
        if (!has(key)) throw ConfigError(source_ + ": missing required key '" + key + "'");
        return raw(key);
    }

    double get_double(const std::string& key, double fallback) const {
        return has(key) ? to_double(key, raw(key)) : fallback;
    }
    int get_int(const std::string& key, int fallback) const {
        if (!has(key)) return fallback;
        const std::string& v = raw(key);
        int out = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || ptr != v.data() + v.size()) fail(line_of(key), "'" + key + "' expects an integer, got '" + v + "'");
        return out;
    }

    /// Comma-separated pair such as "0.6, 0.55".
    std::pair<double, double> get_pair(const std::string& key, std::pair<double, double> fallback) const {
        if (!has(key)) return fallback;
        const std::string& v = raw(key);
        const auto comma = v.find(',');
        if (comma == std::string::npos) fail(line_of(key), "'" + key + "' expects two comma-separated numbers");
        return {to_double(key, trim(v.substr(0, comma))), to_double(key, trim(v.substr(comma + 1)))};
    }

    /// Throws on keys that no lookup has touched.
    void reject_unknown() const {
        for (const auto& [key, entry] : entries_)
            if (!used_.contains(key)) fail(entry.line, "unknown key '" + key + "'");
    }

    [[noreturn]] void fail(int line, const std::string& message) const {
        throw ConfigError(source_ + ":" + std::to_string(line) + ": " + message);
    }

    int line_of(const std::string& key) const { return entries_.at(key).line; }
    const std::string& source() const { return source_; }

private:
    struct Entry {
        std::string value;
        int line;
    };

    const std::string& raw(const std::string& key) const {
        used_.insert(key);
        return entries_.at(key).value;
    }

    double to_double(const std::string& key, const std::string& v) const {
        double out = 0.0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
            fail(line_of(key), "'" + key + "' expects a number, got '" + v + "'");
        return out;
    }

    static std::string trim(std::string_view s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return std::string(s.substr(b, e - b + 1));
    }

    std::string source_;
    std::map<std::string, Entry> entries_;
    mutable std::set<std::string> used_;
};

}  // namespace piezoplate
