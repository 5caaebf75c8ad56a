#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cortexlift {

using KvMap = std::map<std::string, std::string>;

// Flat key=value text: one pair per line, '#' comments, blank lines ignored.
inline KvMap parse_kv(const std::string& text) {
    KvMap kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const char* ws = " \t\r";
        const auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("line " + std::to_string(lineno) + ": expected key=value");
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

inline KvMap load_kv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_kv(buf.str());
}

inline void save_kv_text(const std::string& text, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

inline std::string kv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double kv_get_num(const KvMap& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("missing key: " + key);
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(it->second, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("bad number for key " + key + ": " + it->second);
    }
    if (pos != it->second.size())
        throw std::runtime_error("bad number for key " + key + ": " + it->second);
    return v;
}

inline double kv_get_num(const KvMap& kv, const std::string& key, double fallback) {
    return kv.count(key) ? kv_get_num(kv, key) : fallback;
}

inline std::string kv_get_str(const KvMap& kv, const std::string& key,
                              const std::string& fallback = "") {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

}  // namespace cortexlift
