#pragma once

#include <openssl/evp.h>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace hetbel {

inline constexpr const char* kVersion = "1.0.0";

/// Hex SHA-256 of a byte string (links against OpenSSL's libcrypto).
inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

struct RunManifest {
    std::string version = kVersion;
    std::string experiment;
    std::uint64_t seed = 0;
    std::string config;  ///< serialized ExperimentConfig
    std::vector<std::pair<std::string, std::string>> checksums;  ///< file, sha256
    double runtime_seconds = 0.0;

    /// Same `key = value` text format as the config; the config echo is nested under `config.`.
    std::string str() const {
        std::string s;
        s += "manifest.version = " + version + "\n";
        s += "manifest.experiment = " + experiment + "\n";
        s += "manifest.seed = " + std::to_string(seed) + "\n";
        s += "manifest.runtime_seconds = " + detail::format_double(runtime_seconds) + "\n";
        for (const auto& [f, h] : checksums) s += "checksum." + f + " = " + h + "\n";
        std::stringstream ss(config);
        std::string line;
        while (std::getline(ss, line))
            if (!line.empty()) s += "config." + line + "\n";
        return s;
    }

    static RunManifest parse(const std::string& text) {
        RunManifest m;
        m.version.clear();
        std::stringstream ss(text);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(ss, line)) {
            ++lineno;
            const std::string t = detail::trim(line);
            if (t.empty() || t[0] == '#') continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos) throw ConfigError("manifest line " + std::to_string(lineno) + ": expected key = value");
            const std::string k = detail::trim(std::string_view(t).substr(0, eq));
            const std::string v = detail::trim(std::string_view(t).substr(eq + 1));
            if (k == "manifest.version") m.version = v;
            else if (k == "manifest.experiment") m.experiment = v;
            else if (k == "manifest.seed") m.seed = detail::parse_u64(k, v);
            else if (k == "manifest.runtime_seconds") m.runtime_seconds = detail::parse_double(k, v);
            else if (k.rfind("checksum.", 0) == 0) m.checksums.emplace_back(k.substr(9), v);
            else if (k.rfind("config.", 0) == 0) m.config += k.substr(7) + " = " + v + "\n";
            else throw ConfigError("unknown manifest key '" + k + "'");
        }
        if (m.config.empty()) throw ConfigError("manifest has no config section");
        return m;
    }

    static RunManifest load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot read manifest '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }
};

}  // namespace hetbel
