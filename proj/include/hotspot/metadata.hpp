#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hotspot/csv.hpp"
#include "hotspot/version.hpp"

namespace hotspot {

// FNV-1a 64-bit. A reproducibility fingerprint for run metadata, not a
// cryptographic digest.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

inline std::string hash_file(const std::string& path) {
    return fnv1a64_hex(read_text_file(path));
}

// Common skeleton for per-run metadata reports. Deliberately excludes
// wall-clock time and worker count: outputs are contractually identical
// across reruns and thread counts.
inline nlohmann::json base_report(const std::string& subcommand) {
    nlohmann::json j;
    j["tool"] = kToolName;
    j["tool_version"] = kToolVersion;
    j["subcommand"] = subcommand;
    return j;
}

}  // namespace hotspot
