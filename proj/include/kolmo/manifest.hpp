// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>  // vendored nlohmann/json

namespace kolmo {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// What a CLI run consumed and produced. Two runs with equal manifests
/// produce the same output bytes.
struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::vector<std::string>> flags;
    std::map<std::string, std::string> input_hashes;  // input name -> hash of its bytes
    std::string tool_version{kToolVersion};
    std::string output_hash;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["subcommand"] = subcommand;
        j["flags"] = flags;
        j["input_hashes"] = input_hashes;
        j["tool_version"] = tool_version;
        j["output_hash"] = output_hash;
        return j;
    }
};

} // namespace kolmo
