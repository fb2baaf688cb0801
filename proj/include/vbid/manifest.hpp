// Per-stage manifests: the effective config, the seed, and content hashes of
// every input and output file. No timestamps, so reruns with the same seed
// produce byte-identical manifests.
#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vbid/common.hpp"

namespace vbid {

inline std::uint64_t file_fnv1a64(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot hash missing file: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a64(buf, std::size_t(in.gcount()), h);
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct Manifest {
    std::string stage;
    std::uint64_t seed = 0;
    nlohmann::json config;  // effective config echo
    std::vector<std::pair<std::string, std::string>> inputs;   // path, fnv1a64 hex
    std::vector<std::pair<std::string, std::string>> outputs;
};

inline void add_file(std::vector<std::pair<std::string, std::string>>& list,
                     const std::string& path) {
    list.emplace_back(path, hash_hex(file_fnv1a64(path)));
}

inline void write_manifest(const std::string& path, const Manifest& m) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["stage"] = m.stage;
    j["seed"] = m.seed;
    j["config"] = m.config;
    j["inputs"] = nlohmann::json::array();
    for (const auto& [p, h] : m.inputs) j["inputs"].push_back({{"path", p}, {"fnv1a64", h}});
    j["outputs"] = nlohmann::json::array();
    for (const auto& [p, h] : m.outputs) j["outputs"].push_back({{"path", p}, {"fnv1a64", h}});
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace vbid
