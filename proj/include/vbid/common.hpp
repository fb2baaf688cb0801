// Shared error types, seeding, hashing and logging for the vbid toolkit.
#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vbid {

// Exit codes used by the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 2,
    kExitDataError = 3,
    kExitTrainingDivergence = 4,
    kExitIdentificationError = 5,
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainingDivergence : std::runtime_error {
    explicit TrainingDivergence(std::size_t epoch, const std::string& what)
        : std::runtime_error("training diverged at epoch " + std::to_string(epoch) + ": " + what),
          epoch(epoch) {}
    std::size_t epoch;
};

struct IdentificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// FNV-1a, used both as a content fingerprint for manifests and as a seed
// mixer. Not cryptographic.
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a64(s.data(), s.size(), h);
}

// Derives independent stream seeds from a base seed so that every stage and
// every per-signal worker draws from its own deterministic stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index = 0) {
    std::uint64_t h = fnv1a64(&base, sizeof base);
    h = fnv1a64(tag, h);
    h = fnv1a64(&index, sizeof index, h);
    return h;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

// Minimal stderr logger; level comes from the VBIDENT_LOG environment
// variable (error, warn, info, debug). Default: warn.
enum class LogLevel : int { error = 0, warn = 1, info = 2, debug = 3 };

inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("VBIDENT_LOG");
        if (!env) return LogLevel::warn;
        std::string_view s{env};
        if (s == "error") return LogLevel::error;
        if (s == "warn") return LogLevel::warn;
        if (s == "info") return LogLevel::info;
        if (s == "debug") return LogLevel::debug;
        return LogLevel::warn;
    }();
    return level;
}

inline void log(LogLevel lvl, const std::string& msg) {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (static_cast<int>(lvl) <= static_cast<int>(log_level()))
        std::fprintf(stderr, "[vbid:%s] %s\n", names[static_cast<int>(lvl)], msg.c_str());
}

}  // namespace vbid
