// Regulation signals: CSV ingestion, scaling to an ensemble's rated power,
// and seeded synthetic generation.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "vbid/common.hpp"

namespace vbid {

struct RegulationSignal {
    double dt_s = 1.0;            // sample interval, seconds
    std::vector<double> samples;  // kW deviations, or [-1, 1] when normalized
    bool normalized = false;
    std::string source;  // "file:<path>" or "synthetic:<seed>"

    std::size_t size() const { return samples.size(); }
    double duration_s() const { return dt_s * double(samples.size()); }
};

namespace detail {

inline bool parse_double(const std::string& s, double& out) {
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r' || *end == ',') ++end;
    return *end == '\0';
}

}  // namespace detail

// One value per row. A leading comment line may declare
// `# normalized=true|false`; a single non-numeric first row is treated as a
// column header and skipped.
inline RegulationSignal load_signal(const std::string& path, double dt_s) {
    if (!(dt_s > 0)) throw ConfigError("signal dt must be > 0");
    std::ifstream in(path);
    if (!in) throw DataError("cannot open signal file: " + path);
    RegulationSignal sig;
    sig.dt_s = dt_s;
    sig.source = "file:" + path;
    std::string line;
    std::size_t row = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++row;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;  // blank row
        if (line[start] == '#') {
            if (line.find("normalized=true") != std::string::npos) sig.normalized = true;
            if (line.find("normalized=false") != std::string::npos) sig.normalized = false;
            continue;
        }
        double v = 0.0;
        if (!detail::parse_double(line.substr(start), v)) {
            if (header_allowed && sig.samples.empty()) {
                header_allowed = false;  // tolerate one column-header row
                continue;
            }
            throw DataError("signal parse error at row " + std::to_string(row) + " of " + path);
        }
        if (!std::isfinite(v))
            throw DataError("non-finite signal value at row " + std::to_string(row) + " of " + path);
        sig.samples.push_back(v);
    }
    if (sig.samples.empty()) throw DataError("no samples in signal file: " + path);
    return sig;
}

inline void save_signal(const std::string& path, const RegulationSignal& sig) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write signal file: " + path);
    out << "# normalized=" << (sig.normalized ? "true" : "false") << "\n";
    out.precision(17);
    for (double v : sig.samples) out << v << "\n";
}

// Converts a normalized [-1, 1] shape into kW deviations around the
// ensemble baseline: u <- u * fraction * rated. Linear and invertible.
inline RegulationSignal scale_signal(const RegulationSignal& sig, double ensemble_rated_kw,
                                     double fraction) {
    if (!sig.normalized) throw DataError("scale_signal: input signal is not normalized");
    if (!(fraction > 0) || !(fraction <= 1)) throw ConfigError("scale fraction must be in (0, 1]");
    if (!(ensemble_rated_kw > 0)) throw ConfigError("ensemble rated power must be > 0");
    RegulationSignal out = sig;
    out.normalized = false;
    for (double& v : out.samples) v *= fraction * ensemble_rated_kw;
    return out;
}

inline RegulationSignal unscale_signal(const RegulationSignal& sig, double ensemble_rated_kw,
                                       double fraction) {
    if (sig.normalized) throw DataError("unscale_signal: signal is already normalized");
    if (!(fraction > 0) || !(fraction <= 1)) throw ConfigError("scale fraction must be in (0, 1]");
    if (!(ensemble_rated_kw > 0)) throw ConfigError("ensemble rated power must be > 0");
    RegulationSignal out = sig;
    out.normalized = true;
    for (double& v : out.samples) v /= fraction * ensemble_rated_kw;
    return out;
}

// Seeded band-limited test signal: a handful of low-frequency sinusoids with
// random phases plus first-order-smoothed noise, centered to zero mean and
// scaled to peak 0.95. Same seed, same series.
inline RegulationSignal synth_signal(std::uint64_t seed, double duration_s, double dt_s,
                                     double bandwidth_hz = 0.005) {
    if (!(dt_s > 0) || duration_s < dt_s) throw ConfigError("synth_signal: duration >= dt > 0 required");
    if (!(bandwidth_hz > 0)) throw ConfigError("synth_signal: bandwidth must be > 0");
    const std::size_t n = std::size_t(std::llround(duration_s / dt_s));
    auto rng = make_rng(derive_seed(seed, "signal.synth"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    constexpr int kComponents = 6;
    double freq[kComponents], amp[kComponents], phase[kComponents];
    for (int k = 0; k < kComponents; ++k) {
        freq[k] = bandwidth_hz * (0.1 + 0.9 * unit(rng));
        amp[k] = 0.3 + 0.7 * unit(rng);
        phase[k] = 2.0 * M_PI * unit(rng);
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double rho = std::exp(-2.0 * M_PI * bandwidth_hz * dt_s);  // noise smoothing

    RegulationSignal sig;
    sig.dt_s = dt_s;
    sig.normalized = true;
    sig.source = "synthetic:" + std::to_string(seed);
    sig.samples.resize(n);
    double ar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = double(i) * dt_s;
        double v = 0.0;
        for (int k = 0; k < kComponents; ++k) v += amp[k] * std::sin(2.0 * M_PI * freq[k] * t + phase[k]);
        ar = rho * ar + (1.0 - rho) * gauss(rng);
        sig.samples[i] = v + 0.8 * ar;
    }
    double mean = 0.0;
    for (double v : sig.samples) mean += v;
    mean /= double(n);
    double peak = 0.0;
    for (double& v : sig.samples) {
        v -= mean;
        peak = std::max(peak, std::abs(v));
    }
    if (peak > 0)
        for (double& v : sig.samples) v *= 0.95 / peak;
    return sig;
}

}  // namespace vbid
