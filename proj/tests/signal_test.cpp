#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "vbid/signal.hpp"

using namespace vbid;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

}  // namespace

TEST(LoadSignal, ParsesOneValuePerRow) {
    const std::string p = temp_path("sig_basic.csv");
    write_file(p, "0.0\n0.5\n-0.5\n");
    RegulationSignal s = load_signal(p, 1.0);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.samples[0], 0.0);
    EXPECT_EQ(s.samples[1], 0.5);
    EXPECT_EQ(s.samples[2], -0.5);
    EXPECT_FALSE(s.normalized);
    EXPECT_EQ(s.duration_s(), 3.0);
}

TEST(LoadSignal, HonorsNormalizedHeaderComment) {
    const std::string p = temp_path("sig_norm.csv");
    write_file(p, "# normalized=true\n0.1\n-0.2\n");
    EXPECT_TRUE(load_signal(p, 1.0).normalized);
}

TEST(LoadSignal, ToleratesOneColumnHeaderRow) {
    const std::string p = temp_path("sig_header.csv");
    write_file(p, "u_kw\n1.0\n2.0\n");
    EXPECT_EQ(load_signal(p, 1.0).size(), 2u);
}

TEST(LoadSignal, ReportsParseErrorsWithRowNumber) {
    const std::string p = temp_path("sig_bad.csv");
    write_file(p, "1.0\nnot_a_number\n2.0\n");
    try {
        load_signal(p, 1.0);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
    }
}

TEST(LoadSignal, EmptyFileRejected) {
    const std::string p = temp_path("sig_empty.csv");
    write_file(p, "");
    try {
        load_signal(p, 1.0);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("no samples"), std::string::npos);
    }
}

TEST(LoadSignal, MissingFileAndBadDtRejected) {
    EXPECT_THROW(load_signal(temp_path("nope_does_not_exist.csv"), 1.0), DataError);
    EXPECT_THROW(load_signal(temp_path("sig_basic.csv"), 0.0), ConfigError);
}

TEST(LoadSignal, TwoHourFileAtOneSecond) {
    const std::string p = temp_path("sig_7200.csv");
    std::string body;
    for (int i = 0; i < 7200; ++i) body += "0.25\n";
    write_file(p, body);
    RegulationSignal s = load_signal(p, 1.0);
    EXPECT_EQ(s.size(), 7200u);
    EXPECT_EQ(s.duration_s(), 7200.0);
}

TEST(SaveSignal, RoundTripsThroughCsv) {
    RegulationSignal s;
    s.dt_s = 2.0;
    s.normalized = true;
    s.samples = {0.125, -0.5, 0.9375};
    const std::string p = temp_path("sig_rt.csv");
    save_signal(p, s);
    RegulationSignal back = load_signal(p, 2.0);
    ASSERT_EQ(back.size(), s.size());
    EXPECT_TRUE(back.normalized);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(back.samples[i], s.samples[i]);
}

TEST(ScaleSignal, ZeroStaysZeroAndUnityScalesLinearly) {
    RegulationSignal s;
    s.normalized = true;
    s.samples = {0.0, 1.0, -1.0};
    RegulationSignal out = scale_signal(s, 500.0, 0.2);
    EXPECT_EQ(out.samples[0], 0.0);
    EXPECT_EQ(out.samples[1], 100.0);
    EXPECT_EQ(out.samples[2], -100.0);
    EXPECT_FALSE(out.normalized);
}

TEST(ScaleSignal, RoundTripWithinTolerance) {
    RegulationSignal s;
    s.normalized = true;
    s.samples = {0.3, -0.7, 0.11, 0.999};
    RegulationSignal back = unscale_signal(scale_signal(s, 137.0, 0.35), 137.0, 0.35);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(back.samples[i], s.samples[i], 1e-12);
}

TEST(ScaleSignal, RejectsUnnormalizedInput) {
    RegulationSignal s;
    s.normalized = false;
    s.samples = {1.0};
    EXPECT_THROW(scale_signal(s, 100.0, 0.2), DataError);
    RegulationSignal n;
    n.normalized = true;
    n.samples = {1.0};
    EXPECT_THROW(scale_signal(n, 100.0, 0.0), ConfigError);
    EXPECT_THROW(scale_signal(n, 100.0, 1.5), ConfigError);
}

TEST(SynthSignal, DeterministicUnderSeed) {
    RegulationSignal a = synth_signal(42, 600.0, 1.0);
    RegulationSignal b = synth_signal(42, 600.0, 1.0);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.samples[i], b.samples[i]);
    RegulationSignal c = synth_signal(43, 600.0, 1.0);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs |= (a.samples[i] != c.samples[i]);
    EXPECT_TRUE(differs);
}

TEST(SynthSignal, ZeroMeanAndBounded) {
    for (std::uint64_t seed : {1u, 7u, 99u}) {
        RegulationSignal s = synth_signal(seed, 7200.0, 1.0);
        EXPECT_EQ(s.size(), 7200u);
        EXPECT_TRUE(s.normalized);
        const double mean =
            std::accumulate(s.samples.begin(), s.samples.end(), 0.0) / double(s.size());
        EXPECT_LT(std::abs(mean), 0.05);
        for (double v : s.samples) EXPECT_LE(std::abs(v), 1.0);
    }
}

TEST(SynthSignal, RejectsDegenerateArguments) {
    EXPECT_THROW(synth_signal(1, 0.5, 1.0), ConfigError);
    EXPECT_THROW(synth_signal(1, 100.0, 0.0), ConfigError);
    EXPECT_THROW(synth_signal(1, 100.0, 1.0, 0.0), ConfigError);
}
