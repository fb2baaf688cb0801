#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "vbid/config.hpp"
#include "vbid/dataset.hpp"
#include "vbid/manifest.hpp"
#include "vbid/model_io.hpp"

using namespace vbid;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

Trajectory toy_trajectory(std::size_t steps, std::size_t n, double temp0, double agg) {
    Trajectory tr;
    tr.n_devices = n;
    tr.temperatures = Matrix(steps, n);
    tr.power_draws = Matrix(steps, n);
    for (std::size_t s = 0; s < steps; ++s)
        for (std::size_t i = 0; i < n; ++i) tr.temperatures(s, i) = temp0 + double(s) + double(i);
    tr.aggregate.assign(steps, agg);
    tr.target.assign(steps, agg);
    return tr;
}

}  // namespace

TEST(DatasetLayout, SingleDeviceTenStepsIsTenByFive) {
    Ensemble e = make_ac_ensemble(AcParams{}, 1, 90.0, 1);
    Dataset ds = build_dataset({toy_trajectory(10, 1, 70.0, 5.0)}, e);
    EXPECT_EQ(ds.m.rows, 10u);
    EXPECT_EQ(ds.m.cols, 5u);  // 2*1 + 3
    EXPECT_EQ(ds.m(0, ds.temperature_col(0)), 70.0);
    EXPECT_EQ(ds.m(0, ds.setpoint_col(0)), 72.0);
    EXPECT_EQ(ds.m(0, ds.eta_col()), 2.5);
    EXPECT_EQ(ds.m(0, ds.capacitance_col()), 0.75);
    EXPECT_EQ(ds.m(0, ds.aggregate_col()), 5.0);
}

TEST(DatasetLayout, HundredDevicesGiveTwoHundredThreeColumns) {
    Ensemble e = make_ac_ensemble(AcParams{}, 100, 90.0, 2);
    Dataset ds = build_dataset({toy_trajectory(3, 100, 70.0, 120.0)}, e);
    EXPECT_EQ(ds.m.cols, 203u);
}

TEST(DatasetLayout, RowsAreSummedStepsAcrossSignalsInOrder) {
    Ensemble e = make_ac_ensemble(AcParams{}, 2, 90.0, 3);
    Trajectory a = toy_trajectory(7, 2, 70.0, 1.0);
    Trajectory b = toy_trajectory(4, 2, 80.0, 2.0);
    b.failure_step = 4;
    Dataset ds = build_dataset({a, b}, e, {"sig_a", "sig_b"});
    EXPECT_EQ(ds.m.rows, 11u);
    ASSERT_EQ(ds.segments.size(), 2u);
    EXPECT_EQ(ds.segments[0].signal_id, "sig_a");
    EXPECT_EQ(ds.segments[0].row_start, 0u);
    EXPECT_EQ(ds.segments[0].rows, 7u);
    EXPECT_FALSE(ds.segments[0].failed);
    EXPECT_EQ(ds.segments[1].row_start, 7u);
    EXPECT_TRUE(ds.segments[1].failed);
    EXPECT_EQ(ds.segments[1].failure_step, 4u);
    EXPECT_EQ(ds.m(7, ds.temperature_col(0)), 80.0);  // segment boundary
}

TEST(DatasetLayout, WaterHeaterEtaColumnIsOne) {
    Ensemble e = make_wh_ensemble(WhParams{}, 3, 70.0, 14.7, 4);
    Dataset ds = build_dataset({toy_trajectory(2, 3, 118.0, 9.0)}, e);
    EXPECT_EQ(ds.m(0, ds.eta_col()), 1.0);
    EXPECT_EQ(ds.m(0, ds.capacitance_col()), 0.1955);
}

TEST(DatasetLayout, MismatchedDeviceCountRejected) {
    Ensemble e = make_ac_ensemble(AcParams{}, 2, 90.0, 5);
    EXPECT_THROW(build_dataset({toy_trajectory(3, 4, 70.0, 1.0)}, e), DataError);
}

TEST(Vbds, RoundTripsBitExactly) {
    Matrix m(5, 3);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (double& v : m.v) v = u(rng);
    m(0, 0) = 0.1 + 0.2;  // classic non-representable value
    const std::string p = temp_path("round.vbds");
    save_vbds(p, m);
    Matrix back = load_vbds(p);
    ASSERT_EQ(back.rows, m.rows);
    ASSERT_EQ(back.cols, m.cols);
    for (std::size_t i = 0; i < m.v.size(); ++i) EXPECT_EQ(back.v[i], m.v[i]);
}

TEST(Vbds, WritesAreByteDeterministic) {
    Matrix m(4, 4);
    for (std::size_t i = 0; i < 16; ++i) m.v[i] = double(i) * 0.37;
    const std::string p1 = temp_path("det1.vbds"), p2 = temp_path("det2.vbds");
    save_vbds(p1, m);
    save_vbds(p2, m);
    EXPECT_EQ(slurp(p1), slurp(p2));
}

TEST(Vbds, RejectsWrongMagicAndTruncation) {
    const std::string p = temp_path("bad.vbds");
    {
        std::ofstream out(p, std::ios::binary);
        out << "NOPE";
    }
    EXPECT_THROW(load_vbds(p), DataError);
    Matrix m(2, 2);
    save_vbds(p, m);
    std::filesystem::resize_file(p, 20);  // cut into the payload
    EXPECT_THROW(load_vbds(p), DataError);
    EXPECT_THROW(load_vbds(temp_path("missing.vbds")), DataError);
}

TEST(Csv, MatrixRoundTripsThroughCsv) {
    Matrix m(3, 2);
    m(0, 0) = 1.5; m(0, 1) = -2.25;
    m(1, 0) = 1.0 / 3.0; m(1, 1) = 0.0;
    m(2, 0) = 1e-17; m(2, 1) = 42.0;
    const std::string p = temp_path("m.csv");
    save_csv(p, m, {"a", "b"});
    Matrix back = load_csv(p);
    ASSERT_EQ(back.rows, 3u);
    ASSERT_EQ(back.cols, 2u);
    for (std::size_t i = 0; i < m.v.size(); ++i) EXPECT_EQ(back.v[i], m.v[i]);
}

TEST(Vbnn, NetworkRoundTripsAllLayerKinds) {
    Network net;
    net.layers.push_back(make_conv1d(1, 3, 3, 1, 1, Activation::relu));
    net.layers.push_back(PoolLayer{2, 2});
    net.layers.push_back(make_lstm(3, 4));
    net.layers.push_back(make_dense(4, 2, Activation::tanh));
    init_weights(net, 7);
    const std::string p = temp_path("net.vbnn");
    save_network(p, net, ModelKind::generic);
    LoadedModel lm = load_network(p);
    EXPECT_EQ(lm.kind, ModelKind::generic);
    ASSERT_EQ(lm.net.layers.size(), net.layers.size());
    EXPECT_EQ(parameter_count(lm.net), parameter_count(net));
    bool equal = true;
    for_each_param_pair(lm.net, net, [&](Tensor& a, const Tensor& b) {
        for (std::size_t i = 0; i < a.size(); ++i) equal &= (a[i] == b[i]);
    });
    EXPECT_TRUE(equal);
    // Behavioral equality on a random input.
    Tensor x(12);
    std::mt19937_64 rng(8);
    for (double& v : x.data()) v = std::uniform_real_distribution<double>(-1, 1)(rng);
    Tensor y0 = forward(net, x), y1 = forward(lm.net, x);
    for (std::size_t i = 0; i < y0.size(); ++i) EXPECT_EQ(y0[i], y1[i]);
}

TEST(Vbnn, RejectsCorruptContainers) {
    const std::string p = temp_path("bad.vbnn");
    {
        std::ofstream out(p, std::ios::binary);
        out << "JUNKJUNKJUNK";
    }
    EXPECT_THROW(load_network(p), DataError);
    EXPECT_THROW(load_network(temp_path("missing.vbnn")), DataError);
}

TEST(Config, DefaultsSurviveJsonRoundTrip) {
    RunConfig cfg;
    cfg.seed = 99;
    cfg.ensemble.device_count = 12;
    cfg.signals.horizon_s = 1234.0;
    json j = to_json(cfg);
    RunConfig back = parse_config(j);
    EXPECT_EQ(back.seed, 99u);
    EXPECT_EQ(back.ensemble.device_count, 12u);
    EXPECT_EQ(back.signals.horizon_s, 1234.0);
    EXPECT_EQ(back.sae.epochs, cfg.sae.epochs);
    EXPECT_EQ(back.forecaster.window_d, cfg.forecaster.window_d);
}

TEST(Config, UnknownKeysRejected) {
    json j;
    j["seed"] = 1;
    j["definitely_not_a_key"] = true;
    EXPECT_THROW(parse_config(j), ConfigError);
    json nested;
    nested["ensemble"] = {{"device_count", 5}, {"bogus", 1}};
    EXPECT_THROW(parse_config(nested), ConfigError);
}

TEST(Config, KindSelectionAndValidation) {
    json j;
    j["ensemble"] = {{"kind", "wh"}};
    RunConfig cfg = parse_config(j);
    EXPECT_EQ(cfg.ensemble.kind, DeviceKind::wh);
    EXPECT_EQ(cfg.ensemble.ambient_temp, kDefaultWhAmbient);
    json bad;
    bad["ensemble"] = {{"kind", "toaster"}};
    EXPECT_THROW(parse_config(bad), ConfigError);
}

TEST(Config, LoadsFromFileAndReportsMissing) {
    const std::string p = temp_path("cfg.json");
    {
        std::ofstream out(p);
        out << R"({"seed": 5, "ensemble": {"device_count": 3}})";
    }
    RunConfig cfg = load_config(p);
    EXPECT_EQ(cfg.seed, 5u);
    EXPECT_EQ(cfg.ensemble.device_count, 3u);
    EXPECT_THROW(load_config(temp_path("missing.json")), ConfigError);
}

TEST(Manifest, HashesAreStableAcrossRewrites) {
    const std::string f = temp_path("artifact.bin");
    {
        std::ofstream out(f, std::ios::binary);
        out << "payload-123";
    }
    Manifest m;
    m.stage = "simulate";
    m.seed = 11;
    m.config = json{{"k", "v"}};
    add_file(m.outputs, f);
    const std::string p1 = temp_path("man1.json"), p2 = temp_path("man2.json");
    write_manifest(p1, m);
    write_manifest(p2, m);
    EXPECT_EQ(slurp(p1), slurp(p2));  // no timestamps, no ordering jitter
    json parsed = json::parse(slurp(p1));
    EXPECT_EQ(parsed.at("schema_version"), 1);
    EXPECT_EQ(parsed.at("stage"), "simulate");
    ASSERT_EQ(parsed.at("outputs").size(), 1u);
    EXPECT_EQ(parsed.at("outputs")[0].at("fnv1a64").get<std::string>().size(), 16u);
}

TEST(Manifest, HashChangesWithContent) {
    const std::string f = temp_path("artifact2.bin");
    {
        std::ofstream out(f, std::ios::binary);
        out << "AAAA";
    }
    const std::uint64_t h1 = file_fnv1a64(f);
    {
        std::ofstream out(f, std::ios::binary);
        out << "AAAB";
    }
    EXPECT_NE(file_fnv1a64(f), h1);
}
