#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args, const fs::path& scratch) {
    fs::create_directories(scratch);
    const fs::path out_file = scratch / "stdout.txt";
    const fs::path err_file = scratch / "stderr.txt";
    const std::string cmd = std::string(VBID_CLI_PATH) + " " + args + " > " + out_file.string() +
                            " 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::current_path() / "cli_scratch" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// Small but complete run: a handful of devices, short horizons, few epochs.
std::string write_tiny_config(const fs::path& dir) {
    const fs::path p = dir / "config.json";
    std::ofstream out(p);
    out << R"({
  "seed": 11,
  "ensemble": {"kind": "ac", "device_count": 6, "setpoint_spread": 0.5},
  "signals": {"count": 2, "horizon_s": 300, "dt_s": 1},
  "sae": {"epochs": 12, "lr": 2e-6, "batch_size": 32},
  "forecaster": {"window_d": 4, "stage1_epochs": 6, "stage2_epochs": 3, "lr": 1e-3},
  "identification": {"tol_kw": 2.0, "limits_horizon_s": 120}
})";
    return p.string();
}

}  // namespace

TEST(Cli, HelpExitsCleanlyAndListsSubcommands) {
    const fs::path dir = fresh_dir("help");
    CliResult r = run_cli("--help", dir);
    EXPECT_EQ(r.code, 0);
    for (const char* sub :
         {"simulate", "train-sae", "transfer", "train-forecaster", "identify", "report"})
        EXPECT_NE(r.out.find(sub), std::string::npos) << sub << "\n" << r.out;
}

TEST(Cli, MissingSubcommandAndBadFlagsAreUsageErrors) {
    const fs::path dir = fresh_dir("usage");
    EXPECT_EQ(run_cli("", dir).code, 2);
    EXPECT_EQ(run_cli("simulate --frobnicate", dir).code, 2);
    EXPECT_EQ(run_cli("simulate --config /nonexistent/config.json", dir).code, 2);
}

TEST(Cli, UnknownConfigKeyIsAConfigError) {
    const fs::path dir = fresh_dir("badkey");
    const fs::path cfg = dir / "bad.json";
    std::ofstream(cfg) << R"({"sea": {"epochs": 5}})";
    CliResult r = run_cli("simulate --config " + cfg.string() + " --out " + (dir / "out").string(),
                          dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("unknown key 'sea'"), std::string::npos) << r.err;

    const fs::path garbled = dir / "garbled.json";
    std::ofstream(garbled) << "{not json";
    EXPECT_EQ(run_cli("simulate --config " + garbled.string(), dir).code, 2);
}

TEST(Cli, IdentifyWithoutArtifactsNamesTheMissingStage) {
    const fs::path dir = fresh_dir("missing");
    CliResult r = run_cli("identify --out " + (dir / "empty").string(), dir);
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("missing artifact"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("train-sae"), std::string::npos) << r.err;

    CliResult r2 = run_cli("train-forecaster --out " + (dir / "empty2").string(), dir);
    EXPECT_EQ(r2.code, 3);
    EXPECT_NE(r2.err.find("missing artifact"), std::string::npos) << r2.err;
    EXPECT_NE(r2.err.find("simulate"), std::string::npos) << r2.err;
}

TEST(Cli, FullPipelineWritesArtifactsDeterministically) {
    const fs::path dir = fresh_dir("pipeline");
    const std::string cfg = write_tiny_config(dir);

    auto run_pipeline = [&](const fs::path& out) {
        for (const char* stage : {"simulate", "train-sae", "train-forecaster", "identify",
                                  "report"}) {
            CliResult r = run_cli(std::string(stage) + " --config " + cfg + " --out " +
                                      out.string() + " --workers 2",
                                  dir);
            ASSERT_EQ(r.code, 0) << stage << " failed:\n" << r.out << r.err;
        }
    };

    const fs::path out_a = dir / "a";
    run_pipeline(out_a);
    if (HasFatalFailure()) return;
    for (const char* f : {"dataset.vbds", "dataset_meta.json", "signal_0.csv", "signal_1.csv",
                          "sae.vbnn", "sae_loss.csv", "forecaster.vbnn", "forecaster_loss.csv",
                          "phi.json", "validation.json", "reconstruction_histogram.csv",
                          "reconstruction_devices.csv", "report.json", "manifest_simulate.json",
                          "manifest_identify.json"})
        EXPECT_TRUE(fs::exists(out_a / f)) << f;

    const fs::path out_b = dir / "b";
    run_pipeline(out_b);
    if (HasFatalFailure()) return;
    EXPECT_EQ(slurp(out_a / "phi.json"), slurp(out_b / "phi.json"));
    EXPECT_EQ(slurp(out_a / "dataset.vbds"), slurp(out_b / "dataset.vbds"));
    EXPECT_FALSE(slurp(out_a / "phi.json").empty());
}

TEST(Cli, SeedOverrideChangesTheDataset) {
    const fs::path dir = fresh_dir("seed");
    const std::string cfg = write_tiny_config(dir);
    const fs::path out_a = dir / "a", out_b = dir / "b";
    ASSERT_EQ(run_cli("simulate --config " + cfg + " --out " + out_a.string(), dir).code, 0);
    ASSERT_EQ(
        run_cli("simulate --config " + cfg + " --out " + out_b.string() + " --seed 99", dir).code,
        0);
    EXPECT_NE(slurp(out_a / "dataset.vbds"), slurp(out_b / "dataset.vbds"));
}
