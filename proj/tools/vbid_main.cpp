// vbident: simulate thermostatic-load ensembles, learn a virtual-battery
// state, and extract the parameter vector phi = [a, C1, C2, x0, P-, P+].
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vbid/pipeline.hpp"

namespace {

struct CliState {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::size_t> signals;
    std::optional<std::size_t> epochs;
    std::optional<double> lr;
    std::optional<std::size_t> window;
    std::string source_model;
    std::optional<std::size_t> new_device_count;
};

vbid::RunConfig effective_config(const CliState& s) {
    vbid::RunConfig cfg =
        s.config_path.empty() ? vbid::RunConfig{} : vbid::load_config(s.config_path);
    if (s.seed) cfg.seed = *s.seed;
    if (s.workers) cfg.runtime.workers = *s.workers;
    if (s.signals) {
        cfg.signals.count = *s.signals;
        cfg.signals.files.clear();
    }
    if (s.lr) {
        cfg.sae.lr = *s.lr;
        cfg.forecaster.lr = *s.lr;
    }
    if (s.window) cfg.forecaster.window_d = *s.window;
    if (s.new_device_count) cfg.transfer.new_device_count = *s.new_device_count;
    return cfg;
}

void add_common(CLI::App* cmd, CliState& s) {
    cmd->add_option("--config", s.config_path, "JSON config file (defaults used when omitted)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", s.out_dir, "artifact directory (created if missing)");
    cmd->add_option("--seed", s.seed, "override the config seed");
    cmd->add_option("--workers", s.workers, "worker threads for per-signal stages (0 = cores)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"virtual-battery identification for thermostatic load ensembles"};
    app.require_subcommand(1);
    CliState s;

    CLI::App* simulate = app.add_subcommand(
        "simulate", "simulate ensemble tracking runs and write the dataset");
    add_common(simulate, s);
    simulate->add_option("--signals", s.signals,
                         "number of synthetic regulation signals (overrides config files)");

    CLI::App* train_sae = app.add_subcommand(
        "train-sae", "train the stacked autoencoder on the dataset");
    add_common(train_sae, s);
    train_sae->add_option("--epochs", s.epochs, "total training epochs");
    train_sae->add_option("--lr", s.lr, "learning rate");
    train_sae->add_option("--source-model", s.source_model,
                          "fine-tune this model instead of training from scratch");

    CLI::App* transfer = app.add_subcommand(
        "transfer", "grow a trained autoencoder to a resized ensemble");
    add_common(transfer, s);
    transfer->add_option("--source-model", s.source_model,
                         "trained autoencoder to grow (default: <out>/sae.vbnn)");
    transfer->add_option("--new-device-count", s.new_device_count,
                         "device count of the target ensemble");

    CLI::App* train_forecaster = app.add_subcommand(
        "train-forecaster", "train the conv+LSTM state forecaster in two stages");
    add_common(train_forecaster, s);
    train_forecaster->add_option("--epochs", s.epochs, "stage-1 epochs (stage 2 from config)");
    train_forecaster->add_option("--lr", s.lr, "learning rate");
    train_forecaster->add_option("--window", s.window, "history depth d of the input window");

    CLI::App* identify = app.add_subcommand(
        "identify", "extract the virtual-battery parameter vector phi");
    add_common(identify, s);

    CLI::App* report = app.add_subcommand(
        "report", "write reconstruction-error and loss-curve data files");
    add_common(report, s);

    try {
        app.parse(argc, argv);

        vbid::RunConfig cfg = effective_config(s);
        if (simulate->parsed()) {
            vbid::SimulateResult res = vbid::run_simulate(cfg, s.out_dir);
            std::printf("dataset: %zu rows x %zu cols, baseline %.3f kW, %zu/%zu signals failed\n",
                        res.dataset.m.rows, res.dataset.m.cols, res.baseline_kw,
                        res.failed_signals, res.dataset.segments.size());
        } else if (train_sae->parsed()) {
            if (s.epochs) cfg.sae.epochs = *s.epochs;
            vbid::SaeTrainResult res = vbid::run_train_sae(cfg, s.out_dir, s.source_model);
            std::printf("sae: %zu epochs (%zu pretrain), final loss %.6g\n",
                        res.loss_history.size(), res.pretrain_epochs,
                        res.loss_history.empty() ? 0.0 : res.loss_history.back());
        } else if (transfer->parsed()) {
            vbid::TransferReport rep = vbid::run_transfer(cfg, s.out_dir, s.source_model,
                                                          s.new_device_count.value_or(0));
            std::printf("transfer: %zu -> %zu devices, %zu pretrained + %zu new parameters\n",
                        rep.source_devices, rep.target_devices, rep.pretrained_parameters,
                        rep.new_parameters);
        } else if (train_forecaster->parsed()) {
            if (s.epochs) cfg.forecaster.stage1_epochs = *s.epochs;
            vbid::ForecasterTrainResult res = vbid::run_train_forecaster(cfg, s.out_dir);
            std::printf("forecaster: %zu windows, stage1 loss %.6g, stage2 loss %.6g\n",
                        res.windows, res.stage1.final_loss(), res.stage2.final_loss());
        } else if (identify->parsed()) {
            vbid::IdentifyResult res = vbid::run_identify(cfg, s.out_dir);
            std::printf("phi: a=%.6g 1/h, C1=%.6g kWh, C2=%.6g kWh, x0=%.6g kWh, "
                        "P-=%.6g kW, P+=%.6g kW\n",
                        res.phi.a, res.phi.C1, res.phi.C2, res.phi.x0, res.phi.P_minus,
                        res.phi.P_plus);
        } else if (report->parsed()) {
            vbid::run_report(cfg, s.out_dir);
            std::printf("report written to %s\n", s.out_dir.c_str());
        }
        return vbid::kExitOk;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? vbid::kExitOk : vbid::kExitConfigError;
    } catch (const vbid::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return vbid::kExitConfigError;
    } catch (const vbid::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return vbid::kExitDataError;
    } catch (const vbid::TrainingDivergence& e) {
        std::fprintf(stderr, "training divergence: %s\n", e.what());
        return vbid::kExitTrainingDivergence;
    } catch (const vbid::IdentificationError& e) {
        std::fprintf(stderr, "identification error: %s\n", e.what());
        return vbid::kExitIdentificationError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
