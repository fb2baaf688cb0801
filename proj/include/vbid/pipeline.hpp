// Stage orchestration behind the CLI subcommands. Every stage reads/writes
// files under one output directory using fixed names, validates its inputs,
// and drops a manifest with content hashes.
#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vbid/common.hpp"
#include "vbid/config.hpp"
#include "vbid/dataset.hpp"
#include "vbid/ensemble.hpp"
#include "vbid/forecaster.hpp"
#include "vbid/manifest.hpp"
#include "vbid/model_io.hpp"
#include "vbid/net2net.hpp"
#include "vbid/sae.hpp"
#include "vbid/signal.hpp"
#include "vbid/vb.hpp"

namespace vbid {

struct ArtifactPaths {
    std::string dir;

    std::string dataset() const { return dir + "/dataset.vbds"; }
    std::string dataset_meta() const { return dir + "/dataset_meta.json"; }
    std::string signal_csv(std::size_t k) const {
        return dir + "/signal_" + std::to_string(k) + ".csv";
    }
    std::string sae_model() const { return dir + "/sae.vbnn"; }
    std::string sae_history() const { return dir + "/sae_loss.csv"; }
    std::string transfer_model() const { return dir + "/sae_transfer.vbnn"; }
    std::string transfer_report() const { return dir + "/transfer_report.json"; }
    std::string forecaster_model() const { return dir + "/forecaster.vbnn"; }
    std::string forecaster_history() const { return dir + "/forecaster_loss.csv"; }
    std::string phi() const { return dir + "/phi.json"; }
    std::string validation() const { return dir + "/validation.json"; }
    std::string recon_histogram() const { return dir + "/reconstruction_histogram.csv"; }
    std::string recon_devices() const { return dir + "/reconstruction_devices.csv"; }
    std::string report_summary() const { return dir + "/report.json"; }
    std::string manifest(const std::string& stage) const {
        return dir + "/manifest_" + stage + ".json";
    }
};

namespace detail {

inline void require_file(const std::string& path, const std::string& producer) {
    if (!std::filesystem::exists(path))
        throw DataError("missing artifact " + path + " (run `" + producer + "` first)");
}

// Index-parallel loop with deterministic, exception-safe collection: fn(i)
// must write only to slot i of a preallocated result container.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    if (workers == 0) workers = std::thread::hardware_concurrency();
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace detail

inline Ensemble build_ensemble(const RunConfig& cfg, std::size_t device_count_override = 0) {
    const std::size_t n =
        device_count_override ? device_count_override : cfg.ensemble.device_count;
    const std::uint64_t seed = derive_seed(cfg.seed, "ensemble");
    if (cfg.ensemble.kind == DeviceKind::ac)
        return make_ac_ensemble(cfg.ensemble.ac, n, cfg.ensemble.ambient_temp, seed,
                                cfg.ensemble.setpoint_spread);
    return make_wh_ensemble(cfg.ensemble.wh, n, cfg.ensemble.ambient_temp,
                            cfg.ensemble.wh_flow_gph, seed, cfg.ensemble.setpoint_spread);
}

// Signals in kW: either the configured files (scaled when normalized) or
// seeded synthetic shapes scaled to the ensemble's rated power.
inline std::vector<RegulationSignal> build_signals(const RunConfig& cfg, double total_rated_kw) {
    std::vector<RegulationSignal> out;
    if (!cfg.signals.files.empty()) {
        for (const std::string& f : cfg.signals.files) {
            RegulationSignal s = load_signal(f, cfg.signals.dt_s);
            out.push_back(s.normalized
                              ? scale_signal(s, total_rated_kw, cfg.signals.scale_fraction)
                              : std::move(s));
        }
        return out;
    }
    for (std::size_t k = 0; k < cfg.signals.count; ++k) {
        RegulationSignal s = synth_signal(derive_seed(cfg.seed, "signal", k),
                                          cfg.signals.horizon_s, cfg.signals.dt_s,
                                          cfg.signals.bandwidth_hz);
        out.push_back(scale_signal(s, total_rated_kw, cfg.signals.scale_fraction));
    }
    return out;
}

struct SimulateResult {
    Dataset dataset;
    double baseline_kw = 0.0;
    std::size_t failed_signals = 0;
};

inline SimulateResult run_simulate(const RunConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    ArtifactPaths paths{out_dir};

    Ensemble ensemble = build_ensemble(cfg);
    std::vector<RegulationSignal> signals = build_signals(cfg, total_rated_power(ensemble));
    const double dt_h = cfg.signals.dt_s / 3600.0;
    const std::size_t horizon_steps =
        std::size_t(std::llround(cfg.signals.horizon_s / cfg.signals.dt_s));
    log(LogLevel::info, "simulate: " + std::to_string(ensemble.size()) + " devices, " +
                            std::to_string(signals.size()) + " signals x " +
                            std::to_string(horizon_steps) + " steps");
    const double baseline = baseline_power(ensemble, horizon_steps, dt_h);

    std::vector<Trajectory> trajectories(signals.size());
    detail::parallel_for(signals.size(), cfg.runtime.workers, [&](std::size_t k) {
        trajectories[k] = simulate_tracking(ensemble, signals[k], baseline);
    });

    std::vector<std::string> ids;
    for (const auto& s : signals) ids.push_back(s.source);
    SimulateResult res;
    res.dataset = build_dataset(trajectories, ensemble, ids);
    res.baseline_kw = baseline;
    for (const auto& tr : trajectories)
        if (tr.failure_step) ++res.failed_signals;

    save_vbds(paths.dataset(), res.dataset.m);
    for (std::size_t k = 0; k < signals.size(); ++k) save_signal(paths.signal_csv(k), signals[k]);

    json meta;
    meta["schema_version"] = 1;
    meta["n_devices"] = res.dataset.n_devices;
    meta["baseline_kw"] = baseline;
    meta["dt_s"] = cfg.signals.dt_s;
    meta["rows"] = res.dataset.m.rows;
    meta["cols"] = res.dataset.m.cols;
    meta["segments"] = json::array();
    for (std::size_t k = 0; k < res.dataset.segments.size(); ++k) {
        const DatasetSegment& seg = res.dataset.segments[k];
        meta["segments"].push_back({{"signal", seg.signal_id},
                                    {"row_start", seg.row_start},
                                    {"rows", seg.rows},
                                    {"failed", seg.failed},
                                    {"failure_step", seg.failure_step},
                                    {"csv", "signal_" + std::to_string(k) + ".csv"}});
    }
    std::ofstream meta_out(paths.dataset_meta());
    meta_out << meta.dump(2) << "\n";
    meta_out.close();

    Manifest man;
    man.stage = "simulate";
    man.seed = cfg.seed;
    man.config = to_json(cfg);
    for (const std::string& f : cfg.signals.files) add_file(man.inputs, f);
    add_file(man.outputs, paths.dataset());
    add_file(man.outputs, paths.dataset_meta());
    for (std::size_t k = 0; k < signals.size(); ++k) add_file(man.outputs, paths.signal_csv(k));
    write_manifest(paths.manifest("simulate"), man);
    return res;
}

inline void write_history_csv(const std::string& path,
                              const std::vector<std::pair<std::string, double>>& rows) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out.precision(17);
    out << "phase,epoch,loss\n";
    std::size_t epoch = 0;
    for (const auto& [phase, loss] : rows) out << phase << "," << epoch++ << "," << loss << "\n";
}

// Trains from scratch, or fine-tunes `source_model` when given (transfer path).
inline SaeTrainResult run_train_sae(const RunConfig& cfg, const std::string& out_dir,
                                    const std::string& source_model = "") {
    std::filesystem::create_directories(out_dir);
    ArtifactPaths paths{out_dir};
    detail::require_file(paths.dataset(), "simulate");
    Matrix data = load_vbds(paths.dataset());

    Network net;
    SaeTrainOptions opt;
    opt.epochs = cfg.sae.epochs;
    opt.lr = cfg.sae.lr;
    opt.batch_size = cfg.sae.batch_size;
    opt.seed = derive_seed(cfg.seed, "sae.train");
    if (source_model.empty()) {
        net = build_sae(data.cols, derive_seed(cfg.seed, "sae.init"));
        opt.pretrain_fraction = cfg.sae.pretrain_fraction;
    } else {
        detail::require_file(source_model, "transfer");
        net = load_network(source_model).net;
        const auto& first = std::get<DenseLayer>(net.layers.front());
        if (first.in_dim() != data.cols)
            throw DataError("source model expects " + std::to_string(first.in_dim()) +
                            " columns but dataset has " + std::to_string(data.cols));
        opt.pretrain_fraction = 0.0;  // fine-tune only
    }

    log(LogLevel::info, "train-sae: " + std::to_string(opt.epochs) + " epochs on " +
                            std::to_string(data.rows) + "x" + std::to_string(data.cols) +
                            (source_model.empty() ? "" : " (fine-tune)"));
    SaeTrainResult res = train_sae(net, data, opt);
    save_network(paths.sae_model(), net, ModelKind::sae);
    std::vector<std::pair<std::string, double>> rows;
    for (std::size_t i = 0; i < res.loss_history.size(); ++i)
        rows.emplace_back(i < res.pretrain_epochs ? "pretrain" : "finetune", res.loss_history[i]);
    write_history_csv(paths.sae_history(), rows);

    Manifest man;
    man.stage = "train-sae";
    man.seed = cfg.seed;
    man.config = to_json(cfg);
    add_file(man.inputs, paths.dataset());
    if (!source_model.empty()) add_file(man.inputs, source_model);
    add_file(man.outputs, paths.sae_model());
    add_file(man.outputs, paths.sae_history());
    write_manifest(paths.manifest("train-sae"), man);
    return res;
}

inline TransferReport run_transfer(const RunConfig& cfg, const std::string& out_dir,
                                   const std::string& source_model, std::size_t new_device_count) {
    std::filesystem::create_directories(out_dir);
    ArtifactPaths paths{out_dir};
    const std::string src = source_model.empty() ? paths.sae_model() : source_model;
    detail::require_file(src, "train-sae");
    if (new_device_count == 0) new_device_count = cfg.transfer.new_device_count;
    if (new_device_count == 0) throw ConfigError("transfer: new_device_count must be set");

    Network source = load_network(src).net;
    log(LogLevel::info, "transfer: growing to " + std::to_string(new_device_count) + " devices");
    TransferReport rep;
    Network target =
        transfer_sae(source, 2 * new_device_count + 3, derive_seed(cfg.seed, "transfer"), &rep);
    save_network(paths.transfer_model(), target, ModelKind::sae);

    json j;
    j["schema_version"] = 1;
    j["source_input_dim"] = rep.source_input_dim;
    j["target_input_dim"] = rep.target_input_dim;
    j["source_devices"] = rep.source_devices;
    j["target_devices"] = rep.target_devices;
    j["pretrained_parameters"] = rep.pretrained_parameters;
    j["new_parameters"] = rep.new_parameters;
    j["total_parameters"] = rep.total_parameters;
    j["device_map"] = rep.device_map;
    j["seed"] = rep.seed;
    std::ofstream out(paths.transfer_report());
    out << j.dump(2) << "\n";
    out.close();

    Manifest man;
    man.stage = "transfer";
    man.seed = cfg.seed;
    man.config = to_json(cfg);
    add_file(man.inputs, src);
    add_file(man.outputs, paths.transfer_model());
    add_file(man.outputs, paths.transfer_report());
    write_manifest(paths.manifest("transfer"), man);
    return rep;
}

namespace detail {

struct SegmentSeries {
    std::vector<double> x;  // encoded VB state per row
    std::vector<double> u;  // regulation, kW
    bool failed = false;
};

inline std::vector<SegmentSeries> load_segment_series(const ArtifactPaths& paths,
                                                      const Network& sae_net) {
    require_file(paths.dataset(), "simulate");
    require_file(paths.dataset_meta(), "simulate");
    Matrix data = load_vbds(paths.dataset());
    json meta;
    {
        std::ifstream in(paths.dataset_meta());
        if (!in) throw DataError("cannot open " + paths.dataset_meta());
        in >> meta;
    }
    std::vector<SegmentSeries> out;
    for (const json& seg : meta.at("segments")) {
        SegmentSeries s;
        s.failed = seg.at("failed").get<bool>();
        const std::size_t start = seg.at("row_start").get<std::size_t>();
        const std::size_t rows = seg.at("rows").get<std::size_t>();
        s.x.resize(rows);
        for (std::size_t r = 0; r < rows; ++r) s.x[r] = encode(sae_net, data.row(start + r));
        const std::string csv = paths.dir + "/" + seg.at("csv").get<std::string>();
        RegulationSignal sig = load_signal(csv, meta.at("dt_s").get<double>());
        if (sig.size() < rows) throw DataError("signal file shorter than its segment: " + csv);
        s.u.assign(sig.samples.begin(), sig.samples.begin() + std::ptrdiff_t(rows));
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace detail

struct ForecasterTrainResult {
    TrainHistory stage1;
    TrainHistory stage2;
    std::size_t windows = 0;
};

inline ForecasterTrainResult run_train_forecaster(const RunConfig& cfg,
                                                  const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    ArtifactPaths paths{out_dir};
    // Complain about the earliest missing pipeline stage first.
    detail::require_file(paths.dataset(), "simulate");
    detail::require_file(paths.sae_model(), "train-sae");
    Network sae_net = load_network(paths.sae_model()).net;
    std::vector<detail::SegmentSeries> segments = detail::load_segment_series(paths, sae_net);

    const std::size_t d = cfg.forecaster.window_d;
    std::vector<SupervisedSet> sets;
    std::size_t total = 0;
    for (const auto& s : segments) {
        if (s.x.size() <= d + 1) continue;  // too short to window
        sets.push_back(make_supervised(s.x, s.u, d));
        total += sets.back().X.rows;
    }
    if (sets.empty()) throw DataError("no segment long enough for window d=" + std::to_string(d));

    Matrix X(total, 2 * d + 2), Y(total, 1);
    std::size_t r = 0;
    for (const auto& set : sets)
        for (std::size_t i = 0; i < set.X.rows; ++i, ++r) {
            std::copy(set.X.row(i).begin(), set.X.row(i).end(), X.row(r).begin());
            Y(r, 0) = set.Y(i, 0);
        }

    ForecastModel model =
        build_forecaster(d, cfg.forecaster.arch, derive_seed(cfg.seed, "forecaster.init"));
    ForecastTrainOptions opt;
    opt.lr = cfg.forecaster.lr;
    opt.batch_size = cfg.forecaster.batch_size;
    opt.seed = derive_seed(cfg.seed, "forecaster.train");

    ForecasterTrainResult res;
    res.windows = total;
    log(LogLevel::info, "train-forecaster: " + std::to_string(total) + " windows, stages " +
                            std::to_string(cfg.forecaster.stage1_epochs) + "+" +
                            std::to_string(cfg.forecaster.stage2_epochs) + " epochs");
    opt.epochs = cfg.forecaster.stage1_epochs;
    res.stage1 = train_stage1(model, X, Y, opt);

    // Closed-loop window re-assembly per segment, then stage-2 fine-tuning.
    Matrix gamma(total, 2 * d + 2);
    r = 0;
    for (const auto& set : sets) {
        RolloutResult roll = closed_loop_rollout(model, set.X, set.Y);
        for (std::size_t i = 0; i < roll.gamma.rows; ++i, ++r)
            std::copy(roll.gamma.row(i).begin(), roll.gamma.row(i).end(), gamma.row(r).begin());
    }
    opt.epochs = cfg.forecaster.stage2_epochs;
    res.stage2 = train_stage2(model, gamma, Y, opt);

    save_forecaster(paths.forecaster_model(), model);
    std::vector<std::pair<std::string, double>> rows;
    for (double l : res.stage1.epoch_loss) rows.emplace_back("stage1", l);
    for (double l : res.stage2.epoch_loss) rows.emplace_back("stage2", l);
    write_history_csv(paths.forecaster_history(), rows);

    Manifest man;
    man.stage = "train-forecaster";
    man.seed = cfg.seed;
    man.config = to_json(cfg);
    add_file(man.inputs, paths.dataset());
    add_file(man.inputs, paths.sae_model());
    add_file(man.outputs, paths.forecaster_model());
    add_file(man.outputs, paths.forecaster_history());
    write_manifest(paths.manifest("train-forecaster"), man);
    return res;
}

inline json phi_to_json(const VBParams& p, const IdentifyDiagnostics& diag, double tol_kw) {
    json j;
    j["schema_version"] = 1;
    j["a"] = p.a;
    j["C1"] = p.C1;
    j["C2"] = p.C2;
    j["x0"] = p.x0;
    j["P_minus"] = p.P_minus;
    j["P_plus"] = p.P_plus;
    j["units"] = {{"a", "1/h"},      {"C1", "kWh"},     {"C2", "kWh"},
                  {"x0", "kWh"},     {"P_minus", "kW"}, {"P_plus", "kW"}};
    j["provenance"] = {
        {"a", "least-squares fit of x' = alpha x + beta u on forecaster closed-loop rollouts"},
        {"a_direct_fit", diag.direct_fit.ok ? diag.direct_fit.a : 0.0},
        {"a_rollout_residual_rmse", diag.rollout_fit.residual_rmse},
        {"a_clamped_to_zero", diag.a_clamped},
        {"C1_C2", "state envelope over encoded non-failed trajectories"},
        {"x0", "encoder output on the first dataset row"},
        {"P_limits", "one-sided binary search over constant-offset tracking, tol_kw " +
                         std::to_string(tol_kw)},
    };
    return j;
}

inline VBParams phi_from_json(const json& j) {
    VBParams p;
    p.a = j.at("a").get<double>();
    p.C1 = j.at("C1").get<double>();
    p.C2 = j.at("C2").get<double>();
    p.x0 = j.at("x0").get<double>();
    p.P_minus = j.at("P_minus").get<double>();
    p.P_plus = j.at("P_plus").get<double>();
    return p;
}

struct IdentifyResult {
    VBParams phi;
    IdentifyDiagnostics diagnostics;
    PowerLimits limits;
};

inline IdentifyResult run_identify(const RunConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    ArtifactPaths paths{out_dir};
    detail::require_file(paths.sae_model(), "train-sae");
    detail::require_file(paths.forecaster_model(), "train-forecaster");
    Network sae_net = load_network(paths.sae_model()).net;
    ForecastModel model = load_forecaster(paths.forecaster_model());
    std::vector<detail::SegmentSeries> segments = detail::load_segment_series(paths, sae_net);
    if (segments.empty() || segments.front().x.empty())
        throw IdentificationError("identify: dataset has no rows");

    IdentifyInputs in;
    in.dt_h = cfg.signals.dt_s / 3600.0;
    in.x0 = segments.front().x.front();
    in.limit_precision = cfg.identification.limit_precision;
    in.a_clamp_epsilon = cfg.identification.a_clamp_epsilon;
    const std::size_t d = model.window_d;
    for (const auto& s : segments) {
        if (s.failed || s.x.size() <= d + 1) continue;
        SupervisedSet set = make_supervised(s.x, s.u, d);
        RolloutResult roll = closed_loop_rollout(model, set.X, set.Y);
        std::vector<double> rolled(s.x.size());
        rolled[0] = s.x[0];
        for (std::size_t t = 0; t < roll.beta.size(); ++t) rolled[t + 1] = roll.beta[t];
        in.encoded.push_back(s.x);
        in.rollouts.push_back(std::move(rolled));
        in.inputs.push_back(s.u);
    }
    if (in.encoded.empty())
        throw IdentificationError("identify: no feasible (non-failed) trajectories");

    Ensemble ensemble = build_ensemble(cfg);
    const std::size_t limit_steps = std::size_t(
        std::llround(cfg.identification.limits_horizon_s / cfg.signals.dt_s));
    PowerLimits lim =
        power_limits(ensemble, limit_steps, cfg.signals.dt_s, cfg.identification.tol_kw);
    in.p_minus = lim.p_minus;
    in.p_plus = lim.p_plus;

    log(LogLevel::info, "identify: " + std::to_string(in.encoded.size()) +
                            " feasible trajectories, limits [" + std::to_string(lim.p_minus) +
                            ", " + std::to_string(lim.p_plus) + "] kW");
    IdentifyResult res;
    res.limits = lim;
    res.phi = identify_params(in, &res.diagnostics);

    json j = phi_to_json(res.phi, res.diagnostics, cfg.identification.tol_kw);
    std::ofstream out(paths.phi());
    out << j.dump(2) << "\n";
    out.close();

    // Roll the identified model over the first feasible trajectory.
    ValidationReport vrep = validate_params(res.phi, in.inputs.front(), in.encoded.front(), in.dt_h);
    json vj;
    vj["schema_version"] = 1;
    vj["rmse"] = vrep.rmse;
    vj["violation_fraction"] = vrep.violation_fraction;
    vj["steps"] = vrep.steps;
    std::ofstream vout(paths.validation());
    vout << vj.dump(2) << "\n";
    vout.close();

    Manifest man;
    man.stage = "identify";
    man.seed = cfg.seed;
    man.config = to_json(cfg);
    add_file(man.inputs, paths.dataset());
    add_file(man.inputs, paths.sae_model());
    add_file(man.inputs, paths.forecaster_model());
    add_file(man.outputs, paths.phi());
    add_file(man.outputs, paths.validation());
    write_manifest(paths.manifest("identify"), man);
    return res;
}

inline void run_report(const RunConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    ArtifactPaths paths{out_dir};
    detail::require_file(paths.dataset(), "simulate");
    detail::require_file(paths.sae_model(), "train-sae");
    Matrix data = load_vbds(paths.dataset());
    Network sae_net = load_network(paths.sae_model()).net;
    json meta;
    {
        detail::require_file(paths.dataset_meta(), "simulate");
        std::ifstream in(paths.dataset_meta());
        in >> meta;
    }
    const std::size_t n_devices = meta.at("n_devices").get<std::size_t>();
    ReconstructionReport rep = reconstruction_errors(sae_net, data, n_devices);

    {
        std::ofstream out(paths.recon_histogram());
        out.precision(17);
        out << "bin_lo,bin_hi,count\n";
        const double width = (rep.hist_hi - rep.hist_lo) / double(rep.histogram.size());
        for (std::size_t b = 0; b < rep.histogram.size(); ++b)
            out << rep.hist_lo + width * double(b) << "," << rep.hist_lo + width * double(b + 1)
                << "," << rep.histogram[b] << "\n";
    }
    {
        std::ofstream out(paths.recon_devices());
        out.precision(17);
        out << "device,min_error,max_error,mean_error\n";
        for (std::size_t i = 0; i < rep.n_devices; ++i)
            out << i << "," << rep.min_error[i] << "," << rep.max_error[i] << ","
                << rep.mean_error[i] << "\n";
    }
    json summary;
    summary["schema_version"] = 1;
    summary["devices"] = rep.n_devices;
    summary["rows"] = rep.rows;
    summary["error_min"] = rep.hist_lo;
    summary["error_max"] = rep.hist_hi;
    summary["histogram_csv"] = "reconstruction_histogram.csv";
    summary["per_device_csv"] = "reconstruction_devices.csv";
    if (std::filesystem::exists(paths.sae_history())) summary["sae_loss_csv"] = "sae_loss.csv";
    if (std::filesystem::exists(paths.forecaster_history()))
        summary["forecaster_loss_csv"] = "forecaster_loss.csv";
    std::ofstream out(paths.report_summary());
    out << summary.dump(2) << "\n";
    out.close();

    Manifest man;
    man.stage = "report";
    man.seed = cfg.seed;
    man.config = to_json(cfg);
    add_file(man.inputs, paths.dataset());
    add_file(man.inputs, paths.sae_model());
    add_file(man.outputs, paths.recon_histogram());
    add_file(man.outputs, paths.recon_devices());
    add_file(man.outputs, paths.report_summary());
    write_manifest(paths.manifest("report"), man);
}

}  // namespace vbid
