// Run configuration: JSON in, validated strictly (unknown keys are errors),
// defaults materialized so manifests echo the exact effective settings.
#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "vbid/common.hpp"
#include "vbid/ensemble.hpp"
#include "vbid/forecaster.hpp"
#include "vbid/tcl.hpp"

namespace vbid {

using json = nlohmann::json;

struct EnsembleConfig {
    DeviceKind kind = DeviceKind::ac;
    std::size_t device_count = 20;
    double setpoint_spread = 0.5;  // degF, uniform around the base setpoint
    double ambient_temp = kDefaultAcAmbient;
    double wh_flow_gph = kDefaultWhFlow;
    AcParams ac;
    WhParams wh;
};

struct SignalConfig {
    std::size_t count = 4;                // synthetic signals when files is empty
    std::vector<std::string> files;
    double horizon_s = 1800.0;
    double dt_s = 1.0;
    double scale_fraction = 0.2;          // of the ensemble's total rated power
    double bandwidth_hz = 0.005;
};

struct SaeConfig {
    std::size_t epochs = 200;
    double lr = 2e-6;
    std::size_t batch_size = 32;
    double pretrain_fraction = 0.10;
};

struct TransferConfig {
    std::size_t new_device_count = 0;  // 0 = transfer stage unused
};

struct ForecasterStageConfig {
    std::size_t window_d = 4;
    ForecasterConfig arch;
    std::size_t stage1_epochs = 60;
    std::size_t stage2_epochs = 30;
    double lr = 1e-3;
    std::size_t batch_size = 32;
};

struct IdentificationConfig {
    double tol_kw = 1.0;             // power-limit bisection tolerance
    double limits_horizon_s = 600.0; // horizon for the power-limit search
    double limit_precision = 0.0;    // outward rounding of C1/C2; 0 = exact
    double a_clamp_epsilon = 0.05;   // small negative dissipation snaps to 0
};

struct RuntimeConfig {
    std::size_t workers = 0;  // 0 = hardware concurrency
};

struct RunConfig {
    std::uint64_t seed = 1;
    EnsembleConfig ensemble;
    SignalConfig signals;
    SaeConfig sae;
    TransferConfig transfer;
    ForecasterStageConfig forecaster;
    IdentificationConfig identification;
    RuntimeConfig runtime;
};

namespace detail {

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value type for '") + key + "'");
    }
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
    using detail::get_or;
    using detail::reject_unknown_keys;
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown_keys(j, {"seed", "ensemble", "signals", "sae", "transfer", "forecaster",
                            "identification", "runtime"},
                        "config root");
    RunConfig c;
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);

    if (j.contains("ensemble")) {
        const json& e = j.at("ensemble");
        reject_unknown_keys(
            e, {"kind", "device_count", "setpoint_spread", "ambient_temp", "wh_flow_gph", "ac", "wh"},
            "ensemble");
        const std::string kind = get_or<std::string>(e, "kind", "ac");
        if (kind == "ac")
            c.ensemble.kind = DeviceKind::ac;
        else if (kind == "wh")
            c.ensemble.kind = DeviceKind::wh;
        else
            throw ConfigError("ensemble.kind must be \"ac\" or \"wh\"");
        c.ensemble.device_count = get_or<std::size_t>(e, "device_count", c.ensemble.device_count);
        if (c.ensemble.device_count == 0) throw ConfigError("ensemble.device_count must be >= 1");
        c.ensemble.setpoint_spread = get_or<double>(e, "setpoint_spread", c.ensemble.setpoint_spread);
        if (c.ensemble.setpoint_spread < 0) throw ConfigError("setpoint_spread must be >= 0");
        const double ambient_default =
            c.ensemble.kind == DeviceKind::ac ? kDefaultAcAmbient : kDefaultWhAmbient;
        c.ensemble.ambient_temp = get_or<double>(e, "ambient_temp", ambient_default);
        c.ensemble.wh_flow_gph = get_or<double>(e, "wh_flow_gph", c.ensemble.wh_flow_gph);
        if (e.contains("ac")) {
            const json& a = e.at("ac");
            reject_unknown_keys(a, {"C_r", "R", "eta", "P", "T_set", "deadband"}, "ensemble.ac");
            c.ensemble.ac.C_r = get_or<double>(a, "C_r", c.ensemble.ac.C_r);
            c.ensemble.ac.R = get_or<double>(a, "R", c.ensemble.ac.R);
            c.ensemble.ac.eta = get_or<double>(a, "eta", c.ensemble.ac.eta);
            c.ensemble.ac.P = get_or<double>(a, "P", c.ensemble.ac.P);
            c.ensemble.ac.T_set = get_or<double>(a, "T_set", c.ensemble.ac.T_set);
            c.ensemble.ac.deadband = get_or<double>(a, "deadband", c.ensemble.ac.deadband);
        }
        if (e.contains("wh")) {
            const json& w = e.at("wh");
            reject_unknown_keys(w, {"C_w", "W", "C_p", "P_w", "T_set", "deadband", "T_in"},
                                "ensemble.wh");
            c.ensemble.wh.C_w = get_or<double>(w, "C_w", c.ensemble.wh.C_w);
            c.ensemble.wh.W = get_or<double>(w, "W", c.ensemble.wh.W);
            c.ensemble.wh.C_p = get_or<double>(w, "C_p", c.ensemble.wh.C_p);
            c.ensemble.wh.P_w = get_or<double>(w, "P_w", c.ensemble.wh.P_w);
            c.ensemble.wh.T_set = get_or<double>(w, "T_set", c.ensemble.wh.T_set);
            c.ensemble.wh.deadband = get_or<double>(w, "deadband", c.ensemble.wh.deadband);
            c.ensemble.wh.T_in = get_or<double>(w, "T_in", c.ensemble.wh.T_in);
        }
        validate(c.ensemble.ac);
        validate(c.ensemble.wh);
    } else {
        c.ensemble.ambient_temp = kDefaultAcAmbient;
    }

    if (j.contains("signals")) {
        const json& s = j.at("signals");
        reject_unknown_keys(
            s, {"count", "files", "horizon_s", "dt_s", "scale_fraction", "bandwidth_hz"}, "signals");
        c.signals.count = get_or<std::size_t>(s, "count", c.signals.count);
        c.signals.files = get_or<std::vector<std::string>>(s, "files", c.signals.files);
        c.signals.horizon_s = get_or<double>(s, "horizon_s", c.signals.horizon_s);
        c.signals.dt_s = get_or<double>(s, "dt_s", c.signals.dt_s);
        c.signals.scale_fraction = get_or<double>(s, "scale_fraction", c.signals.scale_fraction);
        c.signals.bandwidth_hz = get_or<double>(s, "bandwidth_hz", c.signals.bandwidth_hz);
        if (!(c.signals.dt_s > 0)) throw ConfigError("signals.dt_s must be > 0");
        if (!(c.signals.horizon_s >= c.signals.dt_s))
            throw ConfigError("signals.horizon_s must cover at least one step");
        if (c.signals.files.empty() && c.signals.count == 0)
            throw ConfigError("signals: need files or a synthetic count");
        if (!(c.signals.scale_fraction > 0) || c.signals.scale_fraction > 1)
            throw ConfigError("signals.scale_fraction must be in (0, 1]");
    }

    if (j.contains("sae")) {
        const json& s = j.at("sae");
        reject_unknown_keys(s, {"epochs", "lr", "batch_size", "pretrain_fraction"}, "sae");
        c.sae.epochs = get_or<std::size_t>(s, "epochs", c.sae.epochs);
        c.sae.lr = get_or<double>(s, "lr", c.sae.lr);
        c.sae.batch_size = get_or<std::size_t>(s, "batch_size", c.sae.batch_size);
        c.sae.pretrain_fraction = get_or<double>(s, "pretrain_fraction", c.sae.pretrain_fraction);
        if (!(c.sae.lr > 0)) throw ConfigError("sae.lr must be > 0");
        if (c.sae.batch_size == 0) throw ConfigError("sae.batch_size must be >= 1");
        if (c.sae.pretrain_fraction < 0 || c.sae.pretrain_fraction > 1)
            throw ConfigError("sae.pretrain_fraction must be in [0, 1]");
    }

    if (j.contains("transfer")) {
        const json& t = j.at("transfer");
        reject_unknown_keys(t, {"new_device_count"}, "transfer");
        c.transfer.new_device_count =
            get_or<std::size_t>(t, "new_device_count", c.transfer.new_device_count);
    }

    if (j.contains("forecaster")) {
        const json& f = j.at("forecaster");
        reject_unknown_keys(f,
                            {"window_d", "conv_filters", "conv_extent", "conv_stride", "conv_pad",
                             "pool_extent", "pool_stride", "lstm_units", "stage1_epochs",
                             "stage2_epochs", "lr", "batch_size"},
                            "forecaster");
        c.forecaster.window_d = get_or<std::size_t>(f, "window_d", c.forecaster.window_d);
        c.forecaster.arch.conv_filters =
            get_or<std::size_t>(f, "conv_filters", c.forecaster.arch.conv_filters);
        c.forecaster.arch.conv_extent =
            get_or<std::size_t>(f, "conv_extent", c.forecaster.arch.conv_extent);
        c.forecaster.arch.conv_stride =
            get_or<std::size_t>(f, "conv_stride", c.forecaster.arch.conv_stride);
        c.forecaster.arch.conv_pad = get_or<std::size_t>(f, "conv_pad", c.forecaster.arch.conv_pad);
        c.forecaster.arch.pool_extent =
            get_or<std::size_t>(f, "pool_extent", c.forecaster.arch.pool_extent);
        c.forecaster.arch.pool_stride =
            get_or<std::size_t>(f, "pool_stride", c.forecaster.arch.pool_stride);
        c.forecaster.arch.lstm_units =
            get_or<std::size_t>(f, "lstm_units", c.forecaster.arch.lstm_units);
        c.forecaster.stage1_epochs =
            get_or<std::size_t>(f, "stage1_epochs", c.forecaster.stage1_epochs);
        c.forecaster.stage2_epochs =
            get_or<std::size_t>(f, "stage2_epochs", c.forecaster.stage2_epochs);
        c.forecaster.lr = get_or<double>(f, "lr", c.forecaster.lr);
        c.forecaster.batch_size = get_or<std::size_t>(f, "batch_size", c.forecaster.batch_size);
        if (c.forecaster.window_d == 0) throw ConfigError("forecaster.window_d must be >= 1");
        if (!(c.forecaster.lr > 0)) throw ConfigError("forecaster.lr must be > 0");
    }

    if (j.contains("identification")) {
        const json& i = j.at("identification");
        reject_unknown_keys(
            i, {"tol_kw", "limits_horizon_s", "limit_precision", "a_clamp_epsilon"}, "identification");
        c.identification.tol_kw = get_or<double>(i, "tol_kw", c.identification.tol_kw);
        c.identification.limits_horizon_s =
            get_or<double>(i, "limits_horizon_s", c.identification.limits_horizon_s);
        c.identification.limit_precision =
            get_or<double>(i, "limit_precision", c.identification.limit_precision);
        c.identification.a_clamp_epsilon =
            get_or<double>(i, "a_clamp_epsilon", c.identification.a_clamp_epsilon);
        if (!(c.identification.tol_kw > 0)) throw ConfigError("identification.tol_kw must be > 0");
        if (!(c.identification.limits_horizon_s >= c.signals.dt_s))
            throw ConfigError("identification.limits_horizon_s must cover at least one step");
    }

    if (j.contains("runtime")) {
        const json& r = j.at("runtime");
        reject_unknown_keys(r, {"workers"}, "runtime");
        c.runtime.workers = get_or<std::size_t>(r, "workers", c.runtime.workers);
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return parse_config(j);
}

// The effective configuration with all defaults materialized (manifest echo).
inline json to_json(const RunConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["ensemble"] = {
        {"kind", c.ensemble.kind == DeviceKind::ac ? "ac" : "wh"},
        {"device_count", c.ensemble.device_count},
        {"setpoint_spread", c.ensemble.setpoint_spread},
        {"ambient_temp", c.ensemble.ambient_temp},
        {"wh_flow_gph", c.ensemble.wh_flow_gph},
        {"ac",
         {{"C_r", c.ensemble.ac.C_r},
          {"R", c.ensemble.ac.R},
          {"eta", c.ensemble.ac.eta},
          {"P", c.ensemble.ac.P},
          {"T_set", c.ensemble.ac.T_set},
          {"deadband", c.ensemble.ac.deadband}}},
        {"wh",
         {{"C_w", c.ensemble.wh.C_w},
          {"W", c.ensemble.wh.W},
          {"C_p", c.ensemble.wh.C_p},
          {"P_w", c.ensemble.wh.P_w},
          {"T_set", c.ensemble.wh.T_set},
          {"deadband", c.ensemble.wh.deadband},
          {"T_in", c.ensemble.wh.T_in}}},
    };
    j["signals"] = {{"count", c.signals.count},       {"files", c.signals.files},
                    {"horizon_s", c.signals.horizon_s}, {"dt_s", c.signals.dt_s},
                    {"scale_fraction", c.signals.scale_fraction},
                    {"bandwidth_hz", c.signals.bandwidth_hz}};
    j["sae"] = {{"epochs", c.sae.epochs},
                {"lr", c.sae.lr},
                {"batch_size", c.sae.batch_size},
                {"pretrain_fraction", c.sae.pretrain_fraction}};
    j["transfer"] = {{"new_device_count", c.transfer.new_device_count}};
    j["forecaster"] = {{"window_d", c.forecaster.window_d},
                       {"conv_filters", c.forecaster.arch.conv_filters},
                       {"conv_extent", c.forecaster.arch.conv_extent},
                       {"conv_stride", c.forecaster.arch.conv_stride},
                       {"conv_pad", c.forecaster.arch.conv_pad},
                       {"pool_extent", c.forecaster.arch.pool_extent},
                       {"pool_stride", c.forecaster.arch.pool_stride},
                       {"lstm_units", c.forecaster.arch.lstm_units},
                       {"stage1_epochs", c.forecaster.stage1_epochs},
                       {"stage2_epochs", c.forecaster.stage2_epochs},
                       {"lr", c.forecaster.lr},
                       {"batch_size", c.forecaster.batch_size}};
    j["identification"] = {{"tol_kw", c.identification.tol_kw},
                           {"limits_horizon_s", c.identification.limits_horizon_s},
                           {"limit_precision", c.identification.limit_precision},
                           {"a_clamp_epsilon", c.identification.a_clamp_epsilon}};
    j["runtime"] = {{"workers", c.runtime.workers}};
    return j;
}

}  // namespace vbid
