// Closed-loop simulation of a TCL ensemble tracking a regulation signal:
// greedy priority-stack dispatch, baseline estimation, tracking with failure
// truncation, and power-limit search by one-sided binary search.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "vbid/common.hpp"
#include "vbid/signal.hpp"
#include "vbid/tcl.hpp"
#include "vbid/tensor.hpp"

namespace vbid {

enum class DeviceKind { ac, wh };

struct AmbientConditions {
    double temperature = kDefaultAcAmbient;  // degF
    double wh_flow_gph = kDefaultWhFlow;     // water draw, gal/h (WH only)
};

// Homogeneous-kind ensemble. Parameters are per device so setpoints may be
// spread; the dataset layout assumes eta and the capacitance are shared.
struct Ensemble {
    DeviceKind kind = DeviceKind::ac;
    std::vector<AcParams> ac;
    std::vector<WhParams> wh;
    std::vector<DeviceState> states;
    AmbientConditions ambient;

    std::size_t size() const { return states.size(); }
};

inline ThermostatMode mode_of(const Ensemble& e) {
    return e.kind == DeviceKind::ac ? ThermostatMode::cooling : ThermostatMode::heating;
}

inline double rated_power(const Ensemble& e, std::size_t i) {
    return e.kind == DeviceKind::ac ? e.ac[i].P : e.wh[i].P_w;
}

inline double setpoint(const Ensemble& e, std::size_t i) {
    return e.kind == DeviceKind::ac ? e.ac[i].T_set : e.wh[i].T_set;
}

inline double deadband(const Ensemble& e, std::size_t i) {
    return e.kind == DeviceKind::ac ? e.ac[i].deadband : e.wh[i].deadband;
}

inline double shared_efficiency(const Ensemble& e) {
    return e.kind == DeviceKind::ac ? e.ac.front().eta : 1.0;
}

inline double shared_capacitance(const Ensemble& e) {
    return e.kind == DeviceKind::ac ? e.ac.front().C_r : e.wh.front().C_w;
}

inline double total_rated_power(const Ensemble& e) {
    double acc = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) acc += rated_power(e, i);
    return acc;
}

inline double max_rated_power(const Ensemble& e) {
    double m = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) m = std::max(m, rated_power(e, i));
    return m;
}

inline double aggregate_power(const Ensemble& e) {
    double acc = 0.0;
    for (const DeviceState& s : e.states) acc += s.power_draw;
    return acc;
}

// Desynchronized initial conditions: temperatures uniform inside each
// deadband, draws on with probability 1/2.
inline void init_states(Ensemble& e, std::uint64_t seed) {
    auto rng = make_rng(derive_seed(seed, "ensemble.init"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    e.states.resize(e.kind == DeviceKind::ac ? e.ac.size() : e.wh.size());
    for (std::size_t i = 0; i < e.states.size(); ++i) {
        const double half = deadband(e, i) / 2.0;
        e.states[i].temperature = setpoint(e, i) + half * (2.0 * unit(rng) - 1.0);
        e.states[i].power_draw = unit(rng) < 0.5 ? rated_power(e, i) : 0.0;
    }
}

inline Ensemble make_ac_ensemble(const AcParams& base, std::size_t n, double ambient,
                                 std::uint64_t seed, double setpoint_spread = 0.0) {
    if (n == 0) throw ConfigError("ensemble must contain at least one device");
    validate(base);
    Ensemble e;
    e.kind = DeviceKind::ac;
    e.ambient.temperature = ambient;
    e.ac.assign(n, base);
    if (setpoint_spread > 0.0) {
        auto rng = make_rng(derive_seed(seed, "ensemble.setpoints"));
        std::uniform_real_distribution<double> d(-setpoint_spread, setpoint_spread);
        for (auto& p : e.ac) p.T_set = base.T_set + d(rng);
    }
    init_states(e, seed);
    return e;
}

inline Ensemble make_wh_ensemble(const WhParams& base, std::size_t n, double ambient,
                                 double flow_gph, std::uint64_t seed,
                                 double setpoint_spread = 0.0) {
    if (n == 0) throw ConfigError("ensemble must contain at least one device");
    validate(base);
    Ensemble e;
    e.kind = DeviceKind::wh;
    e.ambient.temperature = ambient;
    e.ambient.wh_flow_gph = flow_gph;
    e.wh.assign(n, base);
    if (setpoint_spread > 0.0) {
        auto rng = make_rng(derive_seed(seed, "ensemble.setpoints"));
        std::uniform_real_distribution<double> d(-setpoint_spread, setpoint_spread);
        for (auto& p : e.wh) p.T_set = base.T_set + d(rng);
    }
    init_states(e, seed);
    return e;
}

// Advances every device one step (thermostat owns the switching).
inline void step_ensemble(Ensemble& e, double dt_h) {
    if (e.kind == DeviceKind::ac) {
        for (std::size_t i = 0; i < e.size(); ++i)
            e.states[i] = ac_step(e.states[i], e.ac[i], e.ambient.temperature, dt_h);
    } else {
        for (std::size_t i = 0; i < e.size(); ++i)
            e.states[i] = wh_step(e.states[i], e.wh[i], e.ambient.temperature,
                                  e.ambient.wh_flow_gph, dt_h);
    }
}

// Mean aggregate power over an uncontrolled (thermostat-only) run; the
// ensemble's own initial state is the starting point.
inline double baseline_power(const Ensemble& ensemble, std::size_t horizon_steps, double dt_h) {
    if (horizon_steps == 0) throw std::invalid_argument("baseline_power: empty horizon");
    Ensemble e = ensemble;
    double acc = 0.0;
    for (std::size_t s = 0; s < horizon_steps; ++s) {
        acc += aggregate_power(e);
        step_ensemble(e, dt_h);
    }
    return acc / double(horizon_steps);
}

struct DispatchDecision {
    std::vector<double> power;  // per-device assignment, 0 or rated
    double achieved_kw = 0.0;
    double abs_error_kw = 0.0;
};

// Greedy priority stack. Devices at a deadband hard edge are switched first
// (mandatory). The rest are ranked by normalized distance to their switching
// boundary and toggled, in rank order, whenever a toggle reduces the
// tracking error. Never violates a deadband edge.
inline DispatchDecision dispatch_step(const Ensemble& e, double target_kw) {
    if (!(target_kw >= 0)) throw std::invalid_argument("dispatch_step: target must be >= 0");
    const std::size_t n = e.size();
    const ThermostatMode mode = mode_of(e);
    DispatchDecision dec;
    dec.power.resize(n);

    // Mandatory region: the thermostat leaves no choice at the edges.
    std::vector<bool> locked(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const double T = e.states[i].temperature;
        const double set = setpoint(e, i), half = deadband(e, i) / 2.0, rated = rated_power(e, i);
        const double forced = thermostat(T, e.states[i].power_draw, set, deadband(e, i), rated, mode);
        dec.power[i] = forced;
        if (T >= set + half || T <= set - half) locked[i] = true;
    }

    double aggregate = std::accumulate(dec.power.begin(), dec.power.end(), 0.0);

    // Priority: sigma*(T - T_set)/(db/2), sigma = +1 cooling / -1 heating.
    // High score = close to the must-ON edge, low score = close to must-OFF.
    auto score = [&](std::size_t i) {
        const double sigma = mode == ThermostatMode::cooling ? 1.0 : -1.0;
        return sigma * (e.states[i].temperature - setpoint(e, i)) / (deadband(e, i) / 2.0);
    };

    std::vector<std::size_t> candidates;
    const bool need_more = aggregate < target_kw;
    for (std::size_t i = 0; i < n; ++i) {
        if (locked[i]) continue;
        const bool on = dec.power[i] > 0.0;
        if (need_more ? !on : on) candidates.push_back(i);
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        // turn ON hottest-first (cooling); turn OFF coldest-first
        return need_more ? score(a) > score(b) : score(a) < score(b);
    });

    for (std::size_t i : candidates) {
        const double rated = rated_power(e, i);
        const double delta = need_more ? rated : -rated;
        if (std::abs(aggregate + delta - target_kw) < std::abs(aggregate - target_kw)) {
            dec.power[i] = need_more ? rated : 0.0;
            aggregate += delta;
        }
    }
    dec.achieved_kw = aggregate;
    dec.abs_error_kw = std::abs(aggregate - target_kw);
    return dec;
}

struct Trajectory {
    std::size_t n_devices = 0;
    double dt_s = 1.0;
    Matrix temperatures;            // steps x N, state at the start of each step
    Matrix power_draws;             // steps x N, draw applied over the step
    std::vector<double> aggregate;  // kW, = row sum of power_draws
    std::vector<double> target;     // kW, baseline + u (clamped at 0)
    std::optional<std::size_t> failure_step;

    std::size_t steps() const { return aggregate.size(); }
};

// Dispatch-then-integrate loop. Tracking fails at the first step whose
// dispatch error exceeds one device rated power; the trajectory is truncated
// at (not including) that step.
inline Trajectory simulate_tracking(const Ensemble& ensemble, const RegulationSignal& signal,
                                    double baseline_kw) {
    if (signal.normalized) throw DataError("simulate_tracking: signal must be scaled to kW");
    Ensemble e = ensemble;
    const std::size_t n = e.size();
    const double dt_h = signal.dt_s / 3600.0;
    const double fail_threshold = max_rated_power(e);

    Trajectory tr;
    tr.n_devices = n;
    tr.dt_s = signal.dt_s;
    std::vector<double> temps, draws;
    temps.reserve(signal.size() * n);
    draws.reserve(signal.size() * n);

    for (std::size_t s = 0; s < signal.size(); ++s) {
        const double target = std::max(0.0, baseline_kw + signal.samples[s]);
        DispatchDecision dec = dispatch_step(e, target);
        if (dec.abs_error_kw > fail_threshold) {
            tr.failure_step = s;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            temps.push_back(e.states[i].temperature);
            draws.push_back(dec.power[i]);
            e.states[i].power_draw = dec.power[i];
        }
        tr.aggregate.push_back(dec.achieved_kw);
        tr.target.push_back(target);
        step_ensemble(e, dt_h);
    }

    const std::size_t steps = tr.aggregate.size();
    tr.temperatures = Matrix(steps, n);
    tr.power_draws = Matrix(steps, n);
    std::copy(temps.begin(), temps.end(), tr.temperatures.v.begin());
    std::copy(draws.begin(), draws.end(), tr.power_draws.v.begin());
    return tr;
}

namespace detail {

inline bool survives_constant(const Ensemble& e, double constant_kw, double baseline_kw,
                              std::size_t horizon_steps, double dt_s) {
    RegulationSignal u;
    u.dt_s = dt_s;
    u.normalized = false;
    u.samples.assign(horizon_steps, constant_kw);
    return !simulate_tracking(e, u, baseline_kw).failure_step.has_value();
}

}  // namespace detail

struct PowerLimits {
    double p_minus = 0.0;  // kW, <= 0
    double p_plus = 0.0;   // kW, >= 0
};

// One-sided binary search per direction: doubling until a constant offset
// fails, then bisection to tol_kw. P+ is the largest surviving positive
// offset, P- the (negated) largest surviving negative offset.
inline PowerLimits power_limits(const Ensemble& ensemble, std::size_t horizon_steps, double dt_s,
                                double tol_kw) {
    if (horizon_steps == 0) throw std::invalid_argument("power_limits: horizon shorter than one step");
    if (!(tol_kw > 0)) throw std::invalid_argument("power_limits: tol must be > 0");
    const double dt_h = dt_s / 3600.0;
    const double baseline = baseline_power(ensemble, horizon_steps, dt_h);
    const double hard_cap = total_rated_power(ensemble) + max_rated_power(ensemble) + 1.0;

    auto search = [&](double direction) {  // +1 or -1
        auto ok = [&](double c) {
            return detail::survives_constant(ensemble, direction * c, baseline, horizon_steps, dt_s);
        };
        if (!ok(tol_kw)) return 0.0;
        double lo = tol_kw, hi = 2.0 * tol_kw;
        for (;;) {
            while (ok(hi)) {
                lo = hi;
                hi *= 2.0;
                if (hi > hard_cap) return lo;  // cannot fail within physical range
            }
            while (hi - lo > tol_kw) {
                const double mid = 0.5 * (lo + hi);
                (ok(mid) ? lo : hi) = mid;
            }
            // Survival need not be monotone in the offset; guarantee the
            // advertised postcondition (lo survives, lo + tol fails) by
            // resuming the search past any surviving pocket.
            if (!ok(lo + tol_kw)) return lo;
            lo += tol_kw;
            hi = 2.0 * lo;
            if (hi > hard_cap) return lo;
        }
    };

    PowerLimits lim;
    lim.p_plus = search(+1.0);
    lim.p_minus = -search(-1.0);
    return lim;
}

}  // namespace vbid
