// First-order virtual battery: exact state stepping, dissipation fitting by
// least squares, energy-limit envelopes, parameter assembly and validation.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vbid/common.hpp"

namespace vbid {

// phi = [a, C1, C2, x0, P-, P+]
struct VBParams {
    double a = 0.0;        // self-dissipation, 1/h
    double C1 = 0.0;       // lower energy limit, kWh
    double C2 = 0.0;       // upper energy limit, kWh
    double x0 = 0.0;       // initial state, kWh
    double P_minus = 0.0;  // kW, <= 0
    double P_plus = 0.0;   // kW, >= 0
};

inline void validate(const VBParams& p) {
    if (!(p.C1 <= p.x0 && p.x0 <= p.C2))
        throw IdentificationError("vb params: C1 <= x0 <= C2 violated");
    if (!(p.P_minus <= 0.0 && 0.0 <= p.P_plus))
        throw IdentificationError("vb params: P- <= 0 <= P+ violated");
    if (!(p.a >= 0.0)) throw IdentificationError("vb params: dissipation a must be >= 0");
}

// Exact discretization of x' = -a x - u with u held constant over dt:
// x(t+dt) = e^{-a dt} x - (1 - e^{-a dt})/a * u, limit x - u dt as a -> 0.
inline double vb_step(double x, double a, double u, double dt_h) {
    if (!(dt_h > 0)) throw std::invalid_argument("vb_step: dt must be > 0");
    const double ad = a * dt_h;
    if (ad == 0.0) return x - u * dt_h;
    const double em1 = std::expm1(-ad);  // e^{-a dt} - 1
    return (1.0 + em1) * x + (em1 / a) * u;
}

struct DissipationFit {
    bool ok = false;
    double a = 0.0;             // 1/h, = -ln(alpha)/dt
    double alpha = 1.0;         // fitted state coefficient
    double beta = 0.0;          // fitted input coefficient
    double beta_expected = 0.0; // -(1 - alpha)/a implied by the exact discretization
    double residual_rmse = 0.0;
    std::size_t pairs = 0;
    std::string note;
};

namespace detail {

struct FitAccumulator {
    double sxx = 0, sxu = 0, suu = 0, sxy = 0, suy = 0;
    std::size_t n = 0;

    void add(double x, double u, double y) {
        sxx += x * x;
        sxu += x * u;
        suu += u * u;
        sxy += x * y;
        suy += u * y;
        ++n;
    }
};

inline DissipationFit solve_fit(const FitAccumulator& acc, double dt_h) {
    DissipationFit fit;
    fit.pairs = acc.n;
    const double det = acc.sxx * acc.suu - acc.sxu * acc.sxu;
    const double scale = std::max(acc.sxx, acc.suu);
    if (scale <= 0.0) {
        fit.note = "degenerate series (all zero)";
        return fit;
    }
    if (det > 1e-12 * scale * scale) {
        fit.alpha = (acc.suu * acc.sxy - acc.sxu * acc.suy) / det;
        fit.beta = (acc.sxx * acc.suy - acc.sxu * acc.sxy) / det;
    } else if (acc.sxx > 0.0) {
        // input carries no information; fit the state coefficient alone
        fit.alpha = acc.sxy / acc.sxx;
        fit.beta = 0.0;
        fit.note = "input variance ~ 0; state-only fit";
    } else {
        fit.note = "state variance ~ 0; cannot fit";
        return fit;
    }
    if (!(fit.alpha > 0.0)) {
        fit.note = "non-physical fit: alpha <= 0 (alpha=" + std::to_string(fit.alpha) + ")";
        return fit;
    }
    fit.a = -std::log(fit.alpha) / dt_h;
    fit.beta_expected = fit.a == 0.0 ? -dt_h : -(1.0 - fit.alpha) / fit.a;
    fit.ok = true;
    return fit;
}

}  // namespace detail

// Least-squares fit of x_{t+1} = alpha x_t + beta u_t; a = -ln(alpha)/dt.
inline DissipationFit fit_dissipation(std::span<const double> x, std::span<const double> u,
                                      double dt_h) {
    if (x.size() < 3) throw DataError("fit_dissipation: need at least 3 state samples");
    if (u.size() + 1 < x.size()) throw DataError("fit_dissipation: misaligned input series");
    if (!(dt_h > 0)) throw std::invalid_argument("fit_dissipation: dt must be > 0");
    detail::FitAccumulator acc;
    for (std::size_t t = 0; t + 1 < x.size(); ++t) acc.add(x[t], u[t], x[t + 1]);
    DissipationFit fit = detail::solve_fit(acc, dt_h);
    if (!fit.ok) return fit;
    double sq = 0.0;
    for (std::size_t t = 0; t + 1 < x.size(); ++t) {
        const double r = x[t + 1] - fit.alpha * x[t] - fit.beta * u[t];
        sq += r * r;
    }
    fit.residual_rmse = std::sqrt(sq / double(acc.n));
    return fit;
}

// Pooled fit over several (x, u) trajectories; pairs never straddle a
// trajectory boundary.
inline DissipationFit fit_dissipation_pooled(const std::vector<std::vector<double>>& xs,
                                             const std::vector<std::vector<double>>& us,
                                             double dt_h) {
    if (xs.size() != us.size()) throw DataError("fit_dissipation: trajectory count mismatch");
    detail::FitAccumulator acc;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (us[k].size() + 1 < xs[k].size())
            throw DataError("fit_dissipation: misaligned trajectory " + std::to_string(k));
        for (std::size_t t = 0; t + 1 < xs[k].size(); ++t)
            acc.add(xs[k][t], us[k][t], xs[k][t + 1]);
    }
    if (acc.n < 2) throw DataError("fit_dissipation: need at least 2 transition pairs");
    DissipationFit fit = detail::solve_fit(acc, dt_h);
    if (!fit.ok) return fit;
    double sq = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k)
        for (std::size_t t = 0; t + 1 < xs[k].size(); ++t) {
            const double r = xs[k][t + 1] - fit.alpha * xs[k][t] - fit.beta * us[k][t];
            sq += r * r;
        }
    fit.residual_rmse = std::sqrt(sq / double(acc.n));
    return fit;
}

// Envelope of the state over feasible trajectories, rounded outward to
// `precision` (0 keeps the exact min/max).
inline std::pair<double, double> energy_limits(const std::vector<std::vector<double>>& trajectories,
                                               double precision = 0.0) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::size_t n = 0;
    for (const auto& tr : trajectories)
        for (double v : tr) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            ++n;
        }
    if (n == 0) throw DataError("energy_limits: no feasible trajectory samples");
    if (precision > 0.0) {
        lo = std::floor(lo / precision) * precision;
        hi = std::ceil(hi / precision) * precision;
    }
    return {lo, hi};
}

struct IdentifyInputs {
    std::vector<std::vector<double>> encoded;   // feasible encoded state trajectories
    std::vector<std::vector<double>> rollouts;  // forecaster closed-loop trajectories
    std::vector<std::vector<double>> inputs;    // regulation (kW), aligned with both
    double x0 = 0.0;
    double dt_h = 1.0 / 3600.0;
    double p_minus = 0.0;
    double p_plus = 0.0;
    double limit_precision = 0.0;
    double a_clamp_epsilon = 0.05;  // small negative fits snap to 0
};

struct IdentifyDiagnostics {
    DissipationFit rollout_fit;  // primary source of a
    DissipationFit direct_fit;   // fit on the encoded series, reported alongside
    bool a_clamped = false;
};

inline VBParams identify_params(const IdentifyInputs& in, IdentifyDiagnostics* diag = nullptr) {
    if (in.encoded.empty()) throw IdentificationError("identify: no feasible trajectories");
    VBParams p;
    auto [c1, c2] = energy_limits(in.encoded, in.limit_precision);
    p.C1 = c1;
    p.C2 = c2;
    p.x0 = in.x0;
    p.P_minus = in.p_minus;
    p.P_plus = in.p_plus;

    DissipationFit roll = fit_dissipation_pooled(in.rollouts, in.inputs, in.dt_h);
    DissipationFit direct = fit_dissipation_pooled(in.encoded, in.inputs, in.dt_h);
    if (!roll.ok)
        throw IdentificationError("identify: dissipation fit failed (" + roll.note + ")");
    double a = roll.a;
    bool clamped = false;
    if (a < 0.0 && a >= -in.a_clamp_epsilon) {
        a = 0.0;
        clamped = true;
    }
    p.a = a;
    if (diag) {
        diag->rollout_fit = roll;
        diag->direct_fit = direct;
        diag->a_clamped = clamped;
    }
    validate(p);
    return p;
}

struct ValidationReport {
    double rmse = 0.0;                // rolled phi-model state vs encoded truth
    double violation_fraction = 0.0;  // time the truth spends outside [C1, C2]
    std::size_t steps = 0;
};

inline ValidationReport validate_params(const VBParams& p, std::span<const double> u,
                                        std::span<const double> truth, double dt_h) {
    if (truth.size() < 2) throw DataError("validate: need at least 2 truth samples");
    if (u.size() + 1 < truth.size()) throw DataError("validate: misaligned input series");
    ValidationReport rep;
    rep.steps = truth.size() - 1;
    double x = truth[0];
    double sq = 0.0;
    std::size_t viol = truth[0] < p.C1 || truth[0] > p.C2 ? 1 : 0;
    for (std::size_t t = 0; t + 1 < truth.size(); ++t) {
        x = vb_step(x, p.a, u[t], dt_h);
        const double e = x - truth[t + 1];
        sq += e * e;
        if (truth[t + 1] < p.C1 || truth[t + 1] > p.C2) ++viol;
    }
    rep.rmse = std::sqrt(sq / double(rep.steps));
    rep.violation_fraction = double(viol) / double(truth.size());
    return rep;
}

}  // namespace vbid
