#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "vbid/pipeline.hpp"
#include "vbid/vb.hpp"

using namespace vbid;

namespace {

// Simulates the exact battery recursion from x0 under a given input series.
std::vector<double> roll_battery(double x0, double a, const std::vector<double>& u, double dt_h) {
    std::vector<double> x{x0};
    for (double ui : u) x.push_back(vb_step(x.back(), a, ui, dt_h));
    return x;
}

std::vector<double> sine_input(std::size_t n, double amp, double period) {
    std::vector<double> u(n);
    for (std::size_t t = 0; t < n; ++t) u[t] = amp * std::sin(2.0 * M_PI * double(t) / period);
    return u;
}

}  // namespace

TEST(VbStep, ZeroDissipationIntegratesInput) {
    EXPECT_EQ(vb_step(5.0, 0.0, 0.0, 0.5), 5.0);
    EXPECT_EQ(vb_step(5.0, 0.0, 2.0, 0.5), 4.0);    // x - u dt
    EXPECT_EQ(vb_step(-1.0, 0.0, -4.0, 0.25), 0.0);
    EXPECT_THROW(vb_step(1.0, 0.1, 0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(vb_step(1.0, 0.1, 0.0, -1.0), std::invalid_argument);
}

TEST(VbStep, MatchesFrozenReferenceValues) {
    EXPECT_NEAR(vb_step(-128.81, 2.348, 0.0, 1.0), -12.309095373946016, 1e-9);
    EXPECT_NEAR(vb_step(3.0, 2.348, 1.5, 0.25), 1.3843280118561143, 1e-9);
}

TEST(VbStep, SubStepsComposeToOneBigStep) {
    const double a = 1.7, u = 2.5, x0 = 4.0;
    double x = x0;
    for (int k = 0; k < 100; ++k) x = vb_step(x, a, u, 0.01);
    EXPECT_NEAR(x, vb_step(x0, a, u, 1.0), 1e-9);
    // and against the closed form e^{-at} x0 - (1 - e^{-at})/a u
    const double want = std::exp(-a) * x0 - (1.0 - std::exp(-a)) / a * u;
    EXPECT_NEAR(x, want, 1e-9);
}

TEST(VbStep, ContinuousInDissipationNearZero) {
    const double x = 2.0, u = 1.0, dt = 0.5;
    const double at_zero = vb_step(x, 0.0, u, dt);
    EXPECT_NEAR(vb_step(x, 1e-12, u, dt), at_zero, 1e-9);
}

TEST(FitDissipation, RecoversExactLinearData) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> da(0.1, 5.0);
    const double dt = 0.25;
    for (int trial = 0; trial < 10; ++trial) {
        const double a = da(rng);
        std::vector<double> u = sine_input(200, 3.0, 37.0);
        std::vector<double> x = roll_battery(10.0, a, u, dt);
        DissipationFit fit = fit_dissipation(x, u, dt);
        ASSERT_TRUE(fit.ok) << fit.note;
        EXPECT_NEAR(fit.a, a, 1e-6 * a);
        EXPECT_NEAR(fit.beta, fit.beta_expected, 1e-9);
        EXPECT_LT(fit.residual_rmse, 1e-9);
        EXPECT_EQ(fit.pairs, x.size() - 1);
    }
}

TEST(FitDissipation, ReferenceRatesWithinOnePercentAtOneSecond) {
    const double dt = 1.0 / 3600.0;
    for (double a : {0.5, 1.0, 2.348}) {
        std::vector<double> u = sine_input(4000, 5.0, 600.0);
        std::vector<double> x = roll_battery(2.0, a, u, dt);
        DissipationFit fit = fit_dissipation(x, u, dt);
        ASSERT_TRUE(fit.ok) << fit.note;
        EXPECT_NEAR(fit.a, a, 0.01 * a);
    }
}

TEST(FitDissipation, ZeroInputFallsBackToStateOnlyFit) {
    const double a = 1.2, dt = 0.1;
    std::vector<double> u(80, 0.0);
    std::vector<double> x = roll_battery(6.0, a, u, dt);
    DissipationFit fit = fit_dissipation(x, u, dt);
    ASSERT_TRUE(fit.ok);
    EXPECT_NEAR(fit.a, a, 1e-9);
    EXPECT_EQ(fit.beta, 0.0);
    EXPECT_FALSE(fit.note.empty());
}

TEST(FitDissipation, ConstantZeroSeriesIsDegenerate) {
    std::vector<double> x(10, 0.0), u(10, 0.0);
    DissipationFit fit = fit_dissipation(x, u, 0.1);
    EXPECT_FALSE(fit.ok);
    EXPECT_FALSE(fit.note.empty());
}

TEST(FitDissipation, NonPhysicalAlternationIsRejected) {
    std::vector<double> x{1, -1, 1, -1, 1, -1, 1}, u(6, 0.0);
    DissipationFit fit = fit_dissipation(x, u, 0.1);
    EXPECT_FALSE(fit.ok);  // alpha = -1 has no real decay rate
}

TEST(FitDissipation, WhiteNoiseIsFlagged) {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(300), u(300);
    for (std::size_t t = 0; t < 300; ++t) {
        x[t] = g(rng);
        u[t] = g(rng);
    }
    DissipationFit fit = fit_dissipation(x, u, 0.1);
    EXPECT_TRUE(!fit.ok || fit.residual_rmse > 0.5);
}

TEST(FitDissipation, RejectsShortOrMisalignedSeries) {
    std::vector<double> x{1.0, 0.9}, u{0.0};
    EXPECT_THROW(fit_dissipation(x, u, 0.1), DataError);
    std::vector<double> x3{1.0, 0.9, 0.8}, u_short{0.0};
    EXPECT_THROW(fit_dissipation(x3, u_short, 0.1), DataError);
    EXPECT_THROW(fit_dissipation(x3, x3, 0.0), std::invalid_argument);
}

TEST(FitDissipation, PooledMatchesConcatenatedStatistics) {
    const double a = 0.8, dt = 0.2;
    std::vector<double> u1 = sine_input(60, 2.0, 17.0), u2 = sine_input(90, 1.0, 11.0);
    std::vector<double> x1 = roll_battery(3.0, a, u1, dt);
    std::vector<double> x2 = roll_battery(-2.0, a, u2, dt);
    DissipationFit fit = fit_dissipation_pooled({x1, x2}, {u1, u2}, dt);
    ASSERT_TRUE(fit.ok);
    EXPECT_NEAR(fit.a, a, 1e-6);
    EXPECT_EQ(fit.pairs, (x1.size() - 1) + (x2.size() - 1));
    EXPECT_THROW(fit_dissipation_pooled({x1}, {}, dt), DataError);
}

TEST(EnergyLimits, EnvelopeAndRounding) {
    auto [lo1, hi1] = energy_limits({{2.5, 2.5, 2.5}});
    EXPECT_EQ(lo1, 2.5);
    EXPECT_EQ(hi1, 2.5);
    auto [lo2, hi2] = energy_limits({{-3.7, 1.0}, {0.0, 8.2}});
    EXPECT_EQ(lo2, -3.7);
    EXPECT_EQ(hi2, 8.2);
    auto [lo3, hi3] = energy_limits({{-3.7, 1.0}, {0.0, 8.2}}, 0.5);
    EXPECT_EQ(lo3, -4.0);
    EXPECT_EQ(hi3, 8.5);
    // Adding a trajectory can only widen the envelope.
    auto [lo4, hi4] = energy_limits({{-3.7, 1.0}, {0.0, 8.2}, {-5.0, 9.0}});
    EXPECT_LE(lo4, lo2);
    EXPECT_GE(hi4, hi2);
    EXPECT_THROW(energy_limits({}), DataError);
    EXPECT_THROW(energy_limits({{}, {}}), DataError);
}

TEST(Identify, RecoversSyntheticBattery) {
    const double a = 1.5, dt = 1.0 / 3600.0;
    IdentifyInputs in;
    for (int k = 0; k < 3; ++k) {
        std::vector<double> u = sine_input(2500, 4.0 + k, 700.0 + 40.0 * k);
        std::vector<double> x = roll_battery(0.5 * k, a, u, dt);
        in.inputs.push_back(u);
        in.encoded.push_back(x);
        in.rollouts.push_back(x);  // perfect forecaster
    }
    in.x0 = in.encoded.front().front();
    in.dt_h = dt;
    in.p_minus = -12.0;
    in.p_plus = 9.0;

    IdentifyDiagnostics diag;
    VBParams p = identify_params(in, &diag);
    EXPECT_NEAR(p.a, a, 0.05 * a);
    auto [lo, hi] = energy_limits(in.encoded);
    EXPECT_EQ(p.C1, lo);
    EXPECT_EQ(p.C2, hi);
    EXPECT_EQ(p.x0, in.x0);
    EXPECT_EQ(p.P_minus, -12.0);
    EXPECT_EQ(p.P_plus, 9.0);
    EXPECT_LE(p.C1, p.x0);
    EXPECT_LE(p.x0, p.C2);
    EXPECT_TRUE(diag.rollout_fit.ok);
    EXPECT_TRUE(diag.direct_fit.ok);
    EXPECT_FALSE(diag.a_clamped);
}

TEST(Identify, SmallNegativeRateClampsToZero) {
    const double dt = 0.1;
    const double alpha = std::exp(0.02 * dt);  // fitted a = -0.02
    IdentifyInputs in;
    std::vector<double> u = sine_input(120, 1.0, 23.0);
    std::vector<double> x{1.0};
    for (double ui : u) x.push_back(alpha * x.back() - dt * ui);
    in.inputs.push_back(u);
    in.encoded.push_back(x);
    in.rollouts.push_back(x);
    in.x0 = 1.0;
    in.dt_h = dt;
    in.p_minus = -1.0;
    in.p_plus = 1.0;
    in.a_clamp_epsilon = 0.05;

    IdentifyDiagnostics diag;
    VBParams p = identify_params(in, &diag);
    EXPECT_EQ(p.a, 0.0);
    EXPECT_TRUE(diag.a_clamped);

    // Beyond the clamp window the negative rate is surfaced as an error.
    IdentifyInputs far = in;
    const double alpha2 = std::exp(0.2 * dt);  // fitted a = -0.2
    std::vector<double> x2{1.0};
    for (double ui : u) x2.push_back(alpha2 * x2.back() - dt * ui);
    far.encoded = {x2};
    far.rollouts = {x2};
    EXPECT_THROW(identify_params(far), IdentificationError);
}

TEST(Identify, EmptyTrajectoriesAreAnError) {
    IdentifyInputs in;
    EXPECT_THROW(identify_params(in), IdentificationError);
}

TEST(ValidateParams, SelfConsistentModelHasZeroError) {
    VBParams p;
    p.a = 0.9;
    p.C1 = -20.0;
    p.C2 = 20.0;
    p.x0 = 1.0;
    p.P_minus = -5.0;
    p.P_plus = 5.0;
    const double dt = 0.05;
    std::vector<double> u = sine_input(150, 2.0, 31.0);
    std::vector<double> truth = roll_battery(p.x0, p.a, u, dt);
    ValidationReport rep = validate_params(p, u, truth, dt);
    EXPECT_EQ(rep.rmse, 0.0);  // same recursion, same rounding
    EXPECT_EQ(rep.violation_fraction, 0.0);
    EXPECT_EQ(rep.steps, truth.size() - 1);
}

TEST(ValidateParams, CountsEnvelopeViolations) {
    VBParams p;
    p.a = 0.0;
    p.C1 = -0.5;
    p.C2 = 0.5;
    p.x0 = 0.0;
    std::vector<double> truth{0.0, 0.4, 0.6, 0.7, 0.4};  // two samples outside
    std::vector<double> u(4, 0.0);
    ValidationReport rep = validate_params(p, u, truth, 0.1);
    EXPECT_NEAR(rep.violation_fraction, 2.0 / 5.0, 1e-12);

    EXPECT_THROW(validate_params(p, u, std::vector<double>{1.0}, 0.1), DataError);
    EXPECT_THROW(validate_params(p, std::vector<double>{0.0}, truth, 0.1), DataError);
}

TEST(ParamsValidate, GateOrderingAndSigns) {
    VBParams p;
    p.C1 = -1.0;
    p.C2 = 1.0;
    p.x0 = 0.0;
    p.P_minus = -2.0;
    p.P_plus = 2.0;
    EXPECT_NO_THROW(validate(p));
    VBParams bad = p;
    bad.x0 = 2.0;
    EXPECT_THROW(validate(bad), IdentificationError);
    bad = p;
    bad.P_minus = 0.5;
    EXPECT_THROW(validate(bad), IdentificationError);
    bad = p;
    bad.a = -0.1;
    EXPECT_THROW(validate(bad), IdentificationError);
}

TEST(PhiJson, RoundTripIsBitExact) {
    VBParams p;
    p.a = 1.2345678901234567;
    p.C1 = -0.1 - 0.2;  // deliberately non-representable decimals
    p.C2 = 7.0 / 3.0;
    p.x0 = 0.3;
    p.P_minus = -2.718281828459045;
    p.P_plus = 3.141592653589793;
    IdentifyDiagnostics diag;
    diag.rollout_fit.ok = true;
    diag.rollout_fit.a = p.a;
    diag.rollout_fit.residual_rmse = 1e-7;
    diag.direct_fit.ok = true;
    diag.direct_fit.a = 1.19;

    json j = phi_to_json(p, diag, 1.0);
    const std::string text = j.dump(2);
    json back_j = json::parse(text);
    VBParams back = phi_from_json(back_j);
    EXPECT_EQ(back.a, p.a);
    EXPECT_EQ(back.C1, p.C1);
    EXPECT_EQ(back.C2, p.C2);
    EXPECT_EQ(back.x0, p.x0);
    EXPECT_EQ(back.P_minus, p.P_minus);
    EXPECT_EQ(back.P_plus, p.P_plus);

    EXPECT_EQ(j.at("units").at("a"), "1/h");
    EXPECT_EQ(j.at("units").at("C1"), "kWh");
    EXPECT_EQ(j.at("units").at("P_plus"), "kW");
    EXPECT_EQ(j.at("provenance").at("a_direct_fit").get<double>(), 1.19);
    EXPECT_FALSE(j.at("provenance").at("a_clamped_to_zero").get<bool>());
    EXPECT_EQ(j.at("schema_version").get<int>(), 1);
}
