// Conv + LSTM forecaster for the virtual-battery state. Stage 1 trains on
// ground-truth windows; stage 2 re-assembles the windows with the model's
// own closed-loop predictions in the state slots and fine-tunes, which damps
// error accumulation during autoregressive rollout.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vbid/common.hpp"
#include "vbid/network.hpp"
#include "vbid/tensor.hpp"
#include "vbid/training.hpp"

namespace vbid {

struct ForecasterConfig {
    std::size_t conv_filters = 8;
    std::size_t conv_extent = 3;
    std::size_t conv_stride = 1;
    std::size_t conv_pad = 1;
    std::size_t pool_extent = 2;
    std::size_t pool_stride = 2;
    std::size_t lstm_units = 32;
};

struct ForecastModel {
    Network net;
    std::size_t window_d = 1;  // history depth; input rows have 2d+2 entries

    std::size_t input_len() const { return 2 * window_d + 2; }
};

inline double predict(const ForecastModel& m, const Tensor& window) {
    return forward(m.net, window)[0];
}

inline ForecastModel build_forecaster(std::size_t d, const ForecasterConfig& cfg,
                                      std::uint64_t seed) {
    if (d == 0) throw ConfigError("forecaster: window d must be >= 1");
    ForecastModel m;
    m.window_d = d;
    const std::size_t in_len = 2 * d + 2;
    const std::size_t conv_out =
        conv1d_out_len(in_len, cfg.conv_extent, cfg.conv_stride, cfg.conv_pad);
    const std::size_t pool_out = pool_out_len(conv_out, cfg.pool_extent, cfg.pool_stride);
    (void)pool_out;  // validates divisibility up front
    m.net.layers.emplace_back(make_conv1d(1, cfg.conv_filters, cfg.conv_extent, cfg.conv_stride,
                                          cfg.conv_pad, Activation::relu));
    m.net.layers.emplace_back(PoolLayer{cfg.pool_extent, cfg.pool_stride});
    m.net.layers.emplace_back(make_lstm(cfg.conv_filters, cfg.lstm_units));
    m.net.layers.emplace_back(make_dense(cfg.lstm_units, 1, Activation::linear));
    init_weights(m.net, seed);
    return m;
}

struct SupervisedSet {
    Matrix X;  // N x (2d+2): [x_{i-d}..x_i | u_{i-d}..u_i], i-d clamped at 0
    Matrix Y;  // N x 1: x_{i+1}
    std::size_t d = 1;
};

namespace detail {

// window[0..d] = states, window[d+1..2d+1] = regulation; indices below zero
// are left-padded with the first sample.
template <class GetX, class GetU>
void fill_window(std::span<double> w, std::size_t i, std::size_t d, GetX&& x, GetU&& u) {
    for (std::size_t j = 0; j <= d; ++j) {
        const std::size_t src = i + j >= d ? i + j - d : 0;
        w[j] = x(src);
        w[d + 1 + j] = u(src);
    }
}

}  // namespace detail

inline SupervisedSet make_supervised(std::span<const double> x_series,
                                     std::span<const double> u_series, std::size_t d) {
    if (d == 0) throw ConfigError("make_supervised: d must be >= 1");
    if (x_series.size() <= d)
        throw DataError("make_supervised: series length must exceed the window d");
    if (u_series.size() + 1 < x_series.size())
        throw DataError("make_supervised: regulation series shorter than state series");
    const std::size_t n = x_series.size() - 1;
    SupervisedSet set;
    set.d = d;
    set.X = Matrix(n, 2 * d + 2);
    set.Y = Matrix(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        detail::fill_window(
            set.X.row(i), i, d, [&](std::size_t k) { return x_series[k]; },
            [&](std::size_t k) { return u_series[k]; });
        set.Y(i, 0) = x_series[i + 1];
    }
    return set;
}

struct ForecastTrainOptions {
    std::size_t epochs = 100;
    double lr = 1e-3;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

inline TrainHistory train_stage1(ForecastModel& m, const Matrix& X, const Matrix& Y,
                                 const ForecastTrainOptions& opt) {
    TrainOptions t;
    t.epochs = opt.epochs;
    t.lr = opt.lr;
    t.batch_size = opt.batch_size;
    t.seed = derive_seed(opt.seed, "forecaster.stage1");
    return train_regression(m.net, X, Y, t);
}

struct RolloutResult {
    Matrix gamma;              // N x (2d+2): windows with predictions substituted
    std::vector<double> beta;  // N predictions; beta[i] = Y_i exactly for i < d
};

// Closed-loop re-assembly of the supervised windows: for i >= d, prior
// predictions replace the state slots (regulation entries stay ground
// truth); for i < d, outputs are the ground truth itself.
template <class Predict>
RolloutResult closed_loop_rollout_fn(Predict&& predictor, const Matrix& X, const Matrix& Y,
                                     std::size_t d) {
    if (X.rows != Y.rows || Y.cols != 1) throw std::invalid_argument("rollout: X/Y mismatch");
    if (X.cols != 2 * d + 2) throw std::invalid_argument("rollout: window length != 2d+2");
    RolloutResult res;
    res.gamma = X;
    res.beta.resize(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) {
        if (i < d) {
            res.beta[i] = Y(i, 0);
            continue;
        }
        auto w = res.gamma.row(i);
        for (std::size_t j = 0; j <= d; ++j) {
            // state slot j holds x_{i-d+j}, predicted by beta[i-d+j-1]
            const std::size_t t = i - d + j;
            if (t >= 1) w[j] = res.beta[t - 1];
        }
        res.beta[i] = predictor(w);
    }
    return res;
}

inline RolloutResult closed_loop_rollout(const ForecastModel& m, const Matrix& X,
                                         const Matrix& Y) {
    return closed_loop_rollout_fn(
        [&](std::span<const double> w) { return predict(m, tensor_from(w)); }, X, Y, m.window_d);
}

inline TrainHistory train_stage2(ForecastModel& m, const Matrix& gamma, const Matrix& Y,
                                 const ForecastTrainOptions& opt) {
    TrainOptions t;
    t.epochs = opt.epochs;
    t.lr = opt.lr;
    t.batch_size = opt.batch_size;
    t.seed = derive_seed(opt.seed, "forecaster.stage2");
    return train_regression(m.net, gamma, Y, t);
}

// Autoregressive forecast: given history x_0..x_T and regulation u_0..u_{T+steps-1}
// (indices aligned with the state series), returns x^_{T+1}..x^_{T+steps}.
inline std::vector<double> forecast(const ForecastModel& m, std::span<const double> x_history,
                                    std::span<const double> u_series, std::size_t steps) {
    if (x_history.empty()) throw DataError("forecast: empty state history");
    const std::size_t t_last = x_history.size() - 1;
    if (u_series.size() < t_last + steps)
        throw DataError("forecast: regulation series too short for the requested horizon");
    std::vector<double> s(x_history.begin(), x_history.end());
    std::vector<double> out;
    out.reserve(steps);
    Tensor w(m.input_len());
    for (std::size_t k = 0; k < steps; ++k) {
        const std::size_t i = t_last + k;  // predicting x_{i+1}
        detail::fill_window(
            w.data(), i, m.window_d, [&](std::size_t t) { return s[t]; },
            [&](std::size_t t) { return u_series[t]; });
        const double xhat = predict(m, w);
        s.push_back(xhat);
        out.push_back(xhat);
    }
    return out;
}

}  // namespace vbid
