// Mini-batch SGD on squared error, plus finite-difference gradient checking.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "vbid/common.hpp"
#include "vbid/network.hpp"
#include "vbid/tensor.hpp"

namespace vbid {

// Mean squared error over all output elements: L = (1/D) * sum_j (y_j - t_j)^2.
inline double mse_loss(const Tensor& pred, const Tensor& target) {
    if (pred.size() != target.size()) throw std::invalid_argument("mse: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        acc += d * d;
    }
    return acc / double(pred.size());
}

inline Tensor mse_loss_grad(const Tensor& pred, const Tensor& target) {
    Tensor g = pred;
    const double scale = 2.0 / double(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) g[i] = scale * (pred[i] - target[i]);
    return g;
}

struct TrainOptions {
    std::size_t epochs = 100;
    double lr = 0.01;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    bool shuffle = true;
    // When nonzero, each dataset row is presented as a (row_len / input_cols)
    // x input_cols volume instead of a flat vector (sequence inputs).
    std::size_t input_cols = 0;
    double divergence_limit = 1e12;
};

struct TrainHistory {
    std::vector<double> epoch_loss;  // mean per-sample loss after each epoch's updates

    double final_loss() const {
        return epoch_loss.empty() ? std::numeric_limits<double>::quiet_NaN() : epoch_loss.back();
    }
};

namespace detail {

inline Tensor row_input(const Matrix& X, std::size_t r, std::size_t input_cols) {
    Tensor x = tensor_from(X.row(r));
    if (input_cols == 0) return x;
    if (X.cols % input_cols != 0)
        throw std::invalid_argument("train: row length not divisible by input_cols");
    return x.reshaped(X.cols / input_cols, input_cols);
}

}  // namespace detail

// Mean per-sample loss of the network over a supervised set.
inline double evaluate_loss(const Network& net, const Matrix& X, const Matrix& Y,
                            std::size_t input_cols = 0) {
    if (X.rows != Y.rows) throw std::invalid_argument("evaluate: X/Y row mismatch");
    if (X.rows == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t r = 0; r < X.rows; ++r) {
        Tensor y = forward(net, detail::row_input(X, r, input_cols));
        acc += mse_loss(y, tensor_from(Y.row(r)));
    }
    return acc / double(X.rows);
}

// Plain SGD: shuffled mini-batches, gradients averaged within each batch.
// Throws TrainingDivergence when the running loss blows up or goes non-finite.
inline TrainHistory train_regression(Network& net, const Matrix& X, const Matrix& Y,
                                     const TrainOptions& opt) {
    if (X.rows != Y.rows) throw std::invalid_argument("train: X/Y row mismatch");
    if (X.rows == 0) throw std::invalid_argument("train: empty dataset");
    const std::size_t batch = std::max<std::size_t>(1, std::min(opt.batch_size, X.rows));

    std::vector<std::size_t> order(X.rows);
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_rng(derive_seed(opt.seed, "train.shuffle"));

    TrainHistory hist;
    hist.epoch_loss.reserve(opt.epochs);
    Network grads = zero_like(net);
    ForwardTrace trace;

    for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
        if (opt.shuffle) std::shuffle(order.begin(), order.end(), rng);
        double epoch_acc = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            for_each_param(grads, [](Tensor& t) { t.fill(0.0); });
            for (std::size_t k = start; k < end; ++k) {
                const std::size_t r = order[k];
                Tensor x = detail::row_input(X, r, opt.input_cols);
                Tensor y = forward(net, x, &trace);
                Tensor t = tensor_from(Y.row(r));
                epoch_acc += mse_loss(y, t);
                backward(net, trace, mse_loss_grad(y, t), grads);
            }
            const double step = opt.lr / double(end - start);
            for_each_param_pair(net, grads, [&](Tensor& w, const Tensor& g) {
                for (std::size_t i = 0; i < w.size(); ++i) w[i] -= step * g[i];
            });
        }
        const double mean_loss = epoch_acc / double(X.rows);
        if (!std::isfinite(mean_loss) || mean_loss > opt.divergence_limit)
            throw TrainingDivergence(epoch, "loss " + std::to_string(mean_loss));
        hist.epoch_loss.push_back(mean_loss);
    }
    return hist;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient verification.

inline double relative_error(double analytic, double numeric) {
    const double denom = std::max(std::abs(analytic), std::abs(numeric));
    if (denom < 1e-8) return 0.0;  // both effectively zero
    return std::abs(analytic - numeric) / denom;
}

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t params_checked = 0;
};

// Compares reverse-mode parameter gradients of the squared-error loss against
// central differences. When the network has more than `max_params` parameters
// an evenly spaced subset is checked.
inline GradCheckResult grad_check(Network& net, const Tensor& input, const Tensor& target,
                                  double eps = 1e-5,
                                  std::size_t max_params = std::numeric_limits<std::size_t>::max()) {
    ForwardTrace trace;
    Network grads = zero_like(net);
    {
        Tensor y = forward(net, input, &trace);
        backward(net, trace, mse_loss_grad(y, target), grads);
    }

    std::vector<Tensor*> params, gparams;
    for_each_param(net, [&](Tensor& t) { params.push_back(&t); });
    for_each_param(grads, [&](Tensor& t) { gparams.push_back(&t); });

    std::size_t total = 0;
    for (const Tensor* t : params) total += t->size();
    const std::size_t stride = total > max_params ? (total + max_params - 1) / max_params : 1;

    GradCheckResult res;
    std::size_t flat = 0;
    for (std::size_t ti = 0; ti < params.size(); ++ti) {
        Tensor& w = *params[ti];
        const Tensor& g = *gparams[ti];
        for (std::size_t i = 0; i < w.size(); ++i, ++flat) {
            if (flat % stride != 0) continue;
            const double saved = w[i];
            w[i] = saved + eps;
            const double lp = mse_loss(forward(net, input), target);
            w[i] = saved - eps;
            const double lm = mse_loss(forward(net, input), target);
            w[i] = saved;
            const double numeric = (lp - lm) / (2.0 * eps);
            res.max_rel_error = std::max(res.max_rel_error, relative_error(g[i], numeric));
            ++res.params_checked;
        }
    }
    return res;
}

}  // namespace vbid
