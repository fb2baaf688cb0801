// Stacked autoencoder with a scalar bottleneck: the innermost code of the
// trained network is the virtual-battery state for one dataset row.
//
// All activations are linear and inputs are fed raw (no normalization), so
// the code keeps the physical scale of the ensemble data.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vbid/common.hpp"
#include "vbid/network.hpp"
#include "vbid/tensor.hpp"
#include "vbid/training.hpp"

namespace vbid {

// Reference layer widths for a 203-column dataset; other input sizes are
// scaled proportionally (strictly decreasing, bottleneck always 1).
inline std::vector<std::size_t> sae_schedule(std::size_t input_dim) {
    if (input_dim < 2) throw ConfigError("sae: input_dim must be >= 2");
    static constexpr double kBaseInput = 203.0;
    static constexpr double kBaseWidths[] = {150.0, 100.0, 50.0, 20.0};

    std::vector<std::size_t> encoder{input_dim};
    for (double base : kBaseWidths) {
        std::size_t w = std::size_t(std::llround(double(input_dim) * base / kBaseInput));
        w = std::max<std::size_t>(w, 2);
        if (w >= encoder.back()) {
            if (encoder.back() <= 2) break;  // no room left above the bottleneck
            w = encoder.back() - 1;
        }
        encoder.push_back(w);
    }
    std::vector<std::size_t> widths = encoder;
    widths.push_back(1);
    for (std::size_t k = encoder.size(); k-- > 0;) widths.push_back(encoder[k]);
    return widths;
}

inline Network build_sae(std::size_t input_dim, std::uint64_t seed = 0) {
    const std::vector<std::size_t> widths = sae_schedule(input_dim);
    Network net;
    for (std::size_t k = 0; k + 1 < widths.size(); ++k)
        net.layers.emplace_back(make_dense(widths[k], widths[k + 1], Activation::linear));
    init_weights(net, seed);
    return net;
}

// Number of encoder layers == index of the bottleneck output.
inline std::size_t sae_bottleneck_index(const Network& net) {
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto* d = std::get_if<DenseLayer>(&net.layers[i]);
        if (!d) throw std::invalid_argument("sae: non-dense layer");
        if (d->out_dim() == 1) return i + 1;
    }
    throw std::invalid_argument("sae: network has no width-1 bottleneck");
}

inline double encode(const Network& net, std::span<const double> row) {
    const std::size_t split = sae_bottleneck_index(net);
    Tensor x = tensor_from(row);
    for (std::size_t i = 0; i < split; ++i)
        x = dense_forward(std::get<DenseLayer>(net.layers[i]), x);
    return x[0];
}

inline Tensor decode(const Network& net, double code) {
    const std::size_t split = sae_bottleneck_index(net);
    Tensor x(1);
    x[0] = code;
    for (std::size_t i = split; i < net.layers.size(); ++i)
        x = dense_forward(std::get<DenseLayer>(net.layers[i]), x);
    return x;
}

inline std::vector<double> encode_all(const Network& net, const Matrix& data) {
    std::vector<double> out(data.rows);
    for (std::size_t r = 0; r < data.rows; ++r) out[r] = encode(net, data.row(r));
    return out;
}

struct SaeTrainOptions {
    std::size_t epochs = 200;
    double lr = 1e-6;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    // Fraction of the epoch budget spent on greedy layerwise pretraining,
    // split evenly across encoder/decoder pairs; 0 disables pretraining
    // (used when fine-tuning an already-initialized network).
    double pretrain_fraction = 0.10;
    // When set, the end-to-end reconstruction loss is also evaluated after
    // every pretraining epoch so the history reflects total epochs spent.
    bool record_pretrain_history = true;
};

struct SaeTrainResult {
    std::vector<double> loss_history;  // one entry per epoch actually spent
    std::size_t pretrain_epochs = 0;   // leading entries of the history
};

// Greedy layerwise pretraining (each encoder/decoder pair trained as a tiny
// autoencoder on the codes of the layers below), then end-to-end fine-tuning
// of the whole stack on the reconstruction objective.
inline SaeTrainResult train_sae(Network& net, const Matrix& data, const SaeTrainOptions& opt) {
    const std::size_t split = sae_bottleneck_index(net);
    const auto& first = std::get<DenseLayer>(net.layers.front());
    if (data.cols != first.in_dim())
        throw DataError("train_sae: dataset has " + std::to_string(data.cols) +
                        " columns, network expects " + std::to_string(first.in_dim()));
    SaeTrainResult res;
    if (opt.epochs == 0) return res;

    const std::size_t pair_count = split;
    std::size_t pretrain_total =
        std::size_t(std::llround(opt.pretrain_fraction * double(opt.epochs)));
    pretrain_total = std::min(pretrain_total, opt.epochs);
    const std::size_t per_pair = pair_count ? pretrain_total / pair_count : 0;

    if (per_pair > 0) {
        Matrix codes = data;
        for (std::size_t k = 0; k < pair_count; ++k) {
            auto& enc = std::get<DenseLayer>(net.layers[k]);
            auto& dec = std::get<DenseLayer>(net.layers[net.layers.size() - 1 - k]);
            Network pair;
            pair.layers.emplace_back(enc);
            pair.layers.emplace_back(dec);
            TrainOptions topt;
            topt.lr = opt.lr;
            topt.batch_size = opt.batch_size;
            topt.seed = derive_seed(opt.seed, "sae.pretrain", k);
            topt.epochs = 1;
            for (std::size_t ep = 0; ep < per_pair; ++ep) {
                train_regression(pair, codes, codes, topt);
                topt.seed = derive_seed(topt.seed, "sae.pretrain.epoch", ep);
                enc = std::get<DenseLayer>(pair.layers[0]);
                dec = std::get<DenseLayer>(pair.layers[1]);
                if (opt.record_pretrain_history)
                    res.loss_history.push_back(evaluate_loss(net, data, data));
            }
            // codes for the next pair come from the trained encoder layer
            Matrix next(codes.rows, enc.out_dim());
            for (std::size_t r = 0; r < codes.rows; ++r) {
                Tensor y = dense_forward(enc, tensor_from(codes.row(r)));
                std::copy(y.data().begin(), y.data().end(), next.row(r).begin());
            }
            codes = std::move(next);
        }
        res.pretrain_epochs = per_pair * pair_count;
    }

    TrainOptions fine;
    fine.epochs = opt.epochs - res.pretrain_epochs;
    fine.lr = opt.lr;
    fine.batch_size = opt.batch_size;
    fine.seed = derive_seed(opt.seed, "sae.finetune");
    if (fine.epochs > 0) {
        TrainHistory h = train_regression(net, data, data, fine);
        res.loss_history.insert(res.loss_history.end(), h.epoch_loss.begin(), h.epoch_loss.end());
    }
    return res;
}

struct ReconstructionReport {
    std::size_t n_devices = 0;
    std::size_t rows = 0;
    std::vector<double> min_error;   // per device, degF (signed)
    std::vector<double> max_error;   // per device, degF
    std::vector<double> mean_error;  // per device, degF
    std::vector<std::size_t> histogram;
    double hist_lo = 0.0, hist_hi = 0.0;  // histogram range over all devices
};

// Signed reconstruction errors over the temperature block of the dataset.
inline ReconstructionReport reconstruction_errors(const Network& net, const Matrix& data,
                                                  std::size_t n_devices,
                                                  std::size_t hist_bins = 41) {
    if (n_devices == 0 || data.cols < n_devices)
        throw std::invalid_argument("reconstruction_errors: bad device count");
    ReconstructionReport rep;
    rep.n_devices = n_devices;
    rep.rows = data.rows;
    rep.min_error.assign(n_devices, std::numeric_limits<double>::infinity());
    rep.max_error.assign(n_devices, -std::numeric_limits<double>::infinity());
    rep.mean_error.assign(n_devices, 0.0);

    Matrix errors(data.rows, n_devices);
    for (std::size_t r = 0; r < data.rows; ++r) {
        Tensor y = forward(net, tensor_from(data.row(r)));
        for (std::size_t i = 0; i < n_devices; ++i) {
            const double e = y[i] - data(r, i);
            errors(r, i) = e;
            rep.min_error[i] = std::min(rep.min_error[i], e);
            rep.max_error[i] = std::max(rep.max_error[i], e);
            rep.mean_error[i] += e;
        }
    }
    for (double& m : rep.mean_error) m /= double(std::max<std::size_t>(1, data.rows));

    rep.hist_lo = *std::min_element(rep.min_error.begin(), rep.min_error.end());
    rep.hist_hi = *std::max_element(rep.max_error.begin(), rep.max_error.end());
    double width = rep.hist_hi - rep.hist_lo;
    if (width <= 0) width = 1.0;
    rep.histogram.assign(hist_bins, 0);
    for (std::size_t r = 0; r < errors.rows; ++r)
        for (std::size_t i = 0; i < n_devices; ++i) {
            std::size_t bin =
                std::size_t(double(hist_bins) * (errors(r, i) - rep.hist_lo) / width);
            rep.histogram[std::min(bin, hist_bins - 1)]++;
        }
    return rep;
}

}  // namespace vbid
