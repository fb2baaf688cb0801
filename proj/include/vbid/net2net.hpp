// Function-preserving network growth: widening a hidden layer (replicated
// units, downstream weights divided by replication count), inserting an
// identity layer, and resizing an autoencoder to a larger device ensemble.
#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "vbid/common.hpp"
#include "vbid/network.hpp"

namespace vbid {

struct WidenPlan {
    std::size_t layer_index = 0;
    std::size_t old_width = 0;
    std::size_t new_width = 0;
    std::vector<std::size_t> map;  // g: new unit -> source unit; identity below old_width
    std::uint64_t seed = 0;
};

inline WidenPlan make_widen_plan(const Network& net, std::size_t layer_index,
                                 std::size_t new_width, std::uint64_t seed) {
    if (layer_index + 1 >= net.layers.size())
        throw std::invalid_argument("widen: layer must have a successor");
    const auto* cur = std::get_if<DenseLayer>(&net.layers[layer_index]);
    const auto* next = std::get_if<DenseLayer>(&net.layers[layer_index + 1]);
    if (!cur || !next) throw std::invalid_argument("widen: both layers must be dense");
    const std::size_t n = cur->out_dim();
    if (new_width <= n) throw std::invalid_argument("widen: new width must exceed old width");

    WidenPlan plan;
    plan.layer_index = layer_index;
    plan.old_width = n;
    plan.new_width = new_width;
    plan.seed = seed;
    plan.map.resize(new_width);
    std::iota(plan.map.begin(), plan.map.begin() + std::ptrdiff_t(n), 0);
    auto rng = make_rng(derive_seed(seed, "net2net.widen", layer_index));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t j = n; j < new_width; ++j) plan.map[j] = pick(rng);  // with replacement
    return plan;
}

inline Network widen(const Network& net, const WidenPlan& plan) {
    const auto& cur = std::get<DenseLayer>(net.layers[plan.layer_index]);
    const auto& next = std::get<DenseLayer>(net.layers[plan.layer_index + 1]);
    const std::size_t q = plan.new_width;
    std::vector<std::size_t> count(plan.old_width, 0);
    for (std::size_t j = 0; j < q; ++j) count[plan.map[j]]++;

    DenseLayer wider = make_dense(cur.in_dim(), q, cur.act);
    for (std::size_t j = 0; j < q; ++j) {
        const std::size_t src = plan.map[j];
        for (std::size_t c = 0; c < cur.in_dim(); ++c) wider.W(j, c) = cur.W(src, c);
        wider.b[j] = cur.b[src];
    }
    // Downstream weights split among the replicas so the sum is unchanged.
    DenseLayer after = make_dense(q, next.out_dim(), next.act);
    after.b = next.b;
    for (std::size_t r = 0; r < next.out_dim(); ++r)
        for (std::size_t j = 0; j < q; ++j) {
            const std::size_t src = plan.map[j];
            after.W(r, j) = next.W(r, src) / double(count[src]);
        }

    Network out = net;
    out.layers[plan.layer_index] = std::move(wider);
    out.layers[plan.layer_index + 1] = std::move(after);
    return out;
}

inline Network widen(const Network& net, std::size_t layer_index, std::size_t new_width,
                     std::uint64_t seed) {
    return widen(net, make_widen_plan(net, layer_index, new_width, seed));
}

// Inserts an identity dense layer after layer i. Only valid for activations
// with s(I s(v)) = s(v): linear and relu qualify, sigmoid/tanh do not.
inline Network deepen(const Network& net, std::size_t layer_index) {
    if (layer_index >= net.layers.size()) throw std::invalid_argument("deepen: layer out of range");
    const auto* cur = std::get_if<DenseLayer>(&net.layers[layer_index]);
    if (!cur) throw std::invalid_argument("deepen: layer must be dense");
    if (cur->act != Activation::linear && cur->act != Activation::relu)
        throw std::invalid_argument(
            "deepen: activation must satisfy s(I s(v)) = s(v) (linear or relu)");
    DenseLayer ident = make_dense(cur->out_dim(), cur->out_dim(), cur->act);
    for (std::size_t i = 0; i < cur->out_dim(); ++i) ident.W(i, i) = 1.0;
    Network out = net;
    out.layers.insert(out.layers.begin() + std::ptrdiff_t(layer_index) + 1, std::move(ident));
    return out;
}

struct TransferReport {
    std::size_t source_input_dim = 0;
    std::size_t target_input_dim = 0;
    std::size_t source_devices = 0;
    std::size_t target_devices = 0;
    std::size_t pretrained_parameters = 0;  // copied from the source network
    std::size_t new_parameters = 0;         // introduced by the widening
    std::size_t total_parameters = 0;
    std::vector<std::size_t> device_map;    // new device -> source device
    std::uint64_t seed = 0;
};

// Grows an autoencoder trained on a 2N+3-column dataset to accept 2M+3
// columns (M > N devices). Only the input-adjacent and output-adjacent dense
// layers change; each new device reuses the columns of a uniformly sampled
// existing device (same feature block), so rows whose new-device columns
// duplicate their mapped devices reconstruct the old columns unchanged.
inline Network transfer_sae(const Network& source, std::size_t new_input_dim, std::uint64_t seed,
                            TransferReport* report = nullptr) {
    if (source.layers.size() < 2) throw std::invalid_argument("transfer: network too small");
    const auto* first = std::get_if<DenseLayer>(&source.layers.front());
    const auto* last = std::get_if<DenseLayer>(&source.layers.back());
    if (!first || !last) throw std::invalid_argument("transfer: boundary layers must be dense");
    const std::size_t d_old = first->in_dim();
    if (last->out_dim() != d_old)
        throw std::invalid_argument("transfer: network is not an autoencoder");
    if (d_old < 5 || (d_old - 3) % 2 != 0)
        throw std::invalid_argument("transfer: source input is not a 2N+3 device layout");
    if (new_input_dim <= d_old)
        throw std::invalid_argument("transfer: shrinking or same-size transfer is unsupported");
    if ((new_input_dim - 3) % 2 != 0)
        throw std::invalid_argument("transfer: target input is not a 2M+3 device layout");

    const std::size_t n_old = (d_old - 3) / 2;
    const std::size_t n_new = (new_input_dim - 3) / 2;

    // Device-level map e: new device -> existing device, identity below n_old.
    std::vector<std::size_t> dev_map(n_new);
    std::iota(dev_map.begin(), dev_map.begin() + std::ptrdiff_t(n_old), 0);
    auto rng = make_rng(derive_seed(seed, "net2net.transfer"));
    std::uniform_int_distribution<std::size_t> pick(0, n_old - 1);
    for (std::size_t t = n_old; t < n_new; ++t) dev_map[t] = pick(rng);

    // Column-level map: temperature block, setpoint block, shared features.
    std::vector<std::size_t> col_map(new_input_dim);
    for (std::size_t t = 0; t < n_new; ++t) {
        col_map[t] = dev_map[t];
        col_map[n_new + t] = n_old + dev_map[t];
    }
    for (std::size_t k = 0; k < 3; ++k) col_map[2 * n_new + k] = 2 * n_old + k;
    std::vector<std::size_t> col_count(d_old, 0);
    for (std::size_t j = 0; j < new_input_dim; ++j) col_count[col_map[j]]++;

    // Input widening: replicate columns of the first weight matrix, divided
    // by replication count (widening the input units preserves the function
    // on rows whose duplicated columns carry the mapped devices' values).
    DenseLayer new_first = make_dense(new_input_dim, first->out_dim(), first->act);
    new_first.b = first->b;
    for (std::size_t r = 0; r < first->out_dim(); ++r)
        for (std::size_t j = 0; j < new_input_dim; ++j)
            new_first.W(r, j) = first->W(r, col_map[j]) / double(col_count[col_map[j]]);

    // Output widening: new outputs reconstruct the mapped source columns.
    DenseLayer new_last = make_dense(last->in_dim(), new_input_dim, last->act);
    for (std::size_t j = 0; j < new_input_dim; ++j) {
        for (std::size_t c = 0; c < last->in_dim(); ++c) new_last.W(j, c) = last->W(col_map[j], c);
        new_last.b[j] = last->b[col_map[j]];
    }

    Network target = source;
    target.layers.front() = std::move(new_first);
    target.layers.back() = std::move(new_last);
    target.seed = seed;

    if (report) {
        const std::size_t added_cols = new_input_dim - d_old;
        report->source_input_dim = d_old;
        report->target_input_dim = new_input_dim;
        report->source_devices = n_old;
        report->target_devices = n_new;
        report->total_parameters = parameter_count(target);
        report->new_parameters =
            added_cols * first->out_dim() + added_cols * (last->in_dim() + 1);
        report->pretrained_parameters = report->total_parameters - report->new_parameters;
        report->device_map = dev_map;
        report->seed = seed;
    }
    return target;
}

}  // namespace vbid
