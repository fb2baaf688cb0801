// Deterministic neural network engine: dense / conv1d / max-pool / LSTM
// layers over 64-bit tensors, with exact reverse-mode gradients.
//
// Volumes follow the 1-D convolution convention (H x D): H is the spatial
// (time) extent, D the channel count. Rank-1 tensors are treated as H x 1
// by conv/pool/lstm layers and flattened by dense layers.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vbid/common.hpp"
#include "vbid/tensor.hpp"

namespace vbid {

enum class Activation : std::uint8_t { linear = 0, sigmoid = 1, tanh = 2, relu = 3 };

inline double activate(Activation a, double x) {
    switch (a) {
        case Activation::linear: return x;
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::tanh: return std::tanh(x);
        case Activation::relu: return x > 0.0 ? x : 0.0;
    }
    return x;
}

// Derivative with respect to the preactivation.
inline double activate_grad(Activation a, double pre) {
    switch (a) {
        case Activation::linear: return 1.0;
        case Activation::sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-pre));
            return s * (1.0 - s);
        }
        case Activation::tanh: {
            const double t = std::tanh(pre);
            return 1.0 - t * t;
        }
        case Activation::relu: return pre > 0.0 ? 1.0 : 0.0;
    }
    return 1.0;
}

struct DenseLayer {
    Tensor W;  // out x in
    Tensor b;  // out
    Activation act = Activation::linear;

    std::size_t in_dim() const { return W.dim(1); }
    std::size_t out_dim() const { return W.dim(0); }
};

struct Conv1dLayer {
    Tensor W;  // filters x extent x in_channels
    Tensor b;  // filters
    std::size_t stride = 1;
    std::size_t pad = 0;
    Activation act = Activation::linear;

    std::size_t filters() const { return W.dim(0); }
    std::size_t extent() const { return W.dim(1); }
    std::size_t in_channels() const { return W.dim(2); }
};

struct PoolLayer {
    std::size_t extent = 2;
    std::size_t stride = 2;
};

// Peephole LSTM; gates read the previous cell state through the diagonal
// peephole vectors pc_*. Only the final hidden state is emitted.
struct LstmLayer {
    Tensor Wx_i, Wx_f, Wx_z, Wx_o;  // units x input_dim
    Tensor Wh_i, Wh_f, Wh_z, Wh_o;  // units x units
    Tensor pc_i, pc_f, pc_o;        // units
    Tensor b_i, b_f, b_z, b_o;      // units

    std::size_t units() const { return Wx_i.dim(0); }
    std::size_t input_dim() const { return Wx_i.dim(1); }
};

using Layer = std::variant<DenseLayer, Conv1dLayer, PoolLayer, LstmLayer>;

struct Network {
    std::vector<Layer> layers;
    std::uint64_t seed = 0;
};

inline DenseLayer make_dense(std::size_t in, std::size_t out, Activation act) {
    DenseLayer l;
    l.W = Tensor(out, in);
    l.b = Tensor(out);
    l.act = act;
    return l;
}

inline Conv1dLayer make_conv1d(std::size_t in_channels, std::size_t filters, std::size_t extent,
                               std::size_t stride, std::size_t pad, Activation act) {
    if (extent < 1 || stride < 1) throw std::invalid_argument("conv1d: extent and stride must be >= 1");
    Conv1dLayer l;
    l.W = Tensor(filters, extent, in_channels);
    l.b = Tensor(filters);
    l.stride = stride;
    l.pad = pad;
    l.act = act;
    return l;
}

inline LstmLayer make_lstm(std::size_t input_dim, std::size_t units) {
    LstmLayer l;
    for (Tensor* t : {&l.Wx_i, &l.Wx_f, &l.Wx_z, &l.Wx_o}) *t = Tensor(units, input_dim);
    for (Tensor* t : {&l.Wh_i, &l.Wh_f, &l.Wh_z, &l.Wh_o}) *t = Tensor(units, units);
    for (Tensor* t : {&l.pc_i, &l.pc_f, &l.pc_o}) *t = Tensor(units);
    for (Tensor* t : {&l.b_i, &l.b_f, &l.b_z, &l.b_o}) *t = Tensor(units);
    return l;
}

// Visits every trainable tensor of the network in a fixed order.
template <class Fn>
void for_each_param(Network& net, Fn&& fn) {
    for (Layer& layer : net.layers) {
        if (auto* d = std::get_if<DenseLayer>(&layer)) {
            fn(d->W);
            fn(d->b);
        } else if (auto* c = std::get_if<Conv1dLayer>(&layer)) {
            fn(c->W);
            fn(c->b);
        } else if (auto* l = std::get_if<LstmLayer>(&layer)) {
            for (Tensor* t : {&l->Wx_i, &l->Wx_f, &l->Wx_z, &l->Wx_o, &l->Wh_i, &l->Wh_f, &l->Wh_z,
                              &l->Wh_o, &l->pc_i, &l->pc_f, &l->pc_o, &l->b_i, &l->b_f, &l->b_z,
                              &l->b_o})
                fn(*t);
        }
    }
}

template <class Fn>
void for_each_param(const Network& net, Fn&& fn) {
    for_each_param(const_cast<Network&>(net), [&](Tensor& t) { fn(static_cast<const Tensor&>(t)); });
}

template <class Fn>
void for_each_param_pair(Network& a, const Network& b, Fn&& fn) {
    std::vector<const Tensor*> bs;
    for_each_param(b, [&](const Tensor& t) { bs.push_back(&t); });
    std::size_t k = 0;
    for_each_param(a, [&](Tensor& t) { fn(t, *bs.at(k++)); });
    if (k != bs.size()) throw std::invalid_argument("networks have mismatched parameter sets");
}

inline std::size_t parameter_count(const Network& net) {
    std::size_t n = 0;
    for_each_param(net, [&](const Tensor& t) { n += t.size(); });
    return n;
}

// Structure copy with all parameters zeroed; used as a gradient accumulator.
inline Network zero_like(const Network& net) {
    Network g = net;
    for_each_param(g, [](Tensor& t) { t.fill(0.0); });
    return g;
}

// Seeded Glorot-uniform weights, zero biases.
inline void init_weights(Network& net, std::uint64_t seed) {
    net.seed = seed;
    auto rng = make_rng(seed);
    auto uniform = [&](Tensor& t, double fan_in, double fan_out) {
        const double r = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-r, r);
        for (double& x : t.data()) x = dist(rng);
    };
    for (Layer& layer : net.layers) {
        if (auto* d = std::get_if<DenseLayer>(&layer)) {
            uniform(d->W, double(d->in_dim()), double(d->out_dim()));
            d->b.fill(0.0);
        } else if (auto* c = std::get_if<Conv1dLayer>(&layer)) {
            uniform(c->W, double(c->extent() * c->in_channels()), double(c->filters()));
            c->b.fill(0.0);
        } else if (auto* l = std::get_if<LstmLayer>(&layer)) {
            const double D = double(l->input_dim()), N = double(l->units());
            for (Tensor* t : {&l->Wx_i, &l->Wx_f, &l->Wx_z, &l->Wx_o}) uniform(*t, D, N);
            for (Tensor* t : {&l->Wh_i, &l->Wh_f, &l->Wh_z, &l->Wh_o}) uniform(*t, N, N);
            for (Tensor* t : {&l->pc_i, &l->pc_f, &l->pc_o}) uniform(*t, N, N);
            for (Tensor* t : {&l->b_i, &l->b_f, &l->b_z, &l->b_o}) t->fill(0.0);
        }
    }
}

namespace detail {

inline void volume_dims(const Tensor& x, std::size_t& h, std::size_t& d) {
    if (x.rank() == 1) {
        h = x.dim(0);
        d = 1;
    } else if (x.rank() == 2) {
        h = x.dim(0);
        d = x.dim(1);
    } else {
        throw std::invalid_argument("expected rank-1 or rank-2 input volume");
    }
}

}  // namespace detail

// Output length of a 1-D convolution; throws when the stride does not
// divide the padded extent evenly.
inline std::size_t conv1d_out_len(std::size_t h1, std::size_t extent, std::size_t stride,
                                  std::size_t pad) {
    const std::size_t padded = h1 + 2 * pad;
    if (padded < extent) throw std::invalid_argument("conv1d: input shorter than filter extent");
    if ((padded - extent) % stride != 0)
        throw std::invalid_argument("conv1d: (H - F + 2P) not divisible by stride");
    return (padded - extent) / stride + 1;
}

inline std::size_t pool_out_len(std::size_t h, std::size_t extent, std::size_t stride) {
    if (h < extent) throw std::invalid_argument("pool: input shorter than window");
    if ((h - extent) % stride != 0)
        throw std::invalid_argument("pool: (H - F) not divisible by stride");
    return (h - extent) / stride + 1;
}

// ---------------------------------------------------------------------------
// Forward pass with per-layer caches for the backward pass.

struct DenseTrace {
    Tensor input;  // original shape
    Tensor pre;    // out
};

struct ConvTrace {
    Tensor input;  // H x D
    Tensor pre;    // H2 x K
};

struct PoolTrace {
    std::size_t in_h = 0, in_d = 0;
    Tensor out;                      // H3 x D
    std::vector<std::size_t> argmax;  // flat input index per output cell
};

struct LstmTrace {
    Tensor input;               // T x D
    Tensor ig, fg, zg, og, cs;  // T x N each
    Tensor hs;                  // T x N
};

using LayerTrace = std::variant<DenseTrace, ConvTrace, PoolTrace, LstmTrace>;

struct ForwardTrace {
    std::vector<LayerTrace> layers;
    Tensor output;
};

inline Tensor dense_forward(const DenseLayer& l, const Tensor& x, DenseTrace* trace = nullptr) {
    if (x.size() != l.in_dim())
        throw std::invalid_argument("dense: input size " + std::to_string(x.size()) +
                                    " != expected " + std::to_string(l.in_dim()));
    const std::size_t out = l.out_dim(), in = l.in_dim();
    Tensor pre(out);
    auto xv = x.data();
    for (std::size_t i = 0; i < out; ++i) {
        double acc = l.b[i];
        const double* w = &l.W.data()[i * in];
        for (std::size_t j = 0; j < in; ++j) acc += w[j] * xv[j];
        pre[i] = acc;
    }
    Tensor y(out);
    for (std::size_t i = 0; i < out; ++i) y[i] = activate(l.act, pre[i]);
    if (trace) {
        trace->input = x;
        trace->pre = std::move(pre);
    }
    return y;
}

inline Tensor conv1d_forward(const Conv1dLayer& l, const Tensor& x, ConvTrace* trace = nullptr) {
    std::size_t h1 = 0, d1 = 0;
    detail::volume_dims(x, h1, d1);
    if (d1 != l.in_channels()) throw std::invalid_argument("conv1d: channel mismatch");
    const std::size_t h2 = conv1d_out_len(h1, l.extent(), l.stride, l.pad);
    const std::size_t K = l.filters(), F = l.extent();
    Tensor xin = x.rank() == 2 ? x : x.reshaped(h1, 1);
    Tensor pre(h2, K);
    for (std::size_t j = 0; j < h2; ++j) {
        const std::ptrdiff_t start = std::ptrdiff_t(j * l.stride) - std::ptrdiff_t(l.pad);
        for (std::size_t k = 0; k < K; ++k) {
            double acc = l.b[k];
            for (std::size_t f = 0; f < F; ++f) {
                const std::ptrdiff_t p = start + std::ptrdiff_t(f);
                if (p < 0 || p >= std::ptrdiff_t(h1)) continue;  // zero padding
                for (std::size_t d = 0; d < d1; ++d) acc += l.W(k, f, d) * xin(std::size_t(p), d);
            }
            pre(j, k) = acc;
        }
    }
    Tensor y(h2, K);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = activate(l.act, pre[i]);
    if (trace) {
        trace->input = std::move(xin);
        trace->pre = std::move(pre);
    }
    return y;
}

inline Tensor pool_forward(const PoolLayer& l, const Tensor& x, PoolTrace* trace = nullptr) {
    std::size_t h = 0, d = 0;
    detail::volume_dims(x, h, d);
    const std::size_t h3 = pool_out_len(h, l.extent, l.stride);
    Tensor xin = x.rank() == 2 ? x : x.reshaped(h, 1);
    Tensor y(h3, d);
    std::vector<std::size_t> argmax(h3 * d);
    for (std::size_t j = 0; j < h3; ++j) {
        for (std::size_t c = 0; c < d; ++c) {
            std::size_t best = j * l.stride;
            double m = xin(best, c);
            for (std::size_t f = 1; f < l.extent; ++f) {
                const std::size_t p = j * l.stride + f;
                if (xin(p, c) > m) {
                    m = xin(p, c);
                    best = p;
                }
            }
            y(j, c) = m;
            argmax[j * d + c] = best * d + c;
        }
    }
    if (trace) {
        trace->in_h = h;
        trace->in_d = d;
        trace->out = y;
        trace->argmax = std::move(argmax);
    }
    return y;
}

inline std::pair<Tensor, Tensor> lstm_forward(const LstmLayer& l, const Tensor& x,
                                              LstmTrace* trace = nullptr) {
    std::size_t T = 0, d = 0;
    detail::volume_dims(x, T, d);
    if (d != l.input_dim()) throw std::invalid_argument("lstm: input dim mismatch");
    const std::size_t N = l.units();
    Tensor xin = x.rank() == 2 ? x : x.reshaped(T, 1);
    Tensor ig(T, N), fg(T, N), zg(T, N), og(T, N), cs(T, N), hs(T, N);
    std::vector<double> h_prev(N, 0.0), c_prev(N, 0.0);
    auto matvec = [&](const Tensor& W, const double* v, std::size_t vdim, std::size_t row) {
        double acc = 0.0;
        const double* w = &W.data()[row * vdim];
        for (std::size_t j = 0; j < vdim; ++j) acc += w[j] * v[j];
        return acc;
    };
    for (std::size_t t = 0; t < T; ++t) {
        const double* xt = &xin.data()[t * d];
        for (std::size_t n = 0; n < N; ++n) {
            const double ai = matvec(l.Wx_i, xt, d, n) + matvec(l.Wh_i, h_prev.data(), N, n) +
                              l.pc_i[n] * c_prev[n] + l.b_i[n];
            const double af = matvec(l.Wx_f, xt, d, n) + matvec(l.Wh_f, h_prev.data(), N, n) +
                              l.pc_f[n] * c_prev[n] + l.b_f[n];
            const double az = matvec(l.Wx_z, xt, d, n) + matvec(l.Wh_z, h_prev.data(), N, n) +
                              l.b_z[n];
            const double ao = matvec(l.Wx_o, xt, d, n) + matvec(l.Wh_o, h_prev.data(), N, n) +
                              l.pc_o[n] * c_prev[n] + l.b_o[n];
            ig(t, n) = activate(Activation::sigmoid, ai);
            fg(t, n) = activate(Activation::sigmoid, af);
            zg(t, n) = activate(Activation::tanh, az);
            og(t, n) = activate(Activation::sigmoid, ao);
            cs(t, n) = fg(t, n) * c_prev[n] + ig(t, n) * zg(t, n);
            hs(t, n) = og(t, n) * std::tanh(cs(t, n));
        }
        for (std::size_t n = 0; n < N; ++n) {
            c_prev[n] = cs(t, n);
            h_prev[n] = hs(t, n);
        }
    }
    Tensor h_last(N);
    for (std::size_t n = 0; n < N; ++n) h_last[n] = T > 0 ? hs(T - 1, n) : 0.0;
    Tensor c_last(N);
    for (std::size_t n = 0; n < N; ++n) c_last[n] = T > 0 ? cs(T - 1, n) : 0.0;
    if (trace) {
        trace->input = std::move(xin);
        trace->ig = std::move(ig);
        trace->fg = std::move(fg);
        trace->zg = std::move(zg);
        trace->og = std::move(og);
        trace->cs = std::move(cs);
        trace->hs = std::move(hs);
    }
    return {h_last, c_last};
}

inline Tensor forward(const Network& net, const Tensor& input, ForwardTrace* trace = nullptr) {
    Tensor x = input;
    if (trace) {
        trace->layers.clear();
        trace->layers.reserve(net.layers.size());
    }
    for (const Layer& layer : net.layers) {
        if (const auto* dl = std::get_if<DenseLayer>(&layer)) {
            DenseTrace t;
            Tensor flat = x.rank() == 1 ? x : x.flattened();
            Tensor y = dense_forward(*dl, flat, trace ? &t : nullptr);
            if (trace) {
                t.input = x;  // keep original shape for the backward reshape
                trace->layers.emplace_back(std::move(t));
            }
            x = std::move(y);
        } else if (const auto* cl = std::get_if<Conv1dLayer>(&layer)) {
            ConvTrace t;
            Tensor y = conv1d_forward(*cl, x, trace ? &t : nullptr);
            if (trace) trace->layers.emplace_back(std::move(t));
            x = std::move(y);
        } else if (const auto* pl = std::get_if<PoolLayer>(&layer)) {
            PoolTrace t;
            Tensor y = pool_forward(*pl, x, trace ? &t : nullptr);
            if (trace) trace->layers.emplace_back(std::move(t));
            x = std::move(y);
        } else if (const auto* ll = std::get_if<LstmLayer>(&layer)) {
            LstmTrace t;
            auto [h, c] = lstm_forward(*ll, x, trace ? &t : nullptr);
            if (trace) trace->layers.emplace_back(std::move(t));
            x = std::move(h);
        }
    }
    if (trace) trace->output = x;
    return x;
}

// ---------------------------------------------------------------------------
// Reverse-mode gradients. `grads` must be zero_like(net) or an accumulator
// with the same structure; returns the gradient w.r.t. the network input.

inline Tensor backward(const Network& net, const ForwardTrace& trace, const Tensor& d_output,
                       Network& grads) {
    if (trace.layers.size() != net.layers.size())
        throw std::invalid_argument("backward: trace does not match network");
    Tensor dy = d_output;
    for (std::size_t li = net.layers.size(); li-- > 0;) {
        const Layer& layer = net.layers[li];
        Layer& glayer = grads.layers[li];
        if (const auto* dl = std::get_if<DenseLayer>(&layer)) {
            const auto& t = std::get<DenseTrace>(trace.layers[li]);
            auto& g = std::get<DenseLayer>(glayer);
            const std::size_t out = dl->out_dim(), in = dl->in_dim();
            Tensor dpre(out);
            for (std::size_t i = 0; i < out; ++i)
                dpre[i] = dy[i] * activate_grad(dl->act, t.pre[i]);
            auto xflat = t.input.data();
            for (std::size_t i = 0; i < out; ++i) {
                double* gw = &g.W.data()[i * in];
                const double di = dpre[i];
                for (std::size_t j = 0; j < in; ++j) gw[j] += di * xflat[j];
                g.b[i] += di;
            }
            Tensor dx = t.input;  // same shape as the layer input
            auto dxv = dx.data();
            for (std::size_t j = 0; j < in; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < out; ++i) acc += dl->W(i, j) * dpre[i];
                dxv[j] = acc;
            }
            dy = std::move(dx);
        } else if (const auto* cl = std::get_if<Conv1dLayer>(&layer)) {
            const auto& t = std::get<ConvTrace>(trace.layers[li]);
            auto& g = std::get<Conv1dLayer>(glayer);
            const std::size_t h2 = t.pre.dim(0), K = cl->filters(), F = cl->extent();
            const std::size_t h1 = t.input.dim(0), d1 = t.input.dim(1);
            Tensor dpre(h2, K);
            for (std::size_t i = 0; i < dpre.size(); ++i)
                dpre[i] = dy[i] * activate_grad(cl->act, t.pre[i]);
            Tensor dx(h1, d1);
            for (std::size_t j = 0; j < h2; ++j) {
                const std::ptrdiff_t start = std::ptrdiff_t(j * cl->stride) - std::ptrdiff_t(cl->pad);
                for (std::size_t k = 0; k < K; ++k) {
                    const double dj = dpre(j, k);
                    g.b[k] += dj;
                    for (std::size_t f = 0; f < F; ++f) {
                        const std::ptrdiff_t p = start + std::ptrdiff_t(f);
                        if (p < 0 || p >= std::ptrdiff_t(h1)) continue;
                        for (std::size_t d = 0; d < d1; ++d) {
                            g.W(k, f, d) += dj * t.input(std::size_t(p), d);
                            dx(std::size_t(p), d) += dj * cl->W(k, f, d);
                        }
                    }
                }
            }
            dy = std::move(dx);
        } else if (std::get_if<PoolLayer>(&layer)) {
            const auto& t = std::get<PoolTrace>(trace.layers[li]);
            Tensor dx(t.in_h, t.in_d);
            for (std::size_t i = 0; i < t.argmax.size(); ++i) dx[t.argmax[i]] += dy[i];
            dy = std::move(dx);
        } else if (const auto* ll = std::get_if<LstmLayer>(&layer)) {
            const auto& t = std::get<LstmTrace>(trace.layers[li]);
            auto& g = std::get<LstmLayer>(glayer);
            const std::size_t T = t.input.dim(0), D = t.input.dim(1), N = ll->units();
            Tensor dx(T, D);
            std::vector<double> dh(N, 0.0), dc(N, 0.0);
            for (std::size_t n = 0; n < N; ++n) dh[n] = dy[n];  // loss reaches only h_{T-1}
            std::vector<double> dai(N), daf(N), daz(N), dao(N);
            for (std::size_t t_i = T; t_i-- > 0;) {
                const double* c_prev = t_i > 0 ? &t.cs.data()[(t_i - 1) * N] : nullptr;
                const double* h_prev = t_i > 0 ? &t.hs.data()[(t_i - 1) * N] : nullptr;
                for (std::size_t n = 0; n < N; ++n) {
                    const double cp = c_prev ? c_prev[n] : 0.0;
                    const double i_ = t.ig(t_i, n), f_ = t.fg(t_i, n), z_ = t.zg(t_i, n),
                                 o_ = t.og(t_i, n), c_ = t.cs(t_i, n);
                    const double tc = std::tanh(c_);
                    const double do_ = dh[n] * tc;
                    double dc_n = dc[n] + dh[n] * o_ * (1.0 - tc * tc);
                    dao[n] = do_ * o_ * (1.0 - o_);
                    dai[n] = dc_n * z_ * i_ * (1.0 - i_);
                    daf[n] = dc_n * cp * f_ * (1.0 - f_);
                    daz[n] = dc_n * i_ * (1.0 - z_ * z_);
                    // carry to c_{t-1}: through the forget gate and peepholes
                    dc[n] = dc_n * f_ + dai[n] * ll->pc_i[n] + daf[n] * ll->pc_f[n] +
                            dao[n] * ll->pc_o[n];
                }
                const double* xt = &t.input.data()[t_i * D];
                for (std::size_t n = 0; n < N; ++n) {
                    const double cp = c_prev ? c_prev[n] : 0.0;
                    g.pc_i[n] += dai[n] * cp;
                    g.pc_f[n] += daf[n] * cp;
                    g.pc_o[n] += dao[n] * cp;
                    g.b_i[n] += dai[n];
                    g.b_f[n] += daf[n];
                    g.b_z[n] += daz[n];
                    g.b_o[n] += dao[n];
                    for (std::size_t j = 0; j < D; ++j) {
                        g.Wx_i(n, j) += dai[n] * xt[j];
                        g.Wx_f(n, j) += daf[n] * xt[j];
                        g.Wx_z(n, j) += daz[n] * xt[j];
                        g.Wx_o(n, j) += dao[n] * xt[j];
                    }
                    if (h_prev) {
                        for (std::size_t j = 0; j < N; ++j) {
                            g.Wh_i(n, j) += dai[n] * h_prev[j];
                            g.Wh_f(n, j) += daf[n] * h_prev[j];
                            g.Wh_z(n, j) += daz[n] * h_prev[j];
                            g.Wh_o(n, j) += dao[n] * h_prev[j];
                        }
                    }
                }
                for (std::size_t j = 0; j < D; ++j) {
                    double acc = 0.0;
                    for (std::size_t n = 0; n < N; ++n)
                        acc += ll->Wx_i(n, j) * dai[n] + ll->Wx_f(n, j) * daf[n] +
                               ll->Wx_z(n, j) * daz[n] + ll->Wx_o(n, j) * dao[n];
                    dx(t_i, j) = acc;
                }
                std::vector<double> dh_prev(N, 0.0);
                for (std::size_t j = 0; j < N; ++j) {
                    double acc = 0.0;
                    for (std::size_t n = 0; n < N; ++n)
                        acc += ll->Wh_i(n, j) * dai[n] + ll->Wh_f(n, j) * daf[n] +
                               ll->Wh_z(n, j) * daz[n] + ll->Wh_o(n, j) * dao[n];
                    dh_prev[j] = acc;
                }
                dh = std::move(dh_prev);
            }
            dy = std::move(dx);
        }
    }
    return dy;
}

}  // namespace vbid
