// VBNN model container: magic "VBNN", version, layer spec table, then named
// 64-bit little-endian weight blobs in network traversal order. Writing the
// same network twice produces byte-identical files.
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "vbid/common.hpp"
#include "vbid/forecaster.hpp"
#include "vbid/network.hpp"

namespace vbid {

enum class ModelKind : std::uint8_t { generic = 0, sae = 1, forecaster = 2 };

namespace detail {

inline std::vector<std::string> tensor_names(const Layer& layer, std::size_t index) {
    const std::string p = "layer" + std::to_string(index) + ".";
    if (std::holds_alternative<DenseLayer>(layer)) return {p + "W", p + "b"};
    if (std::holds_alternative<Conv1dLayer>(layer)) return {p + "W", p + "b"};
    if (std::holds_alternative<PoolLayer>(layer)) return {};
    return {p + "Wx_i", p + "Wx_f", p + "Wx_z", p + "Wx_o", p + "Wh_i", p + "Wh_f",
            p + "Wh_z", p + "Wh_o", p + "pc_i", p + "pc_f", p + "pc_o", p + "b_i",
            p + "b_f",  p + "b_z",  p + "b_o"};
}

template <class T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
void get(std::ifstream& in, T& v, const std::string& path) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw DataError("truncated model file: " + path);
}

}  // namespace detail

inline void save_network(const std::string& path, const Network& net,
                         ModelKind kind = ModelKind::generic, std::uint64_t aux = 0) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out.write("VBNN", 4);
    detail::put(out, std::uint16_t{1});
    detail::put(out, std::uint8_t(kind));
    detail::put(out, aux);
    detail::put(out, net.seed);
    detail::put(out, std::uint32_t(net.layers.size()));
    for (const Layer& layer : net.layers) {
        if (const auto* d = std::get_if<DenseLayer>(&layer)) {
            detail::put(out, std::uint8_t{0});
            detail::put(out, std::uint8_t(d->act));
            detail::put(out, std::uint64_t(d->out_dim()));
            detail::put(out, std::uint64_t(d->in_dim()));
        } else if (const auto* c = std::get_if<Conv1dLayer>(&layer)) {
            detail::put(out, std::uint8_t{1});
            detail::put(out, std::uint8_t(c->act));
            detail::put(out, std::uint64_t(c->filters()));
            detail::put(out, std::uint64_t(c->extent()));
            detail::put(out, std::uint64_t(c->in_channels()));
            detail::put(out, std::uint64_t(c->stride));
            detail::put(out, std::uint64_t(c->pad));
        } else if (const auto* pl = std::get_if<PoolLayer>(&layer)) {
            detail::put(out, std::uint8_t{2});
            detail::put(out, std::uint8_t{0});
            detail::put(out, std::uint64_t(pl->extent));
            detail::put(out, std::uint64_t(pl->stride));
        } else if (const auto* l = std::get_if<LstmLayer>(&layer)) {
            detail::put(out, std::uint8_t{3});
            detail::put(out, std::uint8_t{0});
            detail::put(out, std::uint64_t(l->units()));
            detail::put(out, std::uint64_t(l->input_dim()));
        }
    }
    // blobs, named, in traversal order
    std::vector<std::string> names;
    for (std::size_t i = 0; i < net.layers.size(); ++i)
        for (auto& n : detail::tensor_names(net.layers[i], i)) names.push_back(n);
    std::size_t k = 0;
    for_each_param(net, [&](const Tensor& t) {
        const std::string& name = names.at(k++);
        detail::put(out, std::uint16_t(name.size()));
        out.write(name.data(), std::streamsize(name.size()));
        detail::put(out, std::uint64_t(t.size()));
        out.write(reinterpret_cast<const char*>(t.data().data()),
                  std::streamsize(t.size() * sizeof(double)));
    });
    if (!out) throw DataError("short write: " + path);
}

struct LoadedModel {
    Network net;
    ModelKind kind = ModelKind::generic;
    std::uint64_t aux = 0;
};

inline LoadedModel load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path);
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "VBNN", 4) != 0) throw DataError("not a VBNN file: " + path);
    std::uint16_t version = 0;
    detail::get(in, version, path);
    if (version != 1) throw DataError("unsupported VBNN version in " + path);
    LoadedModel m;
    std::uint8_t kind = 0;
    detail::get(in, kind, path);
    m.kind = ModelKind(kind);
    detail::get(in, m.aux, path);
    detail::get(in, m.net.seed, path);
    std::uint32_t layer_count = 0;
    detail::get(in, layer_count, path);
    for (std::uint32_t i = 0; i < layer_count; ++i) {
        std::uint8_t lk = 0, act = 0;
        detail::get(in, lk, path);
        detail::get(in, act, path);
        auto u64 = [&] {
            std::uint64_t v = 0;
            detail::get(in, v, path);
            return std::size_t(v);
        };
        switch (lk) {
            case 0: {
                const std::size_t out_dim = u64(), in_dim = u64();
                m.net.layers.emplace_back(make_dense(in_dim, out_dim, Activation(act)));
                break;
            }
            case 1: {
                const std::size_t filters = u64(), extent = u64(), channels = u64();
                const std::size_t stride = u64(), pad = u64();
                m.net.layers.emplace_back(
                    make_conv1d(channels, filters, extent, stride, pad, Activation(act)));
                break;
            }
            case 2: {
                const std::size_t extent = u64(), stride = u64();
                m.net.layers.emplace_back(PoolLayer{extent, stride});
                break;
            }
            case 3: {
                const std::size_t units = u64(), input_dim = u64();
                m.net.layers.emplace_back(make_lstm(input_dim, units));
                break;
            }
            default:
                throw DataError("unknown layer kind in " + path);
        }
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < m.net.layers.size(); ++i)
        for (auto& n : detail::tensor_names(m.net.layers[i], i)) names.push_back(n);
    std::size_t k = 0;
    for_each_param(m.net, [&](Tensor& t) {
        std::uint16_t len = 0;
        detail::get(in, len, path);
        std::string name(len, '\0');
        in.read(name.data(), len);
        if (!in || name != names.at(k))
            throw DataError("model blob order mismatch at '" + name + "' in " + path);
        std::uint64_t count = 0;
        detail::get(in, count, path);
        if (count != t.size()) throw DataError("model blob size mismatch for " + name + " in " + path);
        in.read(reinterpret_cast<char*>(t.data().data()), std::streamsize(count * sizeof(double)));
        if (!in) throw DataError("truncated blob " + name + " in " + path);
        ++k;
    });
    return m;
}

inline void save_forecaster(const std::string& path, const ForecastModel& m) {
    save_network(path, m.net, ModelKind::forecaster, m.window_d);
}

inline ForecastModel load_forecaster(const std::string& path) {
    LoadedModel lm = load_network(path);
    if (lm.kind != ModelKind::forecaster)
        throw DataError("not a forecaster model: " + path);
    ForecastModel m;
    m.net = std::move(lm.net);
    m.window_d = std::size_t(lm.aux);
    if (m.window_d == 0) throw DataError("forecaster model missing window size: " + path);
    return m;
}

}  // namespace vbid
