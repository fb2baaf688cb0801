// Dense row-major value containers: Tensor (rank <= 3) for network
// activations and weights, Matrix for datasets.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vbid {

class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::size_t d0) : rank_(1), dims_{d0, 1, 1}, v_(d0, 0.0) {}
    Tensor(std::size_t d0, std::size_t d1) : rank_(2), dims_{d0, d1, 1}, v_(d0 * d1, 0.0) {}
    Tensor(std::size_t d0, std::size_t d1, std::size_t d2)
        : rank_(3), dims_{d0, d1, d2}, v_(d0 * d1 * d2, 0.0) {}

    std::size_t rank() const { return rank_; }
    std::size_t dim(std::size_t axis) const { return dims_[axis]; }
    std::size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }

    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }

    double& operator()(std::size_t i) { return v_[i]; }
    double operator()(std::size_t i) const { return v_[i]; }
    double& operator()(std::size_t i, std::size_t j) { return v_[i * dims_[1] + j]; }
    double operator()(std::size_t i, std::size_t j) const { return v_[i * dims_[1] + j]; }
    double& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return v_[(i * dims_[1] + j) * dims_[2] + k];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return v_[(i * dims_[1] + j) * dims_[2] + k];
    }

    std::span<double> data() { return v_; }
    std::span<const double> data() const { return v_; }

    void fill(double x) { std::fill(v_.begin(), v_.end(), x); }

    bool all_finite() const {
        for (double x : v_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    // Reinterprets a rank-1 tensor as (rows x cols) without copying layout;
    // row-major data is shared semantics, so this is a cheap shape change.
    Tensor reshaped(std::size_t rows, std::size_t cols) const {
        if (rows * cols != size()) throw std::invalid_argument("tensor reshape size mismatch");
        Tensor t;
        t.rank_ = 2;
        t.dims_ = {rows, cols, 1};
        t.v_ = v_;
        return t;
    }

    Tensor flattened() const {
        Tensor t;
        t.rank_ = 1;
        t.dims_ = {size(), 1, 1};
        t.v_ = v_;
        return t;
    }

    bool same_shape(const Tensor& o) const { return rank_ == o.rank_ && dims_ == o.dims_; }

private:
    std::size_t rank_ = 0;
    std::array<std::size_t, 3> dims_{0, 0, 0};
    std::vector<double> v_;
};

inline Tensor tensor_from(std::span<const double> values) {
    Tensor t(values.size());
    std::copy(values.begin(), values.end(), t.data().begin());
    return t;
}

// Row-major real matrix used for datasets and supervised training pairs.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {v.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {v.data() + r * cols, cols}; }

    bool empty() const { return rows == 0 || cols == 0; }
};

}  // namespace vbid
