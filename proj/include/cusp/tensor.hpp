#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "cusp/errors.hpp"

namespace cusp {

// Dense row-major n-dimensional array of doubles.
class Tensor {
  public:
    Tensor() = default;

    explicit Tensor(std::vector<int> shape)
        : shape_(std::move(shape)), data_(checked_numel(shape_), 0.0) {}

    Tensor(std::vector<int> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (checked_numel(shape_) != data_.size()) {
            throw UsageError("tensor: shape/data length mismatch");
        }
    }

    static Tensor scalar(double v) { return Tensor({1}, {v}); }

    const std::vector<int>& shape() const { return shape_; }
    std::size_t numel() const { return data_.size(); }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& vec() { return data_; }
    const std::vector<double>& vec() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    // 3-d accessor for [C,H,W] images.
    double& at(int c, int h, int w) {
        return data_[static_cast<std::size_t>((c * shape_[1] + h) * shape_[2] + w)];
    }
    double at(int c, int h, int w) const {
        return data_[static_cast<std::size_t>((c * shape_[1] + h) * shape_[2] + w)];
    }

    // 2-d accessor for [rows, cols] matrices.
    double& at(int r, int c) {
        return data_[static_cast<std::size_t>(r * shape_[1] + c)];
    }
    double at(int r, int c) const {
        return data_[static_cast<std::size_t>(r * shape_[1] + c)];
    }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    void check_finite(const char* what) const {
        for (double v : data_) {
            if (!std::isfinite(v)) {
                throw NumericError(std::string("non-finite value in ") + what);
            }
        }
    }

    static std::size_t numel_of(const std::vector<int>& shape) {
        std::size_t n = 1;
        for (int d : shape) n *= static_cast<std::size_t>(d);
        return shape.empty() ? 0 : n;
    }

  private:
    static std::size_t checked_numel(const std::vector<int>& shape) {
        if (shape.empty()) throw UsageError("tensor: empty shape");
        for (int d : shape) {
            if (d <= 0) throw UsageError("tensor: non-positive dimension");
        }
        return numel_of(shape);
    }

    std::vector<int> shape_;
    std::vector<double> data_;
};

inline std::string shape_str(const std::vector<int>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += "x";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

}  // namespace cusp
