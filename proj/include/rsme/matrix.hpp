#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rsme/errors.hpp"

namespace rsme {

using Vector = std::vector<double>;
using IndexSet = std::vector<std::size_t>; // sorted, unique

/// Row-major n x d matrix of observations. `corrupted_rows` records which
/// rows were replaced by an adversary (sorted, empty for clean data).
class SampleMatrix {
public:
    SampleMatrix() = default;
    SampleMatrix(std::size_t n, std::size_t d) : n_(n), d_(d), data_(n * d, 0.0) {}
    SampleMatrix(std::size_t n, std::size_t d, std::vector<double> data) : n_(n), d_(d), data_(std::move(data)) {
        if (data_.size() != n_ * d_) {
            throw ShapeError("SampleMatrix: data size does not match n*d");
        }
    }

    std::size_t rows() const { return n_; }
    std::size_t cols() const { return d_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * d_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * d_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * d_, d_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * d_, d_}; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    const IndexSet& corrupted_rows() const { return corrupted_; }
    void set_corrupted_rows(IndexSet rows) { corrupted_ = std::move(rows); }

    bool operator==(const SampleMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> data_;
    IndexSet corrupted_;
};

} // namespace rsme
