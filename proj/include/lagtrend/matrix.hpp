#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace lagtrend {

// Dense row-major matrix of doubles. Small on purpose; everything in the
// pipeline that is two-dimensional (panels, gradients, datasets, weights)
// goes through this.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::runtime_error(msg);
}

}  // namespace lagtrend
