#pragma once

// Per-feature min-max scaling. Statistics come from training rows only;
// other rows are transformed with those statistics and may leave [0,1].

#include <cstddef>
#include <vector>

#include "lagtrend/matrix.hpp"

namespace lagtrend {

struct Scaler {
    std::vector<double> feature_min;
    std::vector<double> feature_max;

    double transform(std::size_t feature, double v) const {
        const double lo = feature_min[feature];
        const double hi = feature_max[feature];
        if (hi == lo) return 0.0;  // constant feature
        return (v - lo) / (hi - lo);
    }
};

inline Scaler fit_scaler(const Matrix& rows, const std::vector<std::size_t>& training_rows) {
    if (training_rows.empty()) throw std::runtime_error("fit_scaler: empty training set");
    Scaler sc;
    sc.feature_min.assign(rows.cols, 0.0);
    sc.feature_max.assign(rows.cols, 0.0);
    for (std::size_t c = 0; c < rows.cols; ++c) {
        double lo = rows.at(training_rows[0], c);
        double hi = lo;
        for (std::size_t r : training_rows) {
            const double v = rows.at(r, c);
            if (v < lo) lo = v;
            if (v > hi) hi = v;
        }
        sc.feature_min[c] = lo;
        sc.feature_max[c] = hi;
    }
    return sc;
}

inline Matrix apply_scaler(const Scaler& sc, const Matrix& rows) {
    if (sc.feature_min.size() != rows.cols) throw std::runtime_error("apply_scaler: feature count mismatch");
    Matrix out(rows.rows, rows.cols);
    for (std::size_t r = 0; r < rows.rows; ++r)
        for (std::size_t c = 0; c < rows.cols; ++c) out.at(r, c) = sc.transform(c, rows.at(r, c));
    return out;
}

}  // namespace lagtrend
