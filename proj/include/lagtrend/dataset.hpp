#pragma once

// Supervised dataset construction. Row j carries the (scaled, then
// smoothed) gradients of the input instruments at interval j; its label
// says whether the target's gradient at interval j+1 rose above the one at
// interval j. Class 0 = DOWN (ties included), class 1 = UP.

#include <string>
#include <vector>

#include "lagtrend/folds.hpp"
#include "lagtrend/matrix.hpp"
#include "lagtrend/scaler.hpp"
#include "lagtrend/slope.hpp"
#include "lagtrend/smoothing.hpp"

namespace lagtrend {

constexpr int kClassDown = 0;
constexpr int kClassUp = 1;

// n x 2 one-hot rows from t slopes, n = t - 1. Label row j compares slope
// j+1 against slope j; ties go DOWN.
inline Matrix make_labels(const std::vector<double>& target_slopes) {
    if (target_slopes.size() < 2) throw std::runtime_error("make_labels: need at least 2 slopes");
    const std::size_t n = target_slopes.size() - 1;
    Matrix labels(n, 2);
    for (std::size_t j = 0; j < n; ++j) {
        const bool up = target_slopes[j + 1] > target_slopes[j];
        labels.at(j, up ? kClassUp : kClassDown) = 1.0;
    }
    return labels;
}

inline int label_class(const Matrix& labels, std::size_t row) {
    return labels.at(row, kClassUp) == 1.0 ? kClassUp : kClassDown;
}

struct SupervisedDataset {
    std::string target;
    std::vector<std::string> input_ids;  // never contains `target` unless include_target
    bool include_target = false;
    Matrix inputs;   // n x d, scaled then smoothed
    Matrix labels;   // n x 2 one-hot
    std::vector<SplitTag> split;  // per row
    int fold_id = -1;

    std::size_t n_rows() const { return inputs.rows; }
    std::size_t dim() const { return inputs.cols; }

    std::vector<std::size_t> rows_tagged(SplitTag tag) const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < split.size(); ++i)
            if (split[i] == tag) idx.push_back(i);
        return idx;
    }
};

// Split -> normalize -> smooth, in that order. The scaler is fitted on
// training rows only; each split's feature sequences are smoothed
// independently along time so no state crosses a split boundary.
inline SupervisedDataset make_dataset(const GradientMatrix& gradients, const std::string& target,
                                      bool include_target, const SmoothingConfig& smoothing,
                                      const std::vector<SplitTag>& split, int fold_id = -1) {
    const std::size_t target_row = gradients.index_of_instrument(target);
    if (target_row == static_cast<std::size_t>(-1))
        throw std::runtime_error("make_dataset: unknown target instrument: " + target);
    const std::size_t t = gradients.interval_count();
    if (t < 2) throw std::runtime_error("make_dataset: need at least 2 intervals");
    const std::size_t n = t - 1;
    if (split.size() != n) throw std::runtime_error("make_dataset: split length must equal interval count - 1");

    SupervisedDataset ds;
    ds.target = target;
    ds.include_target = include_target;
    ds.fold_id = fold_id;
    ds.split = split;

    for (std::size_t k = 0; k < gradients.instrument_count(); ++k)
        if (include_target || k != target_row) ds.input_ids.push_back(gradients.instruments[k]);

    // raw inputs: gradients at interval j
    Matrix raw(n, ds.input_ids.size());
    {
        std::size_t c = 0;
        for (std::size_t k = 0; k < gradients.instrument_count(); ++k) {
            if (!include_target && k == target_row) continue;
            for (std::size_t j = 0; j < n; ++j) raw.at(j, c) = gradients.slopes.at(k, j);
            ++c;
        }
    }

    const Scaler sc = fit_scaler(raw, [&] {
        std::vector<std::size_t> train_rows;
        for (std::size_t i = 0; i < n; ++i)
            if (split[i] == SplitTag::train) train_rows.push_back(i);
        return train_rows;
    }());
    ds.inputs = apply_scaler(sc, raw);

    // smooth each split's sequence per feature, in time order
    for (SplitTag tag : {SplitTag::train, SplitTag::validation, SplitTag::test}) {
        const auto rows = ds.rows_tagged(tag);
        if (rows.empty()) continue;
        std::vector<double> series(rows.size());
        for (std::size_t c = 0; c < ds.inputs.cols; ++c) {
            for (std::size_t i = 0; i < rows.size(); ++i) series[i] = ds.inputs.at(rows[i], c);
            const auto smoothed = exponential_smooth(series, smoothing);
            for (std::size_t i = 0; i < rows.size(); ++i) ds.inputs.at(rows[i], c) = smoothed[i];
        }
    }

    std::vector<double> target_slopes(t);
    for (std::size_t j = 0; j < t; ++j) target_slopes[j] = gradients.slopes.at(target_row, j);
    ds.labels = make_labels(target_slopes);
    return ds;
}

}  // namespace lagtrend
