#pragma once

// Reference predictors the classifier is measured against: a shuffled copy
// of its own predictions (same class counts, alignment destroyed), the two
// constant one-class predictors, the better of those two, and a linear
// support vector classifier trained by subgradient descent on the hinge
// loss with an l2 penalty.

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <utility>
#include <vector>

#include "lagtrend/dataset.hpp"
#include "lagtrend/matrix.hpp"
#include "lagtrend/rng.hpp"
#include "lagtrend/stats.hpp"

namespace lagtrend {

// Seeded random permutation of the model's own predictions. The multiset of
// classes is preserved exactly.
inline std::vector<int> shuffled_mock(const std::vector<int>& predictions, std::uint64_t seed) {
    require(!predictions.empty(), "shuffled mock: empty predictions");
    std::vector<int> shuffled = predictions;
    Rng rng(derive_seed(seed, hash_string("shuffled-mock")));
    rng.shuffle(shuffled);
    return shuffled;
}

inline std::vector<int> constant_mock(std::size_t length, int cls) {
    require(length > 0, "constant mock: empty length");
    return std::vector<int>(length, cls);
}

inline std::pair<std::vector<int>, std::vector<int>> one_class_mocks(std::size_t length) {
    return {constant_mock(length, kClassDown), constant_mock(length, kClassUp)};
}

// Maximum of the three mock accuracies; >= 0.5 because the one-class
// accuracies sum to 1.
inline double best_of(double acc_rand, double acc_class1, double acc_class2) {
    return std::max(acc_rand, std::max(acc_class1, acc_class2));
}

struct BaselineSet {
    std::vector<int> shuffled;
    std::vector<int> all_down;
    std::vector<int> all_up;
    double rand = 0.0;     // shuffled mock accuracy
    double class1 = 0.0;   // constant DOWN accuracy
    double class2 = 0.0;   // constant UP accuracy
    double best_of = 0.0;  // max of the three
};

inline BaselineSet make_baseline_set(const std::vector<int>& model_predictions, const std::vector<int>& actual,
                                     std::uint64_t seed) {
    BaselineSet b;
    b.shuffled = shuffled_mock(model_predictions, seed);
    std::tie(b.all_down, b.all_up) = one_class_mocks(actual.size());
    b.rand = accuracy(b.shuffled, actual);
    b.class1 = accuracy(b.all_down, actual);
    b.class2 = accuracy(b.all_up, actual);
    b.best_of = lagtrend::best_of(b.rand, b.class1, b.class2);
    return b;
}

struct LinearClassifier {
    std::vector<double> weights;
    double bias = 0.0;
};

struct SvcConfig {
    double l2 = 1e-4;
    int epochs = 100;
    double step = 0.01;
    std::uint64_t seed = 0;

    void validate() const {
        if (l2 < 0.0 || epochs < 1 || !(step > 0.0)) throw std::runtime_error("svc config: invalid parameters");
    }
};

// Margin sign decides the class; the zero classifier predicts DOWN
// everywhere.
inline int predict_linear_row(const LinearClassifier& cls, std::span<const double> x) {
    double margin = cls.bias;
    for (std::size_t i = 0; i < x.size(); ++i) margin += cls.weights[i] * x[i];
    return margin > 0.0 ? kClassUp : kClassDown;
}

inline std::vector<int> predict_linear(const LinearClassifier& cls, const Matrix& inputs,
                                       const std::vector<std::size_t>& rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(predict_linear_row(cls, inputs.row(r)));
    return out;
}

// Subgradient descent on  (1/n) sum max(0, 1 - y (w.x + b)) + (l2/2) |w|^2
// with y = +1 for UP and -1 for DOWN. Rows are visited one at a time in a
// seeded shuffled order each epoch; the bias carries no penalty.
inline LinearClassifier train_linear_svc(const Matrix& inputs, const Matrix& labels,
                                         const std::vector<std::size_t>& train_rows, const SvcConfig& cfg) {
    cfg.validate();
    require(!train_rows.empty(), "svc: empty training split");
    LinearClassifier cls;
    cls.weights.assign(inputs.cols, 0.0);
    Rng rng(derive_seed(cfg.seed, hash_string("svc")));
    std::vector<std::size_t> order = train_rows;
    const double inv_n = 1.0 / static_cast<double>(train_rows.size());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t r : order) {
            const auto x = inputs.row(r);
            const double y = label_class(labels, r) == kClassUp ? 1.0 : -1.0;
            double margin = cls.bias;
            for (std::size_t i = 0; i < x.size(); ++i) margin += cls.weights[i] * x[i];
            const bool active = y * margin < 1.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                double g = cfg.l2 * cls.weights[i];
                if (active) g -= y * x[i] * inv_n;
                cls.weights[i] -= cfg.step * g;
            }
            if (active) cls.bias += cfg.step * y * inv_n;
        }
    }
    return cls;
}

}  // namespace lagtrend
