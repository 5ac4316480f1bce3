#pragma once

// Evaluation statistics: accuracy, rank-based AUC, Welch's upper-tail
// t-test (with the Student-t distribution evaluated through the regularized
// incomplete beta function), distribution quantiles and notched box-plot
// summaries. No statistics library is used; the continued fraction for the
// incomplete beta is evaluated directly.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "lagtrend/matrix.hpp"

namespace lagtrend {

inline double accuracy(const std::vector<int>& predicted, const std::vector<int>& actual) {
    require(!predicted.empty(), "accuracy: empty prediction vector");
    require(predicted.size() == actual.size(), "accuracy: size mismatch");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == actual[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

// Area under the ROC curve from scores for the positive class, computed via
// midranks so ties contribute 1/2. Equal to the Mann-Whitney U statistic
// normalized by n1*n0.
inline double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    require(!scores.empty(), "auc: empty input");
    require(scores.size() == labels.size(), "auc: size mismatch");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    std::vector<double> rank(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based midrank
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }

    std::size_t n_pos = 0;
    double rank_sum_pos = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (labels[k] == 1) {
            ++n_pos;
            rank_sum_pos += rank[k];
        } else {
            require(labels[k] == 0, "auc: labels must be 0 or 1");
        }
    }
    const std::size_t n_neg = n - n_pos;
    require(n_pos > 0 && n_neg > 0, "auc: needs both classes present");
    const double np = static_cast<double>(n_pos);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

struct MeanVar {
    double mean = 0.0;
    double variance = 0.0;  // sample variance, n-1 denominator
    std::size_t n = 0;
};

inline double mean_of(const std::vector<double>& xs) {
    require(!xs.empty(), "mean: empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline MeanVar mean_and_variance(const std::vector<double>& xs) {
    require(xs.size() >= 2, "variance: needs at least two observations");
    MeanVar mv;
    mv.n = xs.size();
    mv.mean = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - mv.mean) * (x - mv.mean);
    mv.variance = ss / static_cast<double>(mv.n - 1);
    return mv;
}

// Continued fraction for the regularized incomplete beta (Lentz's method).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw std::runtime_error("incomplete beta: continued fraction failed to converge");
}

// Regularized incomplete beta I_x(a, b), accurate to ~1e-15 relative.
inline double incomplete_beta(double a, double b, double x) {
    require(a > 0.0 && b > 0.0, "incomplete beta: parameters must be positive");
    require(x >= 0.0 && x <= 1.0, "incomplete beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

// P(T > t) for Student's t with df degrees of freedom.
inline double student_t_tail(double t, double df) {
    require(df > 0.0, "student t: df must be positive");
    if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
    const double tt = t * t;
    double half_two_tail;
    if (tt < df) {
        // Near the center df/(df+t^2) rounds to 1 and flattens the tail;
        // the complementary argument t^2/(df+t^2) keeps relative accuracy.
        half_two_tail = 0.5 * (1.0 - incomplete_beta(0.5, 0.5 * df, tt / (df + tt)));
    } else {
        half_two_tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + tt));
    }
    return t >= 0.0 ? half_two_tail : 1.0 - half_two_tail;
}

inline double student_t_cdf(double t, double df) { return 1.0 - student_t_tail(t, df); }

// Inverse CDF via monotone bisection; sufficient for confidence bounds.
inline double student_t_quantile(double p, double df) {
    require(p > 0.0 && p < 1.0, "student t quantile: p outside (0,1)");
    double lo = -1.0, hi = 1.0;
    while (student_t_cdf(lo, df) > p) lo *= 2.0;
    while (student_t_cdf(hi, df) < p) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, df) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-14 * std::max(1.0, std::fabs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

struct SignificanceResult {
    double p_value = 1.0;
    double mean_difference = 0.0;
    double ci_lower_bound = 0.0;  // one-sided lower confidence bound for the difference
    double test_statistic = 0.0;
    double degrees_of_freedom = 0.0;
    bool degenerate = false;
};

// Welch's unequal-variance t-test of H1: mean(xs) > mean(ys), with the
// Welch-Satterthwaite degrees of freedom. Zero-variance inputs are flagged
// degenerate rather than dividing by zero.
inline SignificanceResult upper_tail_test(const std::vector<double>& xs, const std::vector<double>& ys,
                                          double confidence = 0.999) {
    require(confidence > 0.0 && confidence < 1.0, "significance: confidence outside (0,1)");
    const MeanVar a = mean_and_variance(xs);
    const MeanVar b = mean_and_variance(ys);
    SignificanceResult res;
    res.mean_difference = a.mean - b.mean;
    const double se2 = a.variance / static_cast<double>(a.n) + b.variance / static_cast<double>(b.n);
    if (se2 == 0.0) {
        res.degenerate = true;
        if (res.mean_difference > 0.0) {
            res.p_value = 0.0;
            res.test_statistic = std::numeric_limits<double>::infinity();
        } else if (res.mean_difference < 0.0) {
            res.p_value = 1.0;
            res.test_statistic = -std::numeric_limits<double>::infinity();
        } else {
            res.p_value = 0.5;
        }
        res.ci_lower_bound = res.mean_difference;
        return res;
    }
    const double se = std::sqrt(se2);
    res.test_statistic = res.mean_difference / se;
    const double va = a.variance / static_cast<double>(a.n);
    const double vb = b.variance / static_cast<double>(b.n);
    res.degrees_of_freedom = se2 * se2 /
                             (va * va / static_cast<double>(a.n - 1) + vb * vb / static_cast<double>(b.n - 1));
    res.p_value = student_t_tail(res.test_statistic, res.degrees_of_freedom);
    res.ci_lower_bound = res.mean_difference - student_t_quantile(confidence, res.degrees_of_freedom) * se;
    return res;
}

// Linear interpolation quantile on sorted data (the common "type 7" rule:
// h = (n-1)p, interpolate between the surrounding order statistics).
inline double quantile(std::vector<double> xs, double p) {
    require(!xs.empty(), "quantile: empty sample");
    require(p >= 0.0 && p <= 1.0, "quantile: p outside [0,1]");
    std::sort(xs.begin(), xs.end());
    const double h = p * static_cast<double>(xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= xs.size()) return xs.back();
    const double frac = h - static_cast<double>(lo);
    return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

struct BoxStats {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double notch_low = 0.0;   // median -+ 1.57 * IQR / sqrt(n)
    double notch_high = 0.0;
    double whisker_low = 0.0;   // extreme data values within 1.5 * IQR of the box
    double whisker_high = 0.0;
    std::vector<double> outliers;
    std::size_t n = 0;
};

inline BoxStats box_stats(const std::vector<double>& xs) {
    require(!xs.empty(), "box stats: empty sample");
    BoxStats bs;
    bs.n = xs.size();
    bs.q1 = quantile(xs, 0.25);
    bs.median = quantile(xs, 0.5);
    bs.q3 = quantile(xs, 0.75);
    bs.iqr = bs.q3 - bs.q1;
    const double notch = 1.57 * bs.iqr / std::sqrt(static_cast<double>(bs.n));
    bs.notch_low = bs.median - notch;
    bs.notch_high = bs.median + notch;
    const double fence_low = bs.q1 - 1.5 * bs.iqr;
    const double fence_high = bs.q3 + 1.5 * bs.iqr;
    bs.whisker_low = std::numeric_limits<double>::infinity();
    bs.whisker_high = -std::numeric_limits<double>::infinity();
    for (double x : xs) {
        if (x >= fence_low && x <= fence_high) {
            bs.whisker_low = std::min(bs.whisker_low, x);
            bs.whisker_high = std::max(bs.whisker_high, x);
        } else {
            bs.outliers.push_back(x);
        }
    }
    // All points can be outliers only if iqr were negative; quartiles always
    // lie inside the fences, so at least one point remains.
    std::sort(bs.outliers.begin(), bs.outliers.end());
    return bs;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace lagtrend
