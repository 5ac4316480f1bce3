#pragma once

// Per-interval trend strength: the least-squares slope of prices within one
// window, fitted against hour indices 0..m-1. The intercept is fitted and
// discarded; only the gradient survives into the feature matrix.

#include <span>
#include <string>
#include <vector>

#include "lagtrend/matrix.hpp"
#include "lagtrend/panel.hpp"

namespace lagtrend {

inline double interval_slope(std::span<const double> window) {
    const std::size_t m = window.size();
    if (m < 2) throw std::runtime_error("interval_slope: window needs at least 2 points");
    const double xbar = static_cast<double>(m - 1) / 2.0;
    double ybar = 0.0;
    for (double y : window) ybar += y;
    ybar /= static_cast<double>(m);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = static_cast<double>(i) - xbar;
        sxy += dx * (window[i] - ybar);
        sxx += dx * dx;
    }
    return sxy / sxx;  // sxx > 0 whenever m >= 2
}

// Instruments x intervals matrix of slopes; the core feature object.
struct GradientMatrix {
    std::vector<std::string> instruments;
    std::vector<DayNumber> interval_dates;
    Matrix slopes;  // instruments x intervals

    std::size_t instrument_count() const { return instruments.size(); }
    std::size_t interval_count() const { return interval_dates.size(); }

    std::size_t index_of_instrument(const std::string& id) const {
        for (std::size_t i = 0; i < instruments.size(); ++i)
            if (instruments[i] == id) return i;
        return static_cast<std::size_t>(-1);
    }
};

inline GradientMatrix build_gradient_matrix(const PricePanel& panel) {
    const std::size_t H = static_cast<std::size_t>(panel.grid.hours_per_day);
    if (H < 2) throw std::runtime_error("build_gradient_matrix: need at least 2 hours per interval");
    const std::size_t days = panel.stamp_count() / H;
    if (days == 0) throw std::runtime_error("build_gradient_matrix: panel shorter than one interval");

    GradientMatrix g;
    g.instruments = panel.instruments;
    g.interval_dates.reserve(days);
    for (std::size_t j = 0; j < days; ++j) g.interval_dates.push_back(panel.grid.session_date(j));
    g.slopes = Matrix(panel.instrument_count(), days);
    for (const auto& w : interval_windows(panel)) g.slopes.at(w.instrument, w.interval) = interval_slope(w.prices);
    return g;
}

}  // namespace lagtrend
