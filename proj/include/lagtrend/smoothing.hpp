#pragma once

// Exponential smoothing, s_t = alpha * x_t + (1 - alpha) * s_{t-1}. The
// start value is either the first input or the mean of the first k inputs.

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace lagtrend {

struct SmoothingConfig {
    enum class Init { first_value, mean_of_first_k };

    double alpha = 0.2;
    Init init_mode = Init::first_value;
    int k = 10;

    void validate() const {
        if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::runtime_error("smoothing: alpha must be in (0,1)");
        if (k < 1) throw std::runtime_error("smoothing: k must be >= 1");
    }
};

inline std::vector<double> exponential_smooth(const std::vector<double>& series, const SmoothingConfig& cfg) {
    cfg.validate();
    if (series.empty()) throw std::runtime_error("exponential_smooth: empty series");
    std::vector<double> out(series.size());
    double s;
    if (cfg.init_mode == SmoothingConfig::Init::first_value) {
        s = series.front();
    } else {
        const std::size_t n = std::min<std::size_t>(series.size(), static_cast<std::size_t>(cfg.k));
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += series[i];
        s = sum / static_cast<double>(n);
    }
    out[0] = s;
    for (std::size_t t = 1; t < series.size(); ++t) {
        s = cfg.alpha * series[t] + (1.0 - cfg.alpha) * s;
        out[t] = s;
    }
    return out;
}

}  // namespace lagtrend
