#pragma once

// Synthetic panel with planted lagged dependencies. A set of dependent
// instruments take their daily trend direction from the previous day's
// intraday gradients of designated driver instruments, plus Gaussian noise
// on the latent decision variable.
//
// Drivers are ordinary geometric random walks. Dependent instruments are
// built directly in price space: on day j the prices are
//     P(j,h) = level + s(j) * c(h) + r(j,h),   c(h) = h - (H-1)/2,
// where r is day noise projected orthogonal to {1, c} and s(j) is the
// planted direction times a strictly increasing amplitude. The projection
// makes the realized least-squares slope of day j equal s(j) exactly, so
// the planted direction sequence is recoverable from realized slopes at any
// noise level, and with noise_level = 0 the labels are a deterministic
// function of the previous day's driver gradients.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "lagtrend/matrix.hpp"
#include "lagtrend/panel.hpp"
#include "lagtrend/rng.hpp"
#include "lagtrend/slope.hpp"
#include "lagtrend/timegrid.hpp"

namespace lagtrend {

struct Dependency {
    std::size_t target = 0;                                  // panel row of the dependent instrument
    std::vector<std::pair<std::size_t, double>> drivers;     // (panel row, weight)
};

struct LagStructure {
    std::size_t instrument_count = 0;
    std::vector<Dependency> dependencies;
    double noise_level = 0.0;  // stddev of the latent decision noise

    void validate() const {
        require(instrument_count >= 2, "lag structure: needs at least two instruments");
        require(noise_level >= 0.0, "lag structure: noise_level must be >= 0");
        require(!dependencies.empty(), "lag structure: no dependencies");
        std::set<std::size_t> targets;
        for (const auto& dep : dependencies) {
            require(dep.target < instrument_count, "lag structure: target out of range");
            require(targets.insert(dep.target).second, "lag structure: duplicate target");
            require(!dep.drivers.empty(), "lag structure: dependency without drivers");
        }
        for (const auto& dep : dependencies) {
            std::set<std::size_t> seen;
            for (const auto& [drv, w] : dep.drivers) {
                require(drv < instrument_count, "lag structure: driver out of range");
                require(targets.count(drv) == 0, "lag structure: a driver may not itself be dependent");
                require(seen.insert(drv).second, "lag structure: duplicate driver in one dependency");
                require(std::isfinite(w) && w != 0.0, "lag structure: weights must be finite and nonzero");
            }
        }
    }
};

struct SynthConfig {
    std::uint64_t seed = 1;
    int day_count = 1200;
    SessionCalendar calendar;                    // default 09:00..16:00, Mon-Fri
    DayNumber first_day = 18631;                 // 2021-01-04, a Monday
    LagStructure structure;

    double driver_base_price = 100.0;
    double driver_daily_drift = 0.01;            // |log drift| per day, sign drawn daily
    double driver_hourly_vol = 0.003;
    double dependent_base_level = 100.0;
    double dependent_slope_base = 0.1;           // amplitude on day 0
    double dependent_slope_growth = 5e-4;        // relative amplitude growth per day
    double dependent_noise_scale = 0.5;          // day noise stddev before projection

    void validate() const {
        structure.validate();
        calendar.validate();
        require(day_count >= 20, "synth config: day_count must be >= 20");
        require(calendar.hours_per_day() >= 2, "synth config: needs at least two session hours");
        require(driver_base_price > 0.0 && dependent_base_level > 0.0, "synth config: base prices must be positive");
        require(driver_hourly_vol >= 0.0 && dependent_noise_scale >= 0.0, "synth config: noise scales must be >= 0");
        require(dependent_slope_base > 0.0 && dependent_slope_growth >= 0.0,
                "synth config: slope amplitude must be positive and nondecreasing");
    }
};

struct SyntheticPanel {
    PricePanel panel;
    LagStructure structure;
    Matrix signals;                              // dependencies x days, latent sum of weighted driver gradients
    std::vector<std::vector<int>> directions;    // per dependency: +-1 per day
    std::vector<std::vector<int>> truth_labels;  // per dependency: planted label per supervised row (days-1 entries)
};

namespace detail {

inline int sign_of(double x) { return x >= 0.0 ? 1 : -1; }  // exact zero has measure zero here

inline std::vector<std::string> synth_instrument_ids(std::size_t count) {
    std::size_t width = 2;
    for (std::size_t p = 100; p < count; p *= 10) ++width;
    std::vector<std::string> ids;
    ids.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::string digits = std::to_string(k);
        if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
        ids.push_back("SYN" + digits);
    }
    return ids;
}

// Geometric random walk prices for every non-dependent instrument, plus the
// standardized realized daily slopes of those instruments. Dependent rows
// are left zero for the caller to fill.
struct DriverPanel {
    Matrix prices;    // instruments x stamps
    Matrix zslopes;   // instruments x days, standardized per instrument
};

inline DriverPanel make_driver_panel(const SynthConfig& cfg) {
    const std::size_t s = cfg.structure.instrument_count;
    const int H = cfg.calendar.hours_per_day();
    const std::size_t days = static_cast<std::size_t>(cfg.day_count);
    const std::size_t T = days * static_cast<std::size_t>(H);

    std::set<std::size_t> targets;
    for (const auto& dep : cfg.structure.dependencies) targets.insert(dep.target);

    DriverPanel dp{Matrix(s, T), Matrix(s, days)};
    for (std::size_t k = 0; k < s; ++k) {
        if (targets.count(k)) continue;
        Rng rng(derive_seed(cfg.seed, hash_string("synth-walk"), k));
        double lp = std::log(cfg.driver_base_price * (0.8 + 0.4 * rng.next_double()));
        auto row = dp.prices.row(k);
        std::size_t i = 0;
        for (std::size_t j = 0; j < days; ++j) {
            const double drift = (rng.next_double() < 0.5 ? -1.0 : 1.0) * cfg.driver_daily_drift / H;
            for (int h = 0; h < H; ++h) {
                row[i++] = std::exp(lp);
                lp += drift + cfg.driver_hourly_vol * rng.next_gaussian();
            }
        }
        // scale to unit RMS without centering, so dependency weights are
        // comparable across drivers while slope signs pass through intact
        double ss = 0.0;
        for (std::size_t j = 0; j < days; ++j) {
            dp.zslopes.at(k, j) = interval_slope(row.subspan(j * static_cast<std::size_t>(H), H));
            ss += dp.zslopes.at(k, j) * dp.zslopes.at(k, j);
        }
        const double rms = std::sqrt(ss / static_cast<double>(days));
        require(rms > 0.0, "synth: degenerate driver slope series");
        for (std::size_t j = 0; j < days; ++j) dp.zslopes.at(k, j) /= rms;
    }
    return dp;
}

inline Matrix make_signals(const SynthConfig& cfg, const Matrix& zslopes) {
    const std::size_t days = zslopes.cols;
    Matrix signals(cfg.structure.dependencies.size(), days);
    for (std::size_t i = 0; i < cfg.structure.dependencies.size(); ++i)
        for (std::size_t j = 0; j < days; ++j) {
            double v = 0.0;
            for (const auto& [drv, w] : cfg.structure.dependencies[i].drivers) v += w * zslopes.at(drv, j);
            signals.at(i, j) = v;
        }
    return signals;
}

}  // namespace detail

inline SyntheticPanel generate_panel(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t s = cfg.structure.instrument_count;
    const int H = cfg.calendar.hours_per_day();
    const std::size_t days = static_cast<std::size_t>(cfg.day_count);

    auto dp = detail::make_driver_panel(cfg);

    SyntheticPanel out;
    out.structure = cfg.structure;
    out.signals = detail::make_signals(cfg, dp.zslopes);
    out.panel.instruments = detail::synth_instrument_ids(s);
    out.panel.grid = build_grid_by_days(cfg.calendar, cfg.first_day, cfg.day_count);
    out.panel.prices = std::move(dp.prices);
    out.panel.filled.assign(s * out.panel.grid.size(), 0);

    // centered hour coordinate and its squared norm, shared by all days
    std::vector<double> c(static_cast<std::size_t>(H));
    double c_sq = 0.0;
    for (int h = 0; h < H; ++h) {
        c[static_cast<std::size_t>(h)] = h - 0.5 * (H - 1);
        c_sq += c[static_cast<std::size_t>(h)] * c[static_cast<std::size_t>(h)];
    }

    for (std::size_t i = 0; i < cfg.structure.dependencies.size(); ++i) {
        const auto& dep = cfg.structure.dependencies[i];
        Rng dir_rng(derive_seed(cfg.seed, hash_string("synth-direction"), i));
        Rng day_rng(derive_seed(cfg.seed, hash_string("synth-daynoise"), i));

        std::vector<int> dirs(days);
        dirs[0] = dir_rng.next_double() < 0.5 ? -1 : 1;
        for (std::size_t j = 1; j < days; ++j)
            dirs[j] = detail::sign_of(out.signals.at(i, j - 1) +
                                      cfg.structure.noise_level * dir_rng.next_gaussian());

        const double level = cfg.dependent_base_level * (0.8 + 0.4 * day_rng.next_double());
        auto row = out.panel.prices.row(dep.target);
        std::vector<double> noise(static_cast<std::size_t>(H));
        for (std::size_t j = 0; j < days; ++j) {
            const double amplitude = cfg.dependent_slope_base * (1.0 + cfg.dependent_slope_growth * j);
            const double slope = dirs[j] * amplitude;

            double n_mean = 0.0, n_dot_c = 0.0;
            for (auto& v : noise) v = cfg.dependent_noise_scale * day_rng.next_gaussian();
            for (int h = 0; h < H; ++h) {
                n_mean += noise[static_cast<std::size_t>(h)];
                n_dot_c += noise[static_cast<std::size_t>(h)] * c[static_cast<std::size_t>(h)];
            }
            n_mean /= H;
            // remove the components the day regression would read as level or
            // slope; the realized slope of the day is then exactly `slope`
            double peak = 0.0;
            for (int h = 0; h < H; ++h) {
                auto& v = noise[static_cast<std::size_t>(h)];
                v -= n_mean + (c_sq > 0.0 ? n_dot_c / c_sq : 0.0) * c[static_cast<std::size_t>(h)];
                peak = std::max(peak, std::fabs(v));
            }
            const double cap = 0.25 * level;
            const double shrink = peak > cap ? cap / peak : 1.0;  // uniform shrink keeps orthogonality
            for (int h = 0; h < H; ++h)
                row[j * static_cast<std::size_t>(H) + static_cast<std::size_t>(h)] =
                    level + slope * c[static_cast<std::size_t>(h)] + shrink * noise[static_cast<std::size_t>(h)];
        }

        std::vector<int> labels(days - 1);
        for (std::size_t j = 0; j + 1 < days; ++j) labels[j] = dirs[j + 1] > 0 ? kClassUp : kClassDown;
        out.directions.push_back(std::move(dirs));
        out.truth_labels.push_back(std::move(labels));
    }
    return out;
}

// Monte Carlo estimate of P(sign(signal + noise_level * eps) == sign(signal))
// over the supplied latent signals: the accuracy ceiling of any predictor
// that sees the drivers perfectly.
inline double bayes_from_signals(const std::vector<double>& signals, double noise_level, int mc_count,
                                 std::uint64_t seed) {
    require(!signals.empty(), "bayes accuracy: empty signal pool");
    require(mc_count > 0, "bayes accuracy: mc_count must be positive");
    if (noise_level == 0.0) return 1.0;
    Rng rng(derive_seed(seed, hash_string("bayes-mc")));
    std::size_t hits = 0;
    for (int c = 0; c < mc_count; ++c) {
        const double sig = signals[rng.next_below(signals.size())];
        if (detail::sign_of(sig + noise_level * rng.next_gaussian()) == detail::sign_of(sig)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(mc_count);
}

// Regenerates the driver gradients for `cfg` and pools the latent signals of
// every supervised row of every dependency.
inline double bayes_accuracy(const SynthConfig& cfg, int mc_count) {
    cfg.validate();
    auto dp = detail::make_driver_panel(cfg);
    const Matrix signals = detail::make_signals(cfg, dp.zslopes);
    std::vector<double> pool;
    pool.reserve(signals.rows * (signals.cols - 1));
    for (std::size_t i = 0; i < signals.rows; ++i)
        for (std::size_t j = 0; j + 1 < signals.cols; ++j) pool.push_back(signals.at(i, j));
    return bayes_from_signals(pool, cfg.structure.noise_level, mc_count, cfg.seed);
}

// Shape of a randomly wired scenario: the first dependency_count rows become
// dependent instruments, each driven by a random subset of the remaining
// rows with random-sign unit-norm weights.
struct ScenarioParams {
    std::size_t instrument_count = 50;
    std::size_t dependency_count = 10;
    std::size_t drivers_per_dependency = 3;
    double noise_level = 1.95;
    int day_count = 1200;
};

inline SynthConfig make_scenario(const ScenarioParams& p, std::uint64_t seed) {
    require(p.dependency_count >= 1 && p.dependency_count < p.instrument_count,
            "scenario: dependency_count must be in [1, instrument_count)");
    const std::size_t pool = p.instrument_count - p.dependency_count;
    require(p.drivers_per_dependency >= 1 && p.drivers_per_dependency <= pool,
            "scenario: drivers_per_dependency exceeds the non-dependent pool");

    SynthConfig cfg;
    cfg.seed = seed;
    cfg.structure.instrument_count = p.instrument_count;
    cfg.structure.noise_level = p.noise_level;
    cfg.day_count = p.day_count;

    Rng rng(derive_seed(seed, hash_string("synth-structure")));
    for (std::size_t t = 0; t < p.dependency_count; ++t) {
        Dependency dep;
        dep.target = t;
        const auto picks = rng.sample_indices(pool, p.drivers_per_dependency);
        double norm_sq = 0.0;
        for (std::size_t pk : picks) {
            const double w = (rng.next_double() < 0.5 ? -1.0 : 1.0) * (0.5 + rng.next_double());
            dep.drivers.emplace_back(p.dependency_count + pk, w);
            norm_sq += w * w;
        }
        for (auto& [drv, w] : dep.drivers) w /= std::sqrt(norm_sq);
        cfg.structure.dependencies.push_back(std::move(dep));
    }
    return cfg;
}

// The documented scenario: 50 instruments, 1200 days, hourly sessions, ten
// dependent instruments with three drivers each, unit-norm weights, noise
// tuned so the accuracy ceiling sits near 0.65.
inline SynthConfig make_default_scenario(std::uint64_t seed) { return make_scenario(ScenarioParams{}, seed); }

}  // namespace lagtrend
