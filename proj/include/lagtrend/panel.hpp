#pragma once

// Aligned price panel: one row per instrument, one column per grid stamp,
// every cell holds a positive price and a provenance flag.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lagtrend/matrix.hpp"
#include "lagtrend/ticks.hpp"
#include "lagtrend/timegrid.hpp"

namespace lagtrend {

enum class CellProvenance : std::uint8_t { observed = 0, forward_filled = 1 };

struct PricePanel {
    std::vector<std::string> instruments;
    TimeGrid grid;
    Matrix prices;                      // instruments x grid.size()
    std::vector<std::uint8_t> filled;   // same shape, 1 = forward_filled

    std::size_t instrument_count() const { return instruments.size(); }
    std::size_t stamp_count() const { return grid.size(); }

    double price(std::size_t k, std::size_t i) const { return prices.at(k, i); }
    bool is_filled(std::size_t k, std::size_t i) const { return filled[k * grid.size() + i] != 0; }

    std::size_t fill_count() const {
        std::size_t n = 0;
        for (auto f : filled) n += f;
        return n;
    }

    std::size_t index_of_instrument(const std::string& id) const {
        auto it = std::lower_bound(instruments.begin(), instruments.end(), id);
        if (it == instruments.end() || *it != id) return static_cast<std::size_t>(-1);
        return static_cast<std::size_t>(it - instruments.begin());
    }
};

// Aligns every instrument found in `records` onto `grid`. Missing cells take
// the nearest preceding observed price; cells before the first observation
// (listings that start after the grid does) take the first observed price.
// The output matrix is allocated up front at full size. Instrument order is
// lexicographic, so the result does not depend on record order; duplicate
// (instrument, stamp) pairs resolve to the highest price for the same reason.
inline PricePanel align_panel(const std::vector<TickRecord>& records, const TimeGrid& grid) {
    std::map<std::string, std::vector<std::pair<std::size_t, double>>> per_instrument;
    for (const auto& r : records) {
        const std::size_t idx = grid.index_of(r.ts);
        if (idx == TimeGrid::npos) continue;  // cleaned input should not have these
        per_instrument[r.instrument].emplace_back(idx, r.price);
    }
    if (per_instrument.empty()) throw std::runtime_error("align_panel: no on-grid records");

    PricePanel panel;
    panel.grid = grid;
    panel.instruments.reserve(per_instrument.size());
    for (const auto& [id, obs] : per_instrument) {
        if (obs.empty()) throw std::runtime_error("align_panel: instrument with zero observations: " + id);
        panel.instruments.push_back(id);
    }

    const std::size_t s = panel.instruments.size();
    const std::size_t T = grid.size();
    panel.prices = Matrix(s, T);
    panel.filled.assign(s * T, 0);

    for (std::size_t k = 0; k < s; ++k) {
        auto& obs = per_instrument[panel.instruments[k]];
        std::sort(obs.begin(), obs.end());
        // dedupe stamps, keep the highest price seen for a stamp
        std::size_t w = 0;
        for (std::size_t i = 0; i < obs.size(); ++i) {
            if (w > 0 && obs[w - 1].first == obs[i].first)
                obs[w - 1].second = obs[i].second;
            else
                obs[w++] = obs[i];
        }
        obs.resize(w);

        auto row = panel.prices.row(k);
        std::size_t next = 0;
        double last_price = obs.front().second;  // fills leading cells from the first observation
        for (std::size_t i = 0; i < T; ++i) {
            if (next < obs.size() && obs[next].first == i) {
                last_price = obs[next].second;
                ++next;
            } else {
                panel.filled[k * T + i] = 1;
            }
            row[i] = last_price;
        }
    }
    return panel;
}

// Cuts the panel at the common end: the earliest of the per-instrument last
// observed stamps. Trailing columns past that point carry only reconstructed
// values for at least one instrument and are dropped.
inline PricePanel truncate_panel(const PricePanel& panel) {
    const std::size_t s = panel.instrument_count();
    const std::size_t T = panel.stamp_count();
    std::size_t common_end = T;  // exclusive
    for (std::size_t k = 0; k < s; ++k) {
        std::size_t last_obs = 0;
        bool any = false;
        for (std::size_t i = T; i-- > 0;) {
            if (!panel.is_filled(k, i)) {
                last_obs = i;
                any = true;
                break;
            }
        }
        if (!any) throw std::runtime_error("truncate_panel: instrument with no observed cells");
        common_end = std::min(common_end, last_obs + 1);
    }
    if (common_end == T) return panel;

    PricePanel out;
    out.instruments = panel.instruments;
    out.grid.hours_per_day = panel.grid.hours_per_day;
    out.grid.stamps.assign(panel.grid.stamps.begin(), panel.grid.stamps.begin() + static_cast<long>(common_end));
    out.prices = Matrix(s, common_end);
    out.filled.assign(s * common_end, 0);
    for (std::size_t k = 0; k < s; ++k) {
        for (std::size_t i = 0; i < common_end; ++i) {
            out.prices.at(k, i) = panel.price(k, i);
            out.filled[k * common_end + i] = panel.filled[k * T + i];
        }
    }
    return out;
}

struct IntervalWindow {
    std::size_t instrument;  // row in the panel
    std::size_t interval;    // session day index
    std::span<const double> prices;
};

// One window per (instrument, complete session day), contiguous and in
// order. A trailing partial day, if truncation produced one, is dropped.
inline std::vector<IntervalWindow> interval_windows(const PricePanel& panel) {
    const std::size_t H = static_cast<std::size_t>(panel.grid.hours_per_day);
    const std::size_t days = panel.stamp_count() / H;
    std::vector<IntervalWindow> windows;
    windows.reserve(panel.instrument_count() * days);
    for (std::size_t k = 0; k < panel.instrument_count(); ++k) {
        auto row = panel.prices.row(k);
        for (std::size_t j = 0; j < days; ++j)
            windows.push_back({k, j, row.subspan(j * H, H)});
    }
    return windows;
}

}  // namespace lagtrend
