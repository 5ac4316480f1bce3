#pragma once

// Session calendar and the ideal (gap free) hourly time grid that aligned
// panels live on. Timestamps are minutes since the Unix epoch, timezone
// naive: whatever local session time the input data is quoted in.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lagtrend {

using Timestamp = std::int64_t;  // minutes since epoch
using DayNumber = std::int32_t;  // days since epoch

constexpr Timestamp kMinutesPerDay = 24 * 60;

inline DayNumber day_of(Timestamp ts) {
    // timestamps never predate the epoch in this artifact
    return static_cast<DayNumber>(ts / kMinutesPerDay);
}
inline int hour_of(Timestamp ts) { return static_cast<int>((ts % kMinutesPerDay) / 60); }
inline int minute_of(Timestamp ts) { return static_cast<int>(ts % 60); }

// 0 = Sunday ... 6 = Saturday (std::chrono::weekday c_encoding)
inline int weekday_of(DayNumber day) {
    std::chrono::sys_days sd{std::chrono::days{day}};
    return static_cast<int>(std::chrono::weekday{sd}.c_encoding());
}

inline std::optional<DayNumber> parse_date(std::string_view s) {
    // YYYY-MM-DD
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto num = [&](std::size_t pos, std::size_t len) -> int {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (s[i] < '0' || s[i] > '9') return -1;
            v = v * 10 + (s[i] - '0');
        }
        return v;
    };
    const int y = num(0, 4), m = num(5, 2), d = num(8, 2);
    if (y < 0 || m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    const std::chrono::sys_days sd{ymd};
    return static_cast<DayNumber>(sd.time_since_epoch().count());
}

inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
    // YYYY-MM-DD HH:MM
    if (s.size() != 16 || s[10] != ' ' || s[13] != ':') return std::nullopt;
    auto day = parse_date(s.substr(0, 10));
    if (!day) return std::nullopt;
    auto num2 = [&](std::size_t pos) -> int {
        if (s[pos] < '0' || s[pos] > '9' || s[pos + 1] < '0' || s[pos + 1] > '9') return -1;
        return (s[pos] - '0') * 10 + (s[pos + 1] - '0');
    };
    const int hh = num2(11), mm = num2(14);
    if (hh < 0 || hh > 23 || mm < 0 || mm > 59) return std::nullopt;
    return static_cast<Timestamp>(*day) * kMinutesPerDay + hh * 60 + mm;
}

inline std::string format_date(DayNumber day) {
    const std::chrono::sys_days sd{std::chrono::days{day}};
    const std::chrono::year_month_day ymd{sd};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

inline std::string format_timestamp(Timestamp ts) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%s %02d:%02d", format_date(day_of(ts)).c_str(), hour_of(ts), minute_of(ts));
    return buf;
}

// Trading days, session hours and holidays. The default profile mirrors a
// US equity market: Monday to Friday, hourly observations from 09:00 up to
// but not including 16:00.
struct SessionCalendar {
    std::array<bool, 7> trading_weekdays{false, true, true, true, true, true, false};
    int session_start_hour = 9;
    int session_end_hour = 16;  // exclusive
    std::set<DayNumber> holidays;

    int hours_per_day() const { return session_end_hour - session_start_hour; }

    bool is_trading_day(DayNumber day) const {
        return trading_weekdays[static_cast<std::size_t>(weekday_of(day))] && holidays.count(day) == 0;
    }

    bool is_session_instant(Timestamp ts) const {
        if (minute_of(ts) != 0) return false;
        const int h = hour_of(ts);
        if (h < session_start_hour || h >= session_end_hour) return false;
        return is_trading_day(day_of(ts));
    }

    void validate() const {
        if (session_start_hour < 0 || session_end_hour > 24 || session_end_hour <= session_start_hour)
            throw std::runtime_error("calendar: session hours must satisfy 0 <= start < end <= 24");
        bool any = false;
        for (bool b : trading_weekdays) any = any || b;
        if (!any) throw std::runtime_error("calendar: no trading weekdays");
    }
};

// The ideal timeline: every session hour of every trading day in
// [first_day, last_day], strictly increasing, uniform within a session.
struct TimeGrid {
    std::vector<Timestamp> stamps;
    int hours_per_day = 0;

    std::size_t size() const { return stamps.size(); }
    std::size_t day_count() const { return stamps.size() / static_cast<std::size_t>(hours_per_day); }

    Timestamp operator[](std::size_t i) const { return stamps[i]; }

    // index of ts on the grid, or npos
    std::size_t index_of(Timestamp ts) const {
        auto it = std::lower_bound(stamps.begin(), stamps.end(), ts);
        if (it == stamps.end() || *it != ts) return npos;
        return static_cast<std::size_t>(it - stamps.begin());
    }

    DayNumber session_date(std::size_t day_index) const {
        return day_of(stamps[day_index * static_cast<std::size_t>(hours_per_day)]);
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

inline TimeGrid build_grid(const SessionCalendar& cal, DayNumber first_day, DayNumber last_day) {
    cal.validate();
    if (first_day > last_day) throw std::runtime_error("build_grid: empty day range");
    TimeGrid grid;
    grid.hours_per_day = cal.hours_per_day();
    for (DayNumber d = first_day; d <= last_day; ++d) {
        if (!cal.is_trading_day(d)) continue;
        for (int h = cal.session_start_hour; h < cal.session_end_hour; ++h)
            grid.stamps.push_back(static_cast<Timestamp>(d) * kMinutesPerDay + h * 60);
    }
    if (grid.stamps.empty()) throw std::runtime_error("build_grid: no trading sessions in range");
    return grid;
}

// Grid holding exactly `day_count` trading days starting at or after
// first_day.
inline TimeGrid build_grid_by_days(const SessionCalendar& cal, DayNumber first_day, int day_count) {
    cal.validate();
    if (day_count < 1) throw std::runtime_error("build_grid_by_days: day_count must be >= 1");
    TimeGrid grid;
    grid.hours_per_day = cal.hours_per_day();
    int days = 0;
    for (DayNumber d = first_day; days < day_count; ++d) {
        if (!cal.is_trading_day(d)) continue;
        for (int h = cal.session_start_hour; h < cal.session_end_hour; ++h)
            grid.stamps.push_back(static_cast<Timestamp>(d) * kMinutesPerDay + h * 60);
        ++days;
    }
    return grid;
}

}  // namespace lagtrend
