#pragma once

// Raw tick ingestion and cleansing. Input format, one record per line:
//   instrument_id,timestamp,price
// with timestamp "YYYY-MM-DD HH:MM" and a mandatory header row.

#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lagtrend/csv.hpp"
#include "lagtrend/timegrid.hpp"

namespace lagtrend {

struct TickRecord {
    std::string instrument;
    Timestamp ts = 0;
    double price = 0.0;
};

struct IngestResult {
    std::vector<TickRecord> records;
    std::size_t rejected = 0;
    // line number -> reason, capped so a corrupt file cannot flood memory
    std::vector<std::pair<std::size_t, std::string>> reject_samples;
    static constexpr std::size_t kMaxRejectSamples = 50;
};

inline IngestResult ingest_ticks(std::istream& in) {
    IngestResult res;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("ingest: empty input, header row required");
    {
        auto fields = split_csv_line(line);
        if (fields.size() != 3 || fields[0] != "instrument_id" || fields[1] != "timestamp" || fields[2] != "price")
            throw std::runtime_error("ingest: bad header, expected instrument_id,timestamp,price");
    }
    std::size_t lineno = 1;
    auto reject = [&](std::size_t ln, const char* why) {
        ++res.rejected;
        if (res.reject_samples.size() < IngestResult::kMaxRejectSamples) res.reject_samples.emplace_back(ln, why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 3) {
            reject(lineno, "expected 3 fields");
            continue;
        }
        if (fields[0].empty()) {
            reject(lineno, "empty instrument id");
            continue;
        }
        auto ts = parse_timestamp(fields[1]);
        if (!ts) {
            reject(lineno, "unparseable timestamp");
            continue;
        }
        auto price = parse_double(fields[2]);
        if (!price || !(*price > 0.0)) {
            reject(lineno, "price not a positive number");
            continue;
        }
        res.records.push_back({std::string(fields[0]), *ts, *price});
    }
    if (in.bad()) throw std::runtime_error("ingest: stream read error");
    return res;
}

struct CleanResult {
    std::vector<TickRecord> records;
    std::size_t removed = 0;
};

// Drops records whose timestamp is not a valid session instant: holidays,
// non-trading weekdays, hours outside the session, sub-hourly stamps.
inline CleanResult clean_records(std::vector<TickRecord> records, const SessionCalendar& cal) {
    CleanResult res;
    res.records.reserve(records.size());
    for (auto& r : records) {
        if (cal.is_session_instant(r.ts))
            res.records.push_back(std::move(r));
        else
            ++res.removed;
    }
    return res;
}

struct CoverageSplit {
    std::vector<std::string> kept;
    std::vector<std::string> discarded;
};

// Keeps instruments whose distinct observed grid stamps cover at least
// min_coverage of the grid. Ids come back sorted.
inline CoverageSplit filter_instruments(const std::vector<TickRecord>& records, const TimeGrid& grid,
                                        double min_coverage) {
    if (records.empty()) throw std::runtime_error("filter_instruments: no records");
    if (!(min_coverage > 0.0) || min_coverage > 1.0)
        throw std::runtime_error("filter_instruments: min_coverage must be in (0,1]");
    std::map<std::string, std::set<Timestamp>> seen;
    for (const auto& r : records)
        if (grid.index_of(r.ts) != TimeGrid::npos) seen[r.instrument].insert(r.ts);
    CoverageSplit split;
    const double total = static_cast<double>(grid.size());
    for (const auto& [id, stamps] : seen) {
        if (static_cast<double>(stamps.size()) / total >= min_coverage)
            split.kept.push_back(id);
        else
            split.discarded.push_back(id);
    }
    return split;
}

}  // namespace lagtrend
