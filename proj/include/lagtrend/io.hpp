#pragma once

// File formats. CSV carries matrices and tables, JSON carries structure and
// metadata. Doubles are written with 17 significant digits so every file
// reloads bit for bit; non-finite values become "nan"/"inf" in CSV and null
// in JSON.

#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lagtrend/csv.hpp"
#include "lagtrend/dataset.hpp"
#include "lagtrend/experiments.hpp"
#include "lagtrend/mlp.hpp"
#include "lagtrend/panel.hpp"
#include "lagtrend/slope.hpp"
#include "lagtrend/synth.hpp"
#include "lagtrend/ticks.hpp"

namespace lagtrend {

inline nlohmann::json json_num(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

inline double json_double(const nlohmann::json& j) {
    if (j.is_null()) return kMissing;
    return j.get<double>();
}

inline std::string utc_now_iso() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace detail {

inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            if (i > start || i < text.size()) lines.emplace_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

inline double field_double(std::string_view s, const std::string& where) {
    if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    const auto v = parse_double(s);
    if (!v) throw std::runtime_error(where + ": bad number: " + std::string(s));
    return *v;
}

inline long long field_int(std::string_view s, const std::string& where) {
    const auto v = parse_int(s);
    if (!v) throw std::runtime_error(where + ": bad integer: " + std::string(s));
    return *v;
}

inline nlohmann::json parse_json_file(const std::string& path) {
    try {
        return nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace detail

// --- price panel ------------------------------------------------------------

// panel CSV: one row per grid stamp, one column per instrument. The meta
// document carries the session shape and which cells were forward filled.
inline void save_panel(const PricePanel& panel, const std::string& csv_path, const std::string& meta_path) {
    const std::size_t s = panel.instrument_count();
    const std::size_t T = panel.stamp_count();
    std::string csv = "timestamp";
    for (const auto& id : panel.instruments) csv += "," + id;
    csv += '\n';
    for (std::size_t i = 0; i < T; ++i) {
        csv += format_timestamp(panel.grid[i]);
        for (std::size_t k = 0; k < s; ++k) csv += "," + format_double(panel.price(k, i));
        csv += '\n';
    }
    write_text_file(csv_path, csv);

    nlohmann::json meta;
    meta["artifact"] = "lagtrend.panel";
    meta["version"] = 1;
    meta["hours_per_day"] = panel.grid.hours_per_day;
    meta["instruments"] = panel.instruments;
    std::vector<std::size_t> filled_cells;
    for (std::size_t i = 0; i < panel.filled.size(); ++i)
        if (panel.filled[i]) filled_cells.push_back(i);
    meta["filled_cells"] = filled_cells;
    write_text_file(meta_path, meta.dump(2) + "\n");
}

inline PricePanel load_panel(const std::string& csv_path, const std::string& meta_path) {
    const auto meta = detail::parse_json_file(meta_path);
    if (meta.at("artifact").get<std::string>() != "lagtrend.panel")
        throw std::runtime_error(meta_path + ": not a panel meta document");

    PricePanel panel;
    panel.grid.hours_per_day = meta.at("hours_per_day").get<int>();
    panel.instruments = meta.at("instruments").get<std::vector<std::string>>();

    const auto lines = detail::split_lines(read_text_file(csv_path));
    if (lines.empty()) throw std::runtime_error(csv_path + ": empty panel");
    {
        const auto head = split_csv_line(lines[0]);
        if (head.size() != panel.instruments.size() + 1 || head[0] != "timestamp")
            throw std::runtime_error(csv_path + ": header does not match meta instruments");
        for (std::size_t k = 0; k < panel.instruments.size(); ++k)
            if (head[k + 1] != panel.instruments[k])
                throw std::runtime_error(csv_path + ": instrument order differs from meta");
    }
    const std::size_t s = panel.instruments.size();
    const std::size_t T = lines.size() - 1;
    panel.prices = Matrix(s, T);
    panel.grid.stamps.reserve(T);
    for (std::size_t i = 0; i < T; ++i) {
        const auto fields = split_csv_line(lines[i + 1]);
        if (fields.size() != s + 1) throw std::runtime_error(csv_path + ": ragged row");
        const auto ts = parse_timestamp(fields[0]);
        if (!ts) throw std::runtime_error(csv_path + ": bad timestamp: " + std::string(fields[0]));
        panel.grid.stamps.push_back(*ts);
        for (std::size_t k = 0; k < s; ++k)
            panel.prices.at(k, i) = detail::field_double(fields[k + 1], csv_path);
    }
    panel.filled.assign(s * T, 0);
    for (const auto& cell : meta.at("filled_cells")) {
        const std::size_t idx = cell.get<std::size_t>();
        if (idx >= panel.filled.size()) throw std::runtime_error(meta_path + ": filled cell out of range");
        panel.filled[idx] = 1;
    }
    return panel;
}

// --- ticks ------------------------------------------------------------------

// Every observed cell as one tick record, in grid-major order per instrument.
inline std::vector<TickRecord> panel_to_ticks(const PricePanel& panel) {
    std::vector<TickRecord> records;
    records.reserve(panel.instrument_count() * panel.stamp_count());
    for (std::size_t k = 0; k < panel.instrument_count(); ++k)
        for (std::size_t i = 0; i < panel.stamp_count(); ++i)
            if (!panel.is_filled(k, i)) records.push_back({panel.instruments[k], panel.grid[i], panel.price(k, i)});
    return records;
}

inline void write_ticks_csv(const std::string& path, const std::vector<TickRecord>& records) {
    std::string csv = "instrument_id,timestamp,price\n";
    for (const auto& r : records)
        csv += r.instrument + "," + format_timestamp(r.ts) + "," + format_double(r.price) + '\n';
    write_text_file(path, csv);
}

// --- gradient matrix --------------------------------------------------------

// gradients CSV: one row per instrument, one column per interval date.
inline void save_gradients(const GradientMatrix& g, const std::string& path) {
    std::string csv = "instrument_id";
    for (DayNumber d : g.interval_dates) csv += "," + format_date(d);
    csv += '\n';
    for (std::size_t k = 0; k < g.instrument_count(); ++k) {
        csv += g.instruments[k];
        for (std::size_t j = 0; j < g.interval_count(); ++j) csv += "," + format_double(g.slopes.at(k, j));
        csv += '\n';
    }
    write_text_file(path, csv);
}

inline GradientMatrix load_gradients(const std::string& path) {
    const auto lines = detail::split_lines(read_text_file(path));
    if (lines.size() < 2) throw std::runtime_error(path + ": gradient file needs a header and rows");
    GradientMatrix g;
    {
        const auto head = split_csv_line(lines[0]);
        if (head.size() < 2 || head[0] != "instrument_id")
            throw std::runtime_error(path + ": bad gradient header");
        for (std::size_t j = 1; j < head.size(); ++j) {
            const auto d = parse_date(head[j]);
            if (!d) throw std::runtime_error(path + ": bad interval date: " + std::string(head[j]));
            g.interval_dates.push_back(*d);
        }
    }
    const std::size_t t = g.interval_dates.size();
    g.slopes = Matrix(lines.size() - 1, t);
    for (std::size_t k = 0; k + 1 < lines.size(); ++k) {
        const auto fields = split_csv_line(lines[k + 1]);
        if (fields.size() != t + 1) throw std::runtime_error(path + ": ragged gradient row");
        if (fields[0].empty()) throw std::runtime_error(path + ": empty instrument id");
        g.instruments.emplace_back(fields[0]);
        for (std::size_t j = 0; j < t; ++j) g.slopes.at(k, j) = detail::field_double(fields[j + 1], path);
    }
    return g;
}

// --- supervised dataset -----------------------------------------------------

inline const char* split_tag_name(SplitTag tag) {
    switch (tag) {
        case SplitTag::train: return "train";
        case SplitTag::validation: return "validation";
        case SplitTag::test: return "test";
        case SplitTag::excluded: return "excluded";
    }
    throw std::runtime_error("split_tag_name: bad tag");
}

inline SplitTag split_tag_from(std::string_view name) {
    if (name == "train") return SplitTag::train;
    if (name == "validation") return SplitTag::validation;
    if (name == "test") return SplitTag::test;
    if (name == "excluded") return SplitTag::excluded;
    throw std::runtime_error("split tag: unknown name: " + std::string(name));
}

inline void save_dataset(const SupervisedDataset& ds, const std::string& csv_path, const std::string& meta_path) {
    std::string csv = "row,split,label";
    for (const auto& id : ds.input_ids) csv += "," + id;
    csv += '\n';
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        csv += std::to_string(r);
        csv += ",";
        csv += split_tag_name(ds.split[r]);
        csv += "," + std::to_string(label_class(ds.labels, r));
        for (std::size_t c = 0; c < ds.dim(); ++c) csv += "," + format_double(ds.inputs.at(r, c));
        csv += '\n';
    }
    write_text_file(csv_path, csv);

    nlohmann::json meta;
    meta["artifact"] = "lagtrend.dataset";
    meta["version"] = 1;
    meta["target"] = ds.target;
    meta["include_target"] = ds.include_target;
    meta["fold_id"] = ds.fold_id;
    meta["rows"] = ds.n_rows();
    meta["input_ids"] = ds.input_ids;
    write_text_file(meta_path, meta.dump(2) + "\n");
}

inline SupervisedDataset load_dataset(const std::string& csv_path, const std::string& meta_path) {
    const auto meta = detail::parse_json_file(meta_path);
    if (meta.at("artifact").get<std::string>() != "lagtrend.dataset")
        throw std::runtime_error(meta_path + ": not a dataset meta document");

    SupervisedDataset ds;
    ds.target = meta.at("target").get<std::string>();
    ds.include_target = meta.at("include_target").get<bool>();
    ds.fold_id = meta.at("fold_id").get<int>();
    ds.input_ids = meta.at("input_ids").get<std::vector<std::string>>();

    const auto lines = detail::split_lines(read_text_file(csv_path));
    if (lines.size() < 2) throw std::runtime_error(csv_path + ": dataset needs a header and rows");
    const std::size_t d = ds.input_ids.size();
    {
        const auto head = split_csv_line(lines[0]);
        if (head.size() != d + 3 || head[0] != "row" || head[1] != "split" || head[2] != "label")
            throw std::runtime_error(csv_path + ": bad dataset header");
        for (std::size_t c = 0; c < d; ++c)
            if (head[c + 3] != ds.input_ids[c])
                throw std::runtime_error(csv_path + ": input columns differ from meta");
    }
    const std::size_t n = lines.size() - 1;
    if (meta.at("rows").get<std::size_t>() != n)
        throw std::runtime_error(csv_path + ": row count differs from meta");
    ds.inputs = Matrix(n, d);
    ds.labels = Matrix(n, 2);
    ds.split.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto fields = split_csv_line(lines[r + 1]);
        if (fields.size() != d + 3) throw std::runtime_error(csv_path + ": ragged dataset row");
        if (static_cast<std::size_t>(detail::field_int(fields[0], csv_path)) != r)
            throw std::runtime_error(csv_path + ": rows out of order");
        ds.split[r] = split_tag_from(fields[1]);
        const long long cls = detail::field_int(fields[2], csv_path);
        if (cls != kClassDown && cls != kClassUp) throw std::runtime_error(csv_path + ": bad label class");
        ds.labels.at(r, static_cast<std::size_t>(cls)) = 1.0;
        for (std::size_t c = 0; c < d; ++c) ds.inputs.at(r, c) = detail::field_double(fields[c + 3], csv_path);
    }
    return ds;
}

// --- network checkpoint -----------------------------------------------------

struct Checkpoint {
    Network net;
    std::uint64_t seed = 0;
    int best_epoch = 0;
    std::string stop_reason;
};

inline void save_checkpoint(const Network& net, std::uint64_t seed, int best_epoch,
                            const std::string& stop_reason, const std::string& path) {
    nlohmann::json doc;
    doc["artifact"] = "lagtrend.checkpoint";
    doc["version"] = 1;
    doc["seed"] = seed;
    doc["best_epoch"] = best_epoch;
    doc["stop_reason"] = stop_reason;
    doc["network"] = {{"input_dim", net.config.input_dim},
                      {"hidden_layers", net.config.hidden_layers},
                      {"hidden_width", net.config.hidden_width},
                      {"output_dim", NetworkConfig::output_dim}};
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        nlohmann::json layer;
        layer["out"] = net.weights[l].rows;
        layer["in"] = net.weights[l].cols;
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t o = 0; o < net.weights[l].rows; ++o) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t i = 0; i < net.weights[l].cols; ++i) {
                const double v = net.weights[l].at(o, i);
                if (!std::isfinite(v)) throw std::runtime_error("checkpoint: non-finite weight");
                row.push_back(v);
            }
            rows.push_back(std::move(row));
        }
        layer["weights"] = std::move(rows);
        for (double b : net.biases[l])
            if (!std::isfinite(b)) throw std::runtime_error("checkpoint: non-finite bias");
        layer["biases"] = net.biases[l];
        layers.push_back(std::move(layer));
    }
    doc["layers"] = std::move(layers);
    write_text_file(path, doc.dump() + "\n");
}

inline Checkpoint load_checkpoint(const std::string& path) {
    const auto doc = detail::parse_json_file(path);
    if (doc.at("artifact").get<std::string>() != "lagtrend.checkpoint")
        throw std::runtime_error(path + ": not a checkpoint document");

    Checkpoint cp;
    cp.seed = doc.at("seed").get<std::uint64_t>();
    cp.best_epoch = doc.at("best_epoch").get<int>();
    cp.stop_reason = doc.at("stop_reason").get<std::string>();

    const auto& ncfg = doc.at("network");
    cp.net.config.input_dim = ncfg.at("input_dim").get<std::size_t>();
    cp.net.config.hidden_layers = ncfg.at("hidden_layers").get<int>();
    cp.net.config.hidden_width = ncfg.at("hidden_width").get<int>();
    if (ncfg.at("output_dim").get<int>() != NetworkConfig::output_dim)
        throw std::runtime_error(path + ": unsupported output dimension");
    cp.net.config.validate();

    const auto& layers = doc.at("layers");
    const std::size_t expect = static_cast<std::size_t>(cp.net.config.hidden_layers) + 1;
    if (layers.size() != expect) throw std::runtime_error(path + ": layer count mismatch");
    for (std::size_t l = 0; l < expect; ++l) {
        const auto& layer = layers[l];
        const std::size_t in = cp.net.config.layer_in(l);
        const std::size_t out = cp.net.config.layer_out(l);
        if (layer.at("in").get<std::size_t>() != in || layer.at("out").get<std::size_t>() != out)
            throw std::runtime_error(path + ": layer shape mismatch");
        Matrix w(out, in);
        const auto& rows = layer.at("weights");
        if (rows.size() != out) throw std::runtime_error(path + ": weight row count mismatch");
        for (std::size_t o = 0; o < out; ++o) {
            const auto& row = rows[o];
            if (row.size() != in) throw std::runtime_error(path + ": weight column count mismatch");
            for (std::size_t i = 0; i < in; ++i) w.at(o, i) = row[i].get<double>();
        }
        cp.net.weights.push_back(std::move(w));
        auto biases = layer.at("biases").get<std::vector<double>>();
        if (biases.size() != out) throw std::runtime_error(path + ": bias count mismatch");
        cp.net.biases.push_back(std::move(biases));
    }
    return cp;
}

// --- synthetic truth --------------------------------------------------------

struct SynthTruth {
    std::uint64_t seed = 0;
    int day_count = 0;
    double noise_level = 0.0;
    std::vector<std::string> instruments;
    std::vector<std::string> targets;  // one per dependency, in dependency order
    std::vector<std::vector<std::pair<std::string, double>>> drivers;
    std::vector<std::vector<int>> directions;
    std::vector<std::vector<int>> truth_labels;
};

inline void save_synth_truth(const SyntheticPanel& syn, std::uint64_t seed, const std::string& path) {
    nlohmann::json doc;
    doc["artifact"] = "lagtrend.synth-truth";
    doc["version"] = 1;
    doc["seed"] = seed;
    doc["day_count"] = syn.panel.grid.day_count();
    doc["noise_level"] = syn.structure.noise_level;
    doc["instruments"] = syn.panel.instruments;
    nlohmann::json deps = nlohmann::json::array();
    for (std::size_t i = 0; i < syn.structure.dependencies.size(); ++i) {
        const auto& dep = syn.structure.dependencies[i];
        nlohmann::json d;
        d["target"] = syn.panel.instruments[dep.target];
        nlohmann::json drivers = nlohmann::json::array();
        for (const auto& [drv, w] : dep.drivers)
            drivers.push_back({{"id", syn.panel.instruments[drv]}, {"weight", w}});
        d["drivers"] = std::move(drivers);
        d["directions"] = syn.directions[i];
        d["truth_labels"] = syn.truth_labels[i];
        deps.push_back(std::move(d));
    }
    doc["dependencies"] = std::move(deps);
    write_text_file(path, doc.dump(2) + "\n");
}

inline SynthTruth load_synth_truth(const std::string& path) {
    const auto doc = detail::parse_json_file(path);
    if (doc.at("artifact").get<std::string>() != "lagtrend.synth-truth")
        throw std::runtime_error(path + ": not a synth truth document");
    SynthTruth truth;
    truth.seed = doc.at("seed").get<std::uint64_t>();
    truth.day_count = doc.at("day_count").get<int>();
    truth.noise_level = doc.at("noise_level").get<double>();
    truth.instruments = doc.at("instruments").get<std::vector<std::string>>();
    for (const auto& d : doc.at("dependencies")) {
        truth.targets.push_back(d.at("target").get<std::string>());
        std::vector<std::pair<std::string, double>> drivers;
        for (const auto& drv : d.at("drivers"))
            drivers.emplace_back(drv.at("id").get<std::string>(), drv.at("weight").get<double>());
        truth.drivers.push_back(std::move(drivers));
        truth.directions.push_back(d.at("directions").get<std::vector<int>>());
        truth.truth_labels.push_back(d.at("truth_labels").get<std::vector<int>>());
    }
    return truth;
}

// --- experiment reports -----------------------------------------------------

inline std::string runs_to_csv(const std::vector<RunRecord>& runs) {
    std::string csv = "target,fold,test_rows,accuracy,auc,rand,class1,class2,best_of,svc,best_epoch,epochs,stop_reason\n";
    for (const auto& r : runs) {
        csv += r.target;
        csv += "," + std::to_string(r.fold);
        csv += "," + std::to_string(r.test_rows);
        csv += "," + format_double(r.accuracy_value);
        csv += "," + format_double(r.auc_value);
        csv += "," + format_double(r.rand_accuracy);
        csv += "," + format_double(r.class1_accuracy);
        csv += "," + format_double(r.class2_accuracy);
        csv += "," + format_double(r.best_of_accuracy);
        csv += "," + format_double(r.svc_accuracy);
        csv += "," + std::to_string(r.best_epoch);
        csv += "," + std::to_string(r.epochs_run);
        csv += "," + r.stop_reason + '\n';
    }
    return csv;
}

inline std::vector<RunRecord> parse_runs_csv(const std::string& text, const std::string& where = "runs.csv") {
    const auto lines = detail::split_lines(text);
    if (lines.empty()) throw std::runtime_error(where + ": empty run table");
    {
        const auto head = split_csv_line(lines[0]);
        if (head.size() != 13 || head[0] != "target" || head[3] != "accuracy" || head[12] != "stop_reason")
            throw std::runtime_error(where + ": bad run table header");
    }
    std::vector<RunRecord> runs;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv_line(lines[i]);
        if (f.size() != 13) throw std::runtime_error(where + ": ragged run row");
        RunRecord r;
        r.target = std::string(f[0]);
        r.fold = static_cast<int>(detail::field_int(f[1], where));
        r.test_rows = static_cast<std::size_t>(detail::field_int(f[2], where));
        r.accuracy_value = detail::field_double(f[3], where);
        r.auc_value = detail::field_double(f[4], where);
        r.rand_accuracy = detail::field_double(f[5], where);
        r.class1_accuracy = detail::field_double(f[6], where);
        r.class2_accuracy = detail::field_double(f[7], where);
        r.best_of_accuracy = detail::field_double(f[8], where);
        r.svc_accuracy = detail::field_double(f[9], where);
        r.best_epoch = static_cast<int>(detail::field_int(f[10], where));
        r.epochs_run = static_cast<int>(detail::field_int(f[11], where));
        r.stop_reason = std::string(f[12]);
        runs.push_back(std::move(r));
    }
    return runs;
}

inline std::vector<RunRecord> load_runs_csv(const std::string& path) {
    return parse_runs_csv(read_text_file(path), path);
}

namespace detail {

struct SeriesTable {
    std::vector<std::string> names{"model", "rand", "class1", "class2", "best_of", "svc"};
    std::vector<std::vector<double>> values;  // per-target means, one vector per name
};

inline SeriesTable series_from(const CrossSectionalReport& rep) {
    SeriesTable t;
    t.values.resize(t.names.size());
    for (const auto& ts : rep.per_target) {
        if (ts.failed) continue;
        t.values[0].push_back(ts.model);
        t.values[1].push_back(ts.rand);
        t.values[2].push_back(ts.class1);
        t.values[3].push_back(ts.class2);
        t.values[4].push_back(ts.best_of);
        t.values[5].push_back(ts.svc);
    }
    return t;
}

}  // namespace detail

// Seven-row summary over per-target mean accuracies, one column per model.
inline std::string summary_to_csv(const CrossSectionalReport& rep) {
    const auto table = detail::series_from(rep);
    const char* metrics[] = {"min", "first_quartile", "median", "mean", "third_quartile", "max", "variance"};
    std::string csv = "metric";
    for (const auto& n : table.names) csv += "," + n;
    csv += '\n';
    for (const char* metric : metrics) {
        csv += metric;
        for (const auto& xs : table.values) {
            double v = 0.0;
            const std::string m(metric);
            if (m == "min") v = quantile(xs, 0.0);
            else if (m == "first_quartile") v = quantile(xs, 0.25);
            else if (m == "median") v = quantile(xs, 0.5);
            else if (m == "mean") v = mean_of(xs);
            else if (m == "third_quartile") v = quantile(xs, 0.75);
            else if (m == "max") v = quantile(xs, 1.0);
            else v = mean_and_variance(xs).variance;
            csv += "," + format_double(v);
        }
        csv += '\n';
    }
    return csv;
}

inline std::string box_stats_to_csv(const CrossSectionalReport& rep) {
    const auto table = detail::series_from(rep);
    std::string csv = "series,n,median,q1,q3,iqr,notch_low,notch_high,whisker_low,whisker_high,outliers\n";
    for (std::size_t i = 0; i < table.names.size(); ++i) {
        const auto bs = box_stats(table.values[i]);
        csv += table.names[i];
        csv += "," + std::to_string(bs.n);
        csv += "," + format_double(bs.median);
        csv += "," + format_double(bs.q1);
        csv += "," + format_double(bs.q3);
        csv += "," + format_double(bs.iqr);
        csv += "," + format_double(bs.notch_low);
        csv += "," + format_double(bs.notch_high);
        csv += "," + format_double(bs.whisker_low);
        csv += "," + format_double(bs.whisker_high);
        csv += ",";
        for (std::size_t o = 0; o < bs.outliers.size(); ++o)
            csv += (o ? ";" : "") + format_double(bs.outliers[o]);
        csv += '\n';
    }
    return csv;
}

inline nlohmann::json significance_json(const SignificanceResult& s) {
    return {{"p_value", json_num(s.p_value)},
            {"mean_difference", json_num(s.mean_difference)},
            {"ci_lower_bound", json_num(s.ci_lower_bound)},
            {"test_statistic", json_num(s.test_statistic)},
            {"degrees_of_freedom", json_num(s.degrees_of_freedom)},
            {"degenerate", s.degenerate}};
}

inline nlohmann::json cross_sectional_manifest(const CrossSectionalReport& rep, const nlohmann::json& config_echo,
                                               const std::string& kind = "cross-sectional") {
    nlohmann::json doc;
    doc["artifact"] = "lagtrend.report";
    doc["version"] = 1;
    doc["kind"] = kind;
    doc["created"] = utc_now_iso();
    doc["config"] = config_echo;
    nlohmann::json targets = nlohmann::json::array();
    for (const auto& ts : rep.per_target)
        if (!ts.failed) targets.push_back(ts.target);
    doc["targets"] = std::move(targets);
    doc["failed_targets"] = rep.failed_targets;
    doc["aggregates"] = {{"model", json_num(rep.mean_accuracy)}, {"auc", json_num(rep.mean_auc)},
                         {"rand", json_num(rep.mean_rand)},     {"class1", json_num(rep.mean_class1)},
                         {"class2", json_num(rep.mean_class2)}, {"best_of", json_num(rep.mean_best_of)},
                         {"svc", json_num(rep.mean_svc)}};
    doc["significance"] = {{"vs_rand", significance_json(rep.vs_rand)},
                           {"vs_class1", significance_json(rep.vs_class1)},
                           {"vs_class2", significance_json(rep.vs_class2)},
                           {"vs_best_of", significance_json(rep.vs_best_of)},
                           {"vs_svc", significance_json(rep.vs_svc)}};
    return doc;
}

inline void write_cross_sectional_report(const CrossSectionalReport& rep, const std::string& dir,
                                         const nlohmann::json& config_echo) {
    const std::filesystem::path base(dir);
    write_text_file((base / "runs.csv").string(), runs_to_csv(rep.runs));
    write_text_file((base / "summary.csv").string(), summary_to_csv(rep));
    write_text_file((base / "box_stats.csv").string(), box_stats_to_csv(rep));
    write_text_file((base / "manifest.json").string(), cross_sectional_manifest(rep, config_echo).dump(2) + "\n");
}

inline std::string trace_to_csv(const WalkForwardReport& rep) {
    std::string csv = "step,train_size,avg_accuracy\n";
    for (std::size_t i = 0; i < rep.train_sizes.size(); ++i) {
        csv += std::to_string(i + 1);
        csv += "," + std::to_string(rep.train_sizes[i]);
        csv += "," + format_double(rep.avg_accuracy[i]) + '\n';
    }
    return csv;
}

// One row per target, one column per training size; the accuracy surface.
inline std::string heatmap_to_csv(const WalkForwardReport& rep) {
    std::string csv = "target";
    for (std::size_t sz : rep.train_sizes) csv += "," + std::to_string(sz);
    csv += '\n';
    for (const auto& t : rep.per_target) {
        if (t.failed) continue;
        csv += t.target;
        for (double a : t.step_accuracy) csv += "," + format_double(a);
        csv += '\n';
    }
    return csv;
}

inline nlohmann::json walk_forward_manifest(const WalkForwardReport& rep, const nlohmann::json& config_echo) {
    nlohmann::json doc;
    doc["artifact"] = "lagtrend.report";
    doc["version"] = 1;
    doc["kind"] = "walk-forward";
    doc["created"] = utc_now_iso();
    doc["config"] = config_echo;
    nlohmann::json targets = nlohmann::json::array();
    for (const auto& t : rep.per_target)
        if (!t.failed) targets.push_back(t.target);
    doc["targets"] = std::move(targets);
    doc["failed_targets"] = rep.failed_targets;
    doc["aggregates"] = {{"steps", rep.train_sizes.size()},
                         {"tail_window", rep.tail_window},
                         {"omit_prefix", rep.omit_prefix},
                         {"tail_mean", json_num(rep.tail_mean)}};
    return doc;
}

inline void write_walk_forward_report(const WalkForwardReport& rep, const std::string& dir,
                                      const nlohmann::json& config_echo) {
    const std::filesystem::path base(dir);
    write_text_file((base / "trace.csv").string(), trace_to_csv(rep));
    write_text_file((base / "heatmap.csv").string(), heatmap_to_csv(rep));
    write_text_file((base / "manifest.json").string(), walk_forward_manifest(rep, config_echo).dump(2) + "\n");
}

}  // namespace lagtrend
