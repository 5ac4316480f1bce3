#pragma once

// Run configuration, one JSON document per run. Parsing is strict: unknown
// keys and wrong types are rejected with the offending dotted path, and the
// seed is mandatory so no run can be accidentally unseeded. Every section is
// optional and falls back to the documented defaults.

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "lagtrend/csv.hpp"
#include "lagtrend/experiments.hpp"
#include "lagtrend/mlp.hpp"
#include "lagtrend/smoothing.hpp"
#include "lagtrend/synth.hpp"
#include "lagtrend/timegrid.hpp"

namespace lagtrend {

struct RunConfig {
    std::uint64_t seed = 0;
    SessionCalendar calendar;
    double min_coverage = 0.8;
    SmoothingConfig smoothing;
    NetworkConfig network;  // input_dim stays 0 until a dataset fixes it
    TrainConfig training;
    SvcConfig svc;

    std::string mode = "cross-sectional";
    std::vector<std::string> targets;  // empty: sample target_count instruments
    std::size_t target_count = 10;
    bool include_target = false;
    int workers = 1;
    WalkForwardConfig walk_forward;

    ScenarioParams synth;
    DayNumber synth_first_day = 18631;  // 2021-01-04

    ExperimentConfig experiment_config() const {
        ExperimentConfig cfg;
        cfg.smoothing = smoothing;
        cfg.network = network;
        cfg.training = training;
        cfg.svc = svc;
        cfg.include_target = include_target;
        cfg.seed = seed;
        cfg.workers = workers;
        return cfg;
    }
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& path, const std::string& what) {
    throw std::runtime_error("config: " + path + ": " + what);
}

inline void expect_object(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) config_fail(path, "must be an object");
}

inline void reject_unknown(const nlohmann::json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* a : allowed) known = known || it.key() == a;
        if (!known) config_fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
}

template <typename T>
inline void read_field(const nlohmann::json& obj, const std::string& path, const char* key, T& into) {
    if (!obj.contains(key)) return;
    try {
        into = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        config_fail(path + "." + key, "wrong type");
    }
}

}  // namespace detail

inline SessionCalendar parse_calendar(const nlohmann::json& j, const std::string& path) {
    detail::expect_object(j, path);
    detail::reject_unknown(j, path, {"trading_weekdays", "session_start_hour", "session_end_hour", "holidays"});
    SessionCalendar cal;
    if (j.contains("trading_weekdays")) {
        std::vector<int> days;
        detail::read_field(j, path, "trading_weekdays", days);
        cal.trading_weekdays.fill(false);
        for (int d : days) {
            if (d < 0 || d > 6) detail::config_fail(path + ".trading_weekdays", "weekday outside 0..6");
            cal.trading_weekdays[static_cast<std::size_t>(d)] = true;
        }
    }
    detail::read_field(j, path, "session_start_hour", cal.session_start_hour);
    detail::read_field(j, path, "session_end_hour", cal.session_end_hour);
    if (j.contains("holidays")) {
        std::vector<std::string> dates;
        detail::read_field(j, path, "holidays", dates);
        for (const auto& s : dates) {
            const auto d = parse_date(s);
            if (!d) detail::config_fail(path + ".holidays", "bad date: " + s);
            cal.holidays.insert(*d);
        }
    }
    cal.validate();
    return cal;
}

inline RunConfig parse_run_config(const nlohmann::json& j) {
    detail::expect_object(j, "");
    detail::reject_unknown(
        j, "", {"seed", "calendar", "panel", "smoothing", "network", "training", "svc", "experiment", "synth"});
    RunConfig cfg;

    if (!j.contains("seed")) detail::config_fail("seed", "required");
    if (!j.at("seed").is_number_unsigned()) detail::config_fail("seed", "must be a non-negative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("calendar")) cfg.calendar = parse_calendar(j.at("calendar"), "calendar");

    if (j.contains("panel")) {
        const auto& p = j.at("panel");
        detail::expect_object(p, "panel");
        detail::reject_unknown(p, "panel", {"min_coverage"});
        detail::read_field(p, "panel", "min_coverage", cfg.min_coverage);
        if (!(cfg.min_coverage > 0.0) || cfg.min_coverage > 1.0)
            detail::config_fail("panel.min_coverage", "must be in (0,1]");
    }

    if (j.contains("smoothing")) {
        const auto& p = j.at("smoothing");
        detail::expect_object(p, "smoothing");
        detail::reject_unknown(p, "smoothing", {"alpha", "init", "k"});
        detail::read_field(p, "smoothing", "alpha", cfg.smoothing.alpha);
        detail::read_field(p, "smoothing", "k", cfg.smoothing.k);
        if (p.contains("init")) {
            std::string init;
            detail::read_field(p, "smoothing", "init", init);
            if (init == "first_value")
                cfg.smoothing.init_mode = SmoothingConfig::Init::first_value;
            else if (init == "mean_of_first_k")
                cfg.smoothing.init_mode = SmoothingConfig::Init::mean_of_first_k;
            else
                detail::config_fail("smoothing.init", "must be first_value or mean_of_first_k");
        }
        cfg.smoothing.validate();
    }

    if (j.contains("network")) {
        const auto& p = j.at("network");
        detail::expect_object(p, "network");
        detail::reject_unknown(p, "network", {"hidden_layers", "hidden_width"});
        detail::read_field(p, "network", "hidden_layers", cfg.network.hidden_layers);
        detail::read_field(p, "network", "hidden_width", cfg.network.hidden_width);
        if (cfg.network.hidden_layers < 1 || cfg.network.hidden_width < 1)
            detail::config_fail("network", "hidden_layers and hidden_width must be >= 1");
    }

    if (j.contains("training")) {
        const auto& p = j.at("training");
        detail::expect_object(p, "training");
        detail::reject_unknown(p, "training",
                               {"initial_learning_rate", "decay_coefficient", "momentum", "l2", "batch_size",
                                "max_epochs", "patience"});
        detail::read_field(p, "training", "initial_learning_rate", cfg.training.initial_learning_rate);
        detail::read_field(p, "training", "decay_coefficient", cfg.training.decay_coefficient);
        detail::read_field(p, "training", "momentum", cfg.training.momentum);
        detail::read_field(p, "training", "l2", cfg.training.l2);
        detail::read_field(p, "training", "batch_size", cfg.training.batch_size);
        detail::read_field(p, "training", "max_epochs", cfg.training.max_epochs);
        detail::read_field(p, "training", "patience", cfg.training.patience);
        cfg.training.validate();
    }

    if (j.contains("svc")) {
        const auto& p = j.at("svc");
        detail::expect_object(p, "svc");
        detail::reject_unknown(p, "svc", {"l2", "epochs", "step"});
        detail::read_field(p, "svc", "l2", cfg.svc.l2);
        detail::read_field(p, "svc", "epochs", cfg.svc.epochs);
        detail::read_field(p, "svc", "step", cfg.svc.step);
        cfg.svc.validate();
    }

    if (j.contains("experiment")) {
        const auto& p = j.at("experiment");
        detail::expect_object(p, "experiment");
        detail::reject_unknown(p, "experiment",
                               {"mode", "targets", "target_count", "include_target", "workers", "walk_forward"});
        detail::read_field(p, "experiment", "mode", cfg.mode);
        if (cfg.mode != "cross-sectional" && cfg.mode != "walk-forward")
            detail::config_fail("experiment.mode", "must be cross-sectional or walk-forward");
        if (p.contains("targets") && p.contains("target_count"))
            detail::config_fail("experiment", "targets and target_count are mutually exclusive");
        detail::read_field(p, "experiment", "targets", cfg.targets);
        detail::read_field(p, "experiment", "target_count", cfg.target_count);
        detail::read_field(p, "experiment", "include_target", cfg.include_target);
        detail::read_field(p, "experiment", "workers", cfg.workers);
        if (cfg.target_count < 1) detail::config_fail("experiment.target_count", "must be >= 1");
        if (cfg.workers < 1) detail::config_fail("experiment.workers", "must be >= 1");
        if (p.contains("walk_forward")) {
            const auto& w = p.at("walk_forward");
            detail::expect_object(w, "experiment.walk_forward");
            detail::reject_unknown(w, "experiment.walk_forward",
                                   {"update_epochs", "max_train_fraction", "tail_window", "omit_prefix"});
            detail::read_field(w, "experiment.walk_forward", "update_epochs", cfg.walk_forward.update_epochs);
            detail::read_field(w, "experiment.walk_forward", "max_train_fraction", cfg.walk_forward.max_train_fraction);
            detail::read_field(w, "experiment.walk_forward", "tail_window", cfg.walk_forward.tail_window);
            detail::read_field(w, "experiment.walk_forward", "omit_prefix", cfg.walk_forward.omit_prefix);
            cfg.walk_forward.validate();
        }
    }

    if (j.contains("synth")) {
        const auto& p = j.at("synth");
        detail::expect_object(p, "synth");
        detail::reject_unknown(p, "synth",
                               {"instrument_count", "dependency_count", "drivers_per_dependency", "noise_level",
                                "day_count", "first_day"});
        detail::read_field(p, "synth", "instrument_count", cfg.synth.instrument_count);
        detail::read_field(p, "synth", "dependency_count", cfg.synth.dependency_count);
        detail::read_field(p, "synth", "drivers_per_dependency", cfg.synth.drivers_per_dependency);
        detail::read_field(p, "synth", "noise_level", cfg.synth.noise_level);
        detail::read_field(p, "synth", "day_count", cfg.synth.day_count);
        if (p.contains("first_day")) {
            std::string s;
            detail::read_field(p, "synth", "first_day", s);
            const auto d = parse_date(s);
            if (!d) detail::config_fail("synth.first_day", "bad date: " + s);
            cfg.synth_first_day = *d;
        }
        if (cfg.synth.noise_level < 0.0) detail::config_fail("synth.noise_level", "must be >= 0");
        if (cfg.synth.day_count < 20) detail::config_fail("synth.day_count", "must be >= 20");
    }

    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    try {
        return parse_run_config(nlohmann::json::parse(read_text_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

// A calendar file is a bare calendar object; it overrides the run config's
// calendar section when given.
inline SessionCalendar load_calendar_file(const std::string& path) {
    try {
        return parse_calendar(nlohmann::json::parse(read_text_file(path)), "calendar");
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

// The fully resolved configuration, defaults included; what manifests echo.
inline nlohmann::json effective_config(const RunConfig& cfg) {
    std::vector<int> weekdays;
    for (int d = 0; d < 7; ++d)
        if (cfg.calendar.trading_weekdays[static_cast<std::size_t>(d)]) weekdays.push_back(d);
    std::vector<std::string> holidays;
    for (DayNumber d : cfg.calendar.holidays) holidays.push_back(format_date(d));

    nlohmann::json doc;
    doc["seed"] = cfg.seed;
    doc["calendar"] = {{"trading_weekdays", weekdays},
                       {"session_start_hour", cfg.calendar.session_start_hour},
                       {"session_end_hour", cfg.calendar.session_end_hour},
                       {"holidays", holidays}};
    doc["panel"] = {{"min_coverage", cfg.min_coverage}};
    doc["smoothing"] = {{"alpha", cfg.smoothing.alpha},
                        {"init", cfg.smoothing.init_mode == SmoothingConfig::Init::first_value ? "first_value"
                                                                                              : "mean_of_first_k"},
                        {"k", cfg.smoothing.k}};
    doc["network"] = {{"hidden_layers", cfg.network.hidden_layers}, {"hidden_width", cfg.network.hidden_width}};
    doc["training"] = {{"initial_learning_rate", cfg.training.initial_learning_rate},
                       {"decay_coefficient", cfg.training.decay_coefficient},
                       {"momentum", cfg.training.momentum},
                       {"l2", cfg.training.l2},
                       {"batch_size", cfg.training.batch_size},
                       {"max_epochs", cfg.training.max_epochs},
                       {"patience", cfg.training.patience}};
    doc["svc"] = {{"l2", cfg.svc.l2}, {"epochs", cfg.svc.epochs}, {"step", cfg.svc.step}};
    doc["experiment"] = {{"mode", cfg.mode},
                         {"targets", cfg.targets},
                         {"target_count", cfg.target_count},
                         {"include_target", cfg.include_target},
                         {"workers", cfg.workers},
                         {"walk_forward",
                          {{"update_epochs", cfg.walk_forward.update_epochs},
                           {"max_train_fraction", cfg.walk_forward.max_train_fraction},
                           {"tail_window", cfg.walk_forward.tail_window},
                           {"omit_prefix", cfg.walk_forward.omit_prefix}}}};
    doc["synth"] = {{"instrument_count", cfg.synth.instrument_count},
                    {"dependency_count", cfg.synth.dependency_count},
                    {"drivers_per_dependency", cfg.synth.drivers_per_dependency},
                    {"noise_level", cfg.synth.noise_level},
                    {"day_count", cfg.synth.day_count},
                    {"first_day", format_date(cfg.synth_first_day)}};
    return doc;
}

}  // namespace lagtrend
