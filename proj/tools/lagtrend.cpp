// Command line front end. Four subcommands cover the pipeline end to end:
//   synth       generate a synthetic tick file with planted dependencies
//   ingest      ticks -> aligned panel -> gradient matrix
//   experiment  gradient matrix -> cross-sectional or walk-forward report
//   report      rebuild summary files from a saved run table
// Diagnostics go to stderr; every machine-readable artifact goes to files
// under --out. Exit code 0 means all requested outputs were written.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lagtrend/config.hpp"
#include "lagtrend/experiments.hpp"
#include "lagtrend/io.hpp"
#include "lagtrend/synth.hpp"

namespace {

using namespace lagtrend;

namespace fs = std::filesystem;

fs::path ensure_out_dir(const std::string& out) {
    const fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

// Flag overrides applied on top of the config file.
struct Overrides {
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string mode;
    int workers = 0;
    bool include_target = false;
    int omit_prefix = -1;
};

void apply_overrides(RunConfig& cfg, const Overrides& ov) {
    if (ov.seed_given) cfg.seed = ov.seed;
    if (!ov.mode.empty()) {
        if (ov.mode != "cross-sectional" && ov.mode != "walk-forward")
            throw std::runtime_error("--mode must be cross-sectional or walk-forward");
        cfg.mode = ov.mode;
    }
    if (ov.workers > 0) cfg.workers = ov.workers;
    if (ov.include_target) cfg.include_target = true;
    if (ov.omit_prefix >= 0) cfg.walk_forward.omit_prefix = ov.omit_prefix;
}

int cmd_synth(const std::string& config_path, const std::string& out, const Overrides& ov) {
    RunConfig cfg = load_run_config(config_path);
    apply_overrides(cfg, ov);

    SynthConfig scfg = make_scenario(cfg.synth, cfg.seed);
    scfg.calendar = cfg.calendar;
    scfg.first_day = cfg.synth_first_day;

    const auto syn = generate_panel(scfg);
    const auto dir = ensure_out_dir(out);

    write_ticks_csv((dir / "ticks.csv").string(), panel_to_ticks(syn.panel));
    save_synth_truth(syn, cfg.seed, (dir / "truth.json").string());

    const double ceiling = bayes_accuracy(scfg, 200000);
    nlohmann::json manifest;
    manifest["artifact"] = "lagtrend.report";
    manifest["version"] = 1;
    manifest["kind"] = "synth";
    manifest["created"] = utc_now_iso();
    manifest["config"] = effective_config(cfg);
    manifest["instruments"] = syn.panel.instruments.size();
    manifest["days"] = syn.panel.grid.day_count();
    manifest["dependencies"] = scfg.structure.dependencies.size();
    manifest["noise_level"] = scfg.structure.noise_level;
    manifest["bayes_ceiling_estimate"] = ceiling;
    write_text_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");

    std::cerr << "synth: " << syn.panel.instruments.size() << " instruments, " << syn.panel.grid.day_count()
              << " days, " << scfg.structure.dependencies.size() << " planted dependencies\n"
              << "synth: estimated accuracy ceiling " << ceiling << "\n"
              << "synth: wrote ticks.csv, truth.json, manifest.json to " << dir.string() << "\n";
    return 0;
}

int cmd_ingest(const std::string& ticks_path, const std::string& config_path, const std::string& calendar_path,
               const std::string& out) {
    RunConfig cfg = load_run_config(config_path);
    const SessionCalendar cal = calendar_path.empty() ? cfg.calendar : load_calendar_file(calendar_path);

    std::ifstream in(ticks_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open ticks file: " + ticks_path);
    const auto ingest = ingest_ticks(in);
    std::cerr << "ingest: " << ingest.records.size() << " records parsed, " << ingest.rejected << " rejected\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(ingest.reject_samples.size(), 5); ++i)
        std::cerr << "ingest:   line " << ingest.reject_samples[i].first << ": " << ingest.reject_samples[i].second
                  << "\n";

    auto cleaned = clean_records(ingest.records, cal);
    std::cerr << "ingest: " << cleaned.removed << " records dropped as off-session\n";
    if (cleaned.records.empty()) throw std::runtime_error("ingest: no records survive cleaning");

    DayNumber first_day = day_of(cleaned.records.front().ts);
    DayNumber last_day = first_day;
    for (const auto& r : cleaned.records) {
        first_day = std::min(first_day, day_of(r.ts));
        last_day = std::max(last_day, day_of(r.ts));
    }
    const TimeGrid grid = build_grid(cal, first_day, last_day);

    const auto coverage = filter_instruments(cleaned.records, grid, cfg.min_coverage);
    std::cerr << "ingest: " << coverage.kept.size() << " instruments kept, " << coverage.discarded.size()
              << " below coverage " << cfg.min_coverage << "\n";
    if (coverage.kept.empty()) throw std::runtime_error("ingest: no instrument meets the coverage threshold");

    const std::set<std::string> keep(coverage.kept.begin(), coverage.kept.end());
    std::vector<TickRecord> kept_records;
    kept_records.reserve(cleaned.records.size());
    for (auto& r : cleaned.records)
        if (keep.count(r.instrument)) kept_records.push_back(std::move(r));

    const PricePanel panel = truncate_panel(align_panel(kept_records, grid));
    const GradientMatrix gradients = build_gradient_matrix(panel);
    std::cerr << "ingest: panel " << panel.instrument_count() << " x " << panel.stamp_count() << " stamps, "
              << panel.fill_count() << " cells forward-filled, " << gradients.interval_count() << " intervals\n";

    const auto dir = ensure_out_dir(out);
    save_panel(panel, (dir / "panel.csv").string(), (dir / "panel.meta.json").string());
    save_gradients(gradients, (dir / "gradients.csv").string());

    nlohmann::json manifest;
    manifest["artifact"] = "lagtrend.report";
    manifest["version"] = 1;
    manifest["kind"] = "ingest";
    manifest["created"] = utc_now_iso();
    manifest["config"] = effective_config(cfg);
    manifest["records_parsed"] = ingest.records.size();
    manifest["records_rejected"] = ingest.rejected;
    manifest["records_off_session"] = cleaned.removed;
    manifest["instruments_kept"] = coverage.kept;
    manifest["instruments_discarded"] = coverage.discarded;
    manifest["filled_cells"] = panel.fill_count();
    manifest["grid_stamps"] = panel.stamp_count();
    manifest["intervals"] = gradients.interval_count();
    write_text_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");

    std::cerr << "ingest: wrote panel.csv, panel.meta.json, gradients.csv, manifest.json to " << dir.string() << "\n";
    return 0;
}

int cmd_experiment(const std::string& gradients_path, const std::string& config_path, const std::string& out,
                   const Overrides& ov) {
    RunConfig cfg = load_run_config(config_path);
    apply_overrides(cfg, ov);

    const GradientMatrix gradients = load_gradients(gradients_path);
    std::cerr << "experiment: " << gradients.instrument_count() << " instruments, " << gradients.interval_count()
              << " intervals\n";

    std::vector<std::string> targets = cfg.targets;
    if (targets.empty()) {
        const std::size_t count = std::min<std::size_t>(cfg.target_count, gradients.instrument_count());
        targets = sample_targets(gradients, count, cfg.seed);
    } else {
        for (const auto& t : targets)
            if (gradients.index_of_instrument(t) == static_cast<std::size_t>(-1))
                throw std::runtime_error("experiment: unknown target instrument: " + t);
    }
    std::cerr << "experiment: mode " << cfg.mode << ", " << targets.size() << " targets, seed " << cfg.seed << "\n";

    const ExperimentConfig ecfg = cfg.experiment_config();
    const auto dir = ensure_out_dir(out);

    if (cfg.mode == "cross-sectional") {
        const auto rep = run_cross_sectional(gradients, targets, ecfg);
        write_cross_sectional_report(rep, dir.string(), effective_config(cfg));
        for (const auto& t : rep.failed_targets) std::cerr << "experiment: target failed: " << t << "\n";
        std::cerr << "experiment: mean accuracy " << rep.mean_accuracy << ", best-of baseline " << rep.mean_best_of
                  << ", p(model > best-of) " << rep.vs_best_of.p_value << "\n"
                  << "experiment: wrote runs.csv, summary.csv, box_stats.csv, manifest.json to " << dir.string()
                  << "\n";
    } else {
        const auto rep = run_walk_forward(gradients, targets, ecfg, cfg.walk_forward);
        write_walk_forward_report(rep, dir.string(), effective_config(cfg));
        for (const auto& t : rep.failed_targets) std::cerr << "experiment: target failed: " << t << "\n";
        std::cerr << "experiment: " << rep.train_sizes.size() << " steps, tail mean accuracy " << rep.tail_mean
                  << " over last " << rep.tail_window << " steps\n"
                  << "experiment: wrote trace.csv, heatmap.csv, manifest.json to " << dir.string() << "\n";
    }
    return 0;
}

int cmd_report(const std::string& runs_path, const std::string& out) {
    const auto runs = load_runs_csv(runs_path);
    const auto rep = recompute_cross_sectional(runs);
    const auto dir = ensure_out_dir(out);
    write_text_file((dir / "runs.csv").string(), runs_to_csv(rep.runs));
    write_text_file((dir / "summary.csv").string(), summary_to_csv(rep));
    write_text_file((dir / "box_stats.csv").string(), box_stats_to_csv(rep));
    write_text_file((dir / "manifest.json").string(),
                    cross_sectional_manifest(rep, nullptr, "report-recompute").dump(2) + "\n");
    std::cerr << "report: " << rep.runs.size() << " runs over " << rep.per_target.size() << " targets\n"
              << "report: mean accuracy " << rep.mean_accuracy << ", p(model > best-of) " << rep.vs_best_of.p_value
              << "\n"
              << "report: wrote runs.csv, summary.csv, box_stats.csv, manifest.json to " << dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lagged-correlation trend prediction pipeline"};
    app.require_subcommand(1);

    std::string config_path, out_dir, ticks_path, calendar_path, gradients_path, runs_path;
    Overrides ov;

    auto* synth = app.add_subcommand("synth", "generate a synthetic tick file with planted dependencies");
    synth->add_option("--config", config_path, "run configuration JSON")->required()->check(CLI::ExistingFile);
    synth->add_option("--out", out_dir, "output directory")->required();
    auto* synth_seed = synth->add_option("--seed", ov.seed, "override the configured seed");

    auto* ingest = app.add_subcommand("ingest", "align raw ticks into a panel and gradient matrix");
    ingest->add_option("--ticks", ticks_path, "raw tick CSV")->required()->check(CLI::ExistingFile);
    ingest->add_option("--config", config_path, "run configuration JSON")->required()->check(CLI::ExistingFile);
    ingest->add_option("--calendar", calendar_path, "calendar JSON overriding the config")->check(CLI::ExistingFile);
    ingest->add_option("--out", out_dir, "output directory")->required();

    auto* experiment = app.add_subcommand("experiment", "train and evaluate on a gradient matrix");
    experiment->add_option("--gradients", gradients_path, "gradient matrix CSV")->required()->check(CLI::ExistingFile);
    experiment->add_option("--config", config_path, "run configuration JSON")->required()->check(CLI::ExistingFile);
    experiment->add_option("--out", out_dir, "output directory")->required();
    experiment->add_option("--mode", ov.mode, "cross-sectional or walk-forward");
    auto* exp_seed = experiment->add_option("--seed", ov.seed, "override the configured seed");
    experiment->add_option("--workers", ov.workers, "override the configured worker count");
    experiment->add_flag("--include-target", ov.include_target, "keep the target's own gradients in the inputs");
    experiment->add_option("--omit-prefix", ov.omit_prefix, "drop this many leading supervised rows (walk-forward)");

    auto* report = app.add_subcommand("report", "rebuild summary files from a saved run table");
    report->add_option("--runs", runs_path, "runs.csv from a cross-sectional experiment")
        ->required()
        ->check(CLI::ExistingFile);
    report->add_option("--out", out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);
    ov.seed_given = synth_seed->count() > 0 || exp_seed->count() > 0;

    try {
        if (synth->parsed()) return cmd_synth(config_path, out_dir, ov);
        if (ingest->parsed()) return cmd_ingest(ticks_path, config_path, calendar_path, out_dir);
        if (experiment->parsed()) return cmd_experiment(gradients_path, config_path, out_dir, ov);
        if (report->parsed()) return cmd_report(runs_path, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
