#pragma once

// Experiment drivers. Cross-sectional: every target trained and tested on
// the five rotating contiguous folds, aggregated per target and compared
// against the baseline suite. Walk-forward: one expanding-window model per
// target, updated a few epochs per step, scored on all remaining rows.
//
// All per-run randomness derives from (master seed, target, fold), so
// results are identical whatever the worker count or scheduling order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "lagtrend/baselines.hpp"
#include "lagtrend/dataset.hpp"
#include "lagtrend/folds.hpp"
#include "lagtrend/mlp.hpp"
#include "lagtrend/slope.hpp"
#include "lagtrend/smoothing.hpp"
#include "lagtrend/stats.hpp"

namespace lagtrend {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct ExperimentConfig {
    SmoothingConfig smoothing;
    NetworkConfig network;  // input_dim is filled in per dataset
    TrainConfig training;
    SvcConfig svc;
    bool include_target = false;
    std::uint64_t seed = 0;
    int workers = 1;
};

struct RunRecord {
    std::string target;
    int fold = -1;
    std::size_t test_rows = 0;
    double accuracy_value = kMissing;
    double auc_value = kMissing;  // NaN when the test block is single class
    double rand_accuracy = kMissing;
    double class1_accuracy = kMissing;
    double class2_accuracy = kMissing;
    double best_of_accuracy = kMissing;
    double svc_accuracy = kMissing;
    int best_epoch = 0;
    int epochs_run = 0;
    std::string stop_reason;
};

struct TargetSummary {
    std::string target;
    bool failed = false;
    std::string error;
    double model = kMissing;
    double auc_mean = kMissing;
    double rand = kMissing;
    double class1 = kMissing;
    double class2 = kMissing;
    double best_of = kMissing;
    double svc = kMissing;
};

struct CrossSectionalReport {
    std::vector<RunRecord> runs;
    std::vector<TargetSummary> per_target;
    std::vector<std::string> failed_targets;
    double mean_accuracy = kMissing;
    double mean_auc = kMissing;
    double mean_rand = kMissing;
    double mean_class1 = kMissing;
    double mean_class2 = kMissing;
    double mean_best_of = kMissing;
    double mean_svc = kMissing;
    SignificanceResult vs_rand, vs_class1, vs_class2, vs_best_of, vs_svc;
};

namespace detail {

inline double nan_mean(const std::vector<double>& xs) {
    double s = 0.0;
    std::size_t n = 0;
    for (double x : xs)
        if (!std::isnan(x)) {
            s += x;
            ++n;
        }
    return n == 0 ? kMissing : s / static_cast<double>(n);
}

// Runs `count` jobs with up to `workers` threads. Jobs must not touch
// shared mutable state except their own result slot.
template <typename Fn>
inline void run_jobs(std::size_t count, int workers, Fn&& job) {
    const std::size_t n_threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) job(i);
        });
    for (auto& th : pool) th.join();
}

inline std::vector<int> actual_classes(const Matrix& labels, const std::vector<std::size_t>& rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(label_class(labels, r));
    return out;
}

// Pools per-target means into the report aggregates and significance tests.
// Shared by the live run and the recompute-from-runs path so both produce
// bit-identical numbers from the same per-target summaries.
inline void finalize_cross_sectional(CrossSectionalReport& rep) {
    std::vector<double> model, aucs, rand_a, c1, c2, best, svc;
    rep.failed_targets.clear();
    for (const auto& ts : rep.per_target) {
        if (ts.failed) {
            rep.failed_targets.push_back(ts.target);
            continue;
        }
        model.push_back(ts.model);
        aucs.push_back(ts.auc_mean);
        rand_a.push_back(ts.rand);
        c1.push_back(ts.class1);
        c2.push_back(ts.class2);
        best.push_back(ts.best_of);
        svc.push_back(ts.svc);
    }
    require(model.size() >= 2, "cross-sectional: fewer than two targets succeeded");
    rep.mean_accuracy = mean_of(model);
    rep.mean_auc = nan_mean(aucs);
    rep.mean_rand = mean_of(rand_a);
    rep.mean_class1 = mean_of(c1);
    rep.mean_class2 = mean_of(c2);
    rep.mean_best_of = mean_of(best);
    rep.mean_svc = mean_of(svc);
    rep.vs_rand = upper_tail_test(model, rand_a);
    rep.vs_class1 = upper_tail_test(model, c1);
    rep.vs_class2 = upper_tail_test(model, c2);
    rep.vs_best_of = upper_tail_test(model, best);
    rep.vs_svc = upper_tail_test(model, svc);
}

inline TargetSummary summarize_target(const std::string& target, const std::vector<RunRecord>& runs) {
    TargetSummary ts;
    ts.target = target;
    std::vector<double> acc, aucs, rand_a, c1, c2, best, svc;
    for (const auto& r : runs) {
        acc.push_back(r.accuracy_value);
        aucs.push_back(r.auc_value);
        rand_a.push_back(r.rand_accuracy);
        c1.push_back(r.class1_accuracy);
        c2.push_back(r.class2_accuracy);
        best.push_back(r.best_of_accuracy);
        svc.push_back(r.svc_accuracy);
    }
    ts.model = mean_of(acc);
    ts.auc_mean = nan_mean(aucs);
    ts.rand = mean_of(rand_a);
    ts.class1 = mean_of(c1);
    ts.class2 = mean_of(c2);
    ts.best_of = mean_of(best);
    ts.svc = mean_of(svc);
    return ts;
}

}  // namespace detail

// One (target, fold) unit of the cross-sectional protocol.
inline RunRecord run_single_fold(const GradientMatrix& gradients, const std::string& target, int fold,
                                 const FoldPlan& plan, const ExperimentConfig& cfg) {
    RunRecord rec;
    rec.target = target;
    rec.fold = fold;

    const std::uint64_t run_seed =
        derive_seed(derive_seed(cfg.seed, hash_string("cross-sectional")), hash_string(target),
                    static_cast<std::uint64_t>(fold));

    auto ds = make_dataset(gradients, target, cfg.include_target, cfg.smoothing, plan.tags_for_fold(fold), fold);
    const auto train_rows = ds.rows_tagged(SplitTag::train);
    const auto val_rows = ds.rows_tagged(SplitTag::validation);
    const auto test_rows = ds.rows_tagged(SplitTag::test);
    rec.test_rows = test_rows.size();

    NetworkConfig ncfg = cfg.network;
    ncfg.input_dim = ds.dim();
    auto net = init_network(ncfg, run_seed);
    TrainConfig tcfg = cfg.training;
    tcfg.seed = run_seed;
    const auto report = train(net, ds.inputs, ds.labels, train_rows, val_rows, tcfg);
    rec.best_epoch = report.best_epoch;
    rec.epochs_run = static_cast<int>(report.epochs.size());
    rec.stop_reason = report.stop_reason;

    const auto predictions = predict(net, ds.inputs, test_rows);
    const auto actual = detail::actual_classes(ds.labels, test_rows);
    rec.accuracy_value = accuracy(predictions, actual);

    bool single_class = true;
    for (int a : actual)
        if (a != actual.front()) single_class = false;
    if (!single_class) {
        std::vector<double> scores;
        scores.reserve(test_rows.size());
        for (std::size_t r : test_rows) scores.push_back(score_up(net, ds.inputs.row(r)));
        rec.auc_value = auc(scores, actual);
    }

    const auto base = make_baseline_set(predictions, actual, run_seed);
    rec.rand_accuracy = base.rand;
    rec.class1_accuracy = base.class1;
    rec.class2_accuracy = base.class2;
    rec.best_of_accuracy = base.best_of;

    SvcConfig scfg = cfg.svc;
    scfg.seed = run_seed;
    const auto svc = train_linear_svc(ds.inputs, ds.labels, train_rows, scfg);
    rec.svc_accuracy = accuracy(predict_linear(svc, ds.inputs, test_rows), actual);
    return rec;
}

inline CrossSectionalReport run_cross_sectional(const GradientMatrix& gradients,
                                                const std::vector<std::string>& targets,
                                                const ExperimentConfig& cfg) {
    require(!targets.empty(), "cross-sectional: no targets");
    require(gradients.interval_count() >= 2, "cross-sectional: too few intervals");
    const FoldPlan plan = make_fold_plan(gradients.interval_count() - 1, cfg.seed);

    CrossSectionalReport rep;
    rep.per_target.resize(targets.size());
    std::vector<std::vector<RunRecord>> per_target_runs(targets.size());

    detail::run_jobs(targets.size(), cfg.workers, [&](std::size_t ti) {
        TargetSummary& ts = rep.per_target[ti];
        ts.target = targets[ti];
        try {
            for (int f = 0; f < FoldPlan::fold_count; ++f)
                per_target_runs[ti].push_back(run_single_fold(gradients, targets[ti], f, plan, cfg));
            ts = detail::summarize_target(targets[ti], per_target_runs[ti]);
        } catch (const std::exception& e) {
            ts.failed = true;
            ts.error = e.what();
            per_target_runs[ti].clear();
        }
    });

    for (std::size_t ti = 0; ti < targets.size(); ++ti)
        for (auto& r : per_target_runs[ti]) rep.runs.push_back(std::move(r));
    detail::finalize_cross_sectional(rep);
    return rep;
}

// Rebuilds summaries, aggregates and significance from a bare run table,
// grouping by target in order of first appearance. Feeding back the runs of
// a finished report reproduces its aggregate block bit for bit.
inline CrossSectionalReport recompute_cross_sectional(std::vector<RunRecord> runs) {
    require(!runs.empty(), "recompute: no runs");
    CrossSectionalReport rep;
    std::vector<std::string> order;
    for (const auto& r : runs)
        if (std::find(order.begin(), order.end(), r.target) == order.end()) order.push_back(r.target);
    for (const auto& target : order) {
        std::vector<RunRecord> group;
        for (const auto& r : runs)
            if (r.target == target) group.push_back(r);
        rep.per_target.push_back(detail::summarize_target(target, group));
    }
    rep.runs = std::move(runs);
    detail::finalize_cross_sectional(rep);
    return rep;
}

struct WalkForwardConfig {
    int update_epochs = 3;
    double max_train_fraction = 0.9;
    int tail_window = 100;
    int omit_prefix = 0;

    void validate() const {
        if (update_epochs < 1) throw std::runtime_error("walk-forward: update_epochs must be >= 1");
        if (!(max_train_fraction > 0.0) || max_train_fraction >= 1.0)
            throw std::runtime_error("walk-forward: max_train_fraction must be in (0,1)");
        if (tail_window < 1) throw std::runtime_error("walk-forward: tail_window must be >= 1");
        if (omit_prefix < 0) throw std::runtime_error("walk-forward: omit_prefix must be >= 0");
    }
};

struct WalkForwardTarget {
    std::string target;
    bool failed = false;
    std::string error;
    std::vector<double> step_accuracy;  // one entry per training size
};

struct WalkForwardReport {
    std::vector<std::size_t> train_sizes;  // l = 1 .. floor(f * N)
    std::vector<WalkForwardTarget> per_target;
    std::vector<std::string> failed_targets;
    std::vector<double> avg_accuracy;  // across targets, per step
    double tail_mean = kMissing;       // mean of avg_accuracy over the final tail_window steps
    int tail_window = 0;
    int omit_prefix = 0;
};

// One training prefix must hold this many rows before updates switch from
// plain epochs to validated early stopping; below it a held-out block would
// be empty or absurdly small.
constexpr std::size_t kWalkForwardValidationFloor = 10;

// Expanding-window protocol for one target. Supervised rows before
// omit_prefix are dropped entirely. At training size l the model has seen
// rows [0, l) and is scored on rows [l, N). The first step trains a fresh
// network for max_epochs; later steps continue the same optimizer state for
// update_epochs. Once l reaches kWalkForwardValidationFloor the last fifth
// of the prefix is held out and each update keeps the epoch with the lowest
// held-out loss. Scaler and smoothing are redone each step from the
// training prefix so no information flows backward.
inline WalkForwardTarget walk_forward_single(const GradientMatrix& gradients, const std::string& target,
                                             const ExperimentConfig& cfg, const WalkForwardConfig& wf) {
    WalkForwardTarget out;
    out.target = target;
    wf.validate();

    const std::size_t total_rows = gradients.interval_count() - 1;
    require(static_cast<std::size_t>(wf.omit_prefix) < total_rows, "walk-forward: omit_prefix swallows every row");
    const std::size_t offset = static_cast<std::size_t>(wf.omit_prefix);
    const std::size_t N = total_rows - offset;
    const std::size_t max_train = static_cast<std::size_t>(wf.max_train_fraction * static_cast<double>(N));
    require(max_train >= 1, "walk-forward: no training steps, series too short");
    require(static_cast<std::size_t>(wf.tail_window) <= max_train, "walk-forward: tail_window exceeds step count");

    const std::uint64_t run_seed =
        derive_seed(derive_seed(cfg.seed, hash_string("walk-forward")), hash_string(target));

    NetworkConfig ncfg = cfg.network;
    TrainConfig tcfg = cfg.training;
    tcfg.seed = run_seed;

    Network net;
    std::unique_ptr<SgdState> st;
    std::vector<SplitTag> split(total_rows, SplitTag::excluded);

    for (std::size_t l = 1; l <= max_train; ++l) {
        const std::size_t val_count = l >= kWalkForwardValidationFloor ? l / 5 : 0;
        for (std::size_t i = 0; i < total_rows; ++i) {
            if (i < offset)
                split[i] = SplitTag::excluded;
            else if (i < offset + l - val_count)
                split[i] = SplitTag::train;
            else if (i < offset + l)
                split[i] = SplitTag::validation;
            else
                split[i] = SplitTag::test;
        }
        auto ds = make_dataset(gradients, target, cfg.include_target, cfg.smoothing, split, -1);
        const auto train_rows = ds.rows_tagged(SplitTag::train);
        const auto test_rows = ds.rows_tagged(SplitTag::test);

        if (l == 1) {
            ncfg.input_dim = ds.dim();
            net = init_network(ncfg, run_seed);
            st = std::make_unique<SgdState>(net, tcfg);
            train_epochs(net, *st, tcfg, ds.inputs, ds.labels, train_rows, tcfg.max_epochs);
        } else if (val_count == 0) {
            train_epochs(net, *st, tcfg, ds.inputs, ds.labels, train_rows, wf.update_epochs);
        } else {
            // early-stopped update: keep the weights from the best held-out
            // epoch, but let the optimizer state run on uninterrupted
            const auto val_rows = ds.rows_tagged(SplitTag::validation);
            Network best = net;
            double best_loss = mean_data_loss(net, ds.inputs, ds.labels, val_rows);
            int since_best = 0;
            for (int e = 0; e < wf.update_epochs; ++e) {
                train_one_epoch(net, *st, tcfg, ds.inputs, ds.labels, train_rows);
                const double vl = mean_data_loss(net, ds.inputs, ds.labels, val_rows);
                if (vl < best_loss) {
                    best_loss = vl;
                    best = net;
                    since_best = 0;
                } else if (++since_best >= tcfg.patience) {
                    break;
                }
            }
            net = best;
        }

        const auto predictions = predict(net, ds.inputs, test_rows);
        out.step_accuracy.push_back(accuracy(predictions, detail::actual_classes(ds.labels, test_rows)));
    }
    return out;
}

inline WalkForwardReport run_walk_forward(const GradientMatrix& gradients, const std::vector<std::string>& targets,
                                          const ExperimentConfig& cfg, const WalkForwardConfig& wf) {
    require(!targets.empty(), "walk-forward: no targets");
    require(gradients.interval_count() >= 2, "walk-forward: too few intervals");
    wf.validate();

    WalkForwardReport rep;
    rep.tail_window = wf.tail_window;
    rep.omit_prefix = wf.omit_prefix;
    rep.per_target.resize(targets.size());

    detail::run_jobs(targets.size(), cfg.workers, [&](std::size_t ti) {
        try {
            rep.per_target[ti] = walk_forward_single(gradients, targets[ti], cfg, wf);
        } catch (const std::exception& e) {
            rep.per_target[ti].target = targets[ti];
            rep.per_target[ti].failed = true;
            rep.per_target[ti].error = e.what();
        }
    });

    std::size_t n_steps = 0;
    for (const auto& t : rep.per_target) {
        if (t.failed)
            rep.failed_targets.push_back(t.target);
        else
            n_steps = t.step_accuracy.size();
    }
    require(n_steps > 0, "walk-forward: every target failed");
    for (std::size_t l = 1; l <= n_steps; ++l) rep.train_sizes.push_back(l);

    rep.avg_accuracy.assign(n_steps, 0.0);
    std::size_t ok = 0;
    for (const auto& t : rep.per_target) {
        if (t.failed) continue;
        require(t.step_accuracy.size() == n_steps, "walk-forward: inconsistent step counts across targets");
        for (std::size_t i = 0; i < n_steps; ++i) rep.avg_accuracy[i] += t.step_accuracy[i];
        ++ok;
    }
    for (auto& v : rep.avg_accuracy) v /= static_cast<double>(ok);

    double tail = 0.0;
    for (std::size_t i = n_steps - static_cast<std::size_t>(wf.tail_window); i < n_steps; ++i)
        tail += rep.avg_accuracy[i];
    rep.tail_mean = tail / static_cast<double>(wf.tail_window);
    return rep;
}

// Deterministic target choice when the caller does not name instruments.
inline std::vector<std::string> sample_targets(const GradientMatrix& gradients, std::size_t count,
                                               std::uint64_t seed) {
    require(count >= 1 && count <= gradients.instrument_count(), "sample_targets: bad count");
    Rng rng(derive_seed(seed, hash_string("sample-targets")));
    auto picks = rng.sample_indices(gradients.instrument_count(), count);
    std::sort(picks.begin(), picks.end());
    std::vector<std::string> ids;
    ids.reserve(count);
    for (std::size_t p : picks) ids.push_back(gradients.instruments[p]);
    return ids;
}

}  // namespace lagtrend
