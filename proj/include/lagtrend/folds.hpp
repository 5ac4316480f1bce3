#pragma once

// Five-fold split plan over time-ordered rows. Blocks are contiguous: each
// fold takes one fifth as the test block, the cyclically next fifth as
// validation, and the remaining 60% as training. Test blocks rotate so
// every row is tested exactly once.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lagtrend {

// `excluded` rows take no part in fitting, smoothing or evaluation; the
// walk-forward omit-prefix option uses it. Fold plans never emit it.
enum class SplitTag : std::uint8_t { train = 0, validation = 1, test = 2, excluded = 3 };

struct FoldSplit {
    std::size_t test_begin, test_end;  // [begin, end)
    std::size_t val_begin, val_end;
};

struct FoldPlan {
    std::size_t n_rows = 0;
    static constexpr int fold_count = 5;
    bool contiguous = true;
    std::vector<FoldSplit> folds;

    std::vector<SplitTag> tags_for_fold(int fold) const {
        const auto& f = folds.at(static_cast<std::size_t>(fold));
        std::vector<SplitTag> tags(n_rows, SplitTag::train);
        for (std::size_t i = f.test_begin; i < f.test_end; ++i) tags[i] = SplitTag::test;
        for (std::size_t i = f.val_begin; i < f.val_end; ++i) tags[i] = SplitTag::validation;
        return tags;
    }
};

// The seed parameter is accepted for interface stability but unused: with
// contiguous time blocks there is nothing left to randomize.
inline FoldPlan make_fold_plan(std::size_t n_rows, std::uint64_t /*seed*/ = 0) {
    if (n_rows < 10) throw std::runtime_error("make_fold_plan: need at least 10 rows");
    FoldPlan plan;
    plan.n_rows = n_rows;
    std::size_t bounds[FoldPlan::fold_count + 1];
    for (int i = 0; i <= FoldPlan::fold_count; ++i)
        bounds[i] = (n_rows * static_cast<std::size_t>(i)) / FoldPlan::fold_count;
    for (int f = 0; f < FoldPlan::fold_count; ++f) {
        const int v = (f + 1) % FoldPlan::fold_count;
        plan.folds.push_back({bounds[f], bounds[f + 1], bounds[v], bounds[v + 1]});
    }
    return plan;
}

}  // namespace lagtrend
