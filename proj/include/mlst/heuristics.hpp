#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlst/steiner.hpp"

namespace mlst {

// A subset of levels driving the composite heuristic. Always contains level 1,
// strictly increasing, bounded by the instance's level count.
struct LevelSubset {
    std::vector<int> levels;

    static LevelSubset of(std::vector<int> levels, int ell) {
        LevelSubset q{std::move(levels)};
        q.validate(ell);
        return q;
    }
    static LevelSubset all(int ell) {
        std::vector<int> v(ell);
        for (int i = 0; i < ell; ++i) v[i] = i + 1;
        return {std::move(v)};
    }
    static LevelSubset bottom_only() { return {{1}}; }

    void validate(int ell) const {
        if (levels.empty() || levels.front() != 1)
            throw data_error("level subset: must contain level 1");
        for (size_t k = 1; k < levels.size(); ++k)
            if (levels[k] <= levels[k - 1]) throw data_error("level subset: not strictly increasing");
        if (levels.back() > ell) throw data_error("level subset: level beyond instance");
    }

    int size() const { return static_cast<int>(levels.size()); }

    std::string to_string() const {
        std::string s = "{";
        for (size_t k = 0; k < levels.size(); ++k) {
            if (k) s += ",";
            s += std::to_string(levels[k]);
        }
        return s + "}";
    }

    friend bool operator==(const LevelSubset& a, const LevelSubset& b) { return a.levels == b.levels; }
    friend bool operator<(const LevelSubset& a, const LevelSubset& b) { return a.levels < b.levels; }
};

struct HeuristicRun {
    MlstSolution solution;
    Rat cost;
    int stp_calls = 0;
    std::optional<LevelSubset> subset_used;
    SteinerMode mode = SteinerMode::exact;
};

// Composite heuristic over a level subset Q = {1 = i_1 < ... < i_m}:
// Steiner tree at the top chosen level, then alternate zero-cost overlays
// (downward) and pruning (upward in between), exactly |Q| Steiner calls.
inline HeuristicRun composite_on_q(const MlstInstance& inst, const LevelSubset& q, SteinerMode mode) {
    int ell = inst.levels();
    q.validate(ell);
    std::vector<std::vector<EdgeId>> sets(ell + 1);  // 1-based
    int calls = 0;

    int im = q.levels.back();
    SteinerResult top = steiner_tree(inst.graph, inst.terminals_at(im), WeightOverlay::none(), mode);
    ++calls;
    sets[im] = top.edges;
    // Levels above i_m: pruned subtrees of the i_m tree, top first.
    for (int j = ell; j > im; --j) {
        std::span<const EdgeId> forced =
            (j == ell) ? std::span<const EdgeId>{} : std::span<const EdgeId>(sets[j + 1]);
        sets[j] = prune(inst.graph, sets[im], inst.terminals_at(j), forced);
    }

    for (int k = q.size() - 2; k >= 0; --k) {
        int cur = q.levels[k];
        int prev = q.levels[k + 1];
        WeightOverlay overlay = WeightOverlay::zeroing(sets[prev], inst.graph.edge_count());
        SteinerResult st = steiner_tree(inst.graph, inst.terminals_at(cur), overlay, mode);
        ++calls;
        std::vector<EdgeId> merged = st.edges;
        merged.insert(merged.end(), sets[prev].begin(), sets[prev].end());
        sets[cur] = force_tree(inst.graph, detail::sorted_unique(std::move(merged)), sets[prev], overlay);
        // Levels strictly between cur and prev: pruned from the cur tree,
        // keeping the prev tree intact.
        for (int j = prev - 1; j > cur; --j)
            sets[j] = prune(inst.graph, sets[cur], inst.terminals_at(j), sets[prev]);
    }

    MlstSolution sol;
    sol.edge_sets.assign(sets.begin() + 1, sets.end());
    HeuristicRun run;
    run.cost = solution_cost(inst, sol);
    run.solution = std::move(sol);
    run.stp_calls = calls;
    run.subset_used = q;
    run.mode = mode;
    return run;
}

// One Steiner tree at the bottom, everything above is pruning.
inline HeuristicRun bottom_up(const MlstInstance& inst, SteinerMode mode) {
    HeuristicRun run = composite_on_q(inst, LevelSubset::bottom_only(), mode);
    run.subset_used.reset();
    return run;
}

// One Steiner tree per level, passing chosen edges down at zero cost.
inline HeuristicRun top_down(const MlstInstance& inst, SteinerMode mode) {
    HeuristicRun run = composite_on_q(inst, LevelSubset::all(inst.levels()), mode);
    run.subset_used.reset();
    return run;
}

// The paper-order enumeration of level subsets: index 0 is {1}, bit j of the
// index adds level j+2. ("{1}, {1,2}, {1,3}, {1,2,3}, {1,4}, ...")
inline LevelSubset subset_at_index(unsigned long long index, int ell) {
    std::vector<int> levels{1};
    for (int j = 0; j + 2 <= ell; ++j)
        if (index >> j & 1) levels.push_back(j + 2);
    return {std::move(levels)};
}

// Runs the composite heuristic for every subset and keeps the cheapest
// solution, breaking cost ties toward the lexicographically smallest subset.
inline HeuristicRun composite_full(const MlstInstance& inst, SteinerMode mode, int max_levels = 16) {
    int ell = inst.levels();
    if (ell > max_levels)
        throw guard_error("composite_full: level bound exceeded (" + std::to_string(ell) + " > " +
                          std::to_string(max_levels) + "); use guaranteed_composite");
    unsigned long long count = 1ull << (ell - 1);
    std::optional<HeuristicRun> best;
    int total_calls = 0;
    for (unsigned long long idx = 0; idx < count; ++idx) {
        LevelSubset q = subset_at_index(idx, ell);
        HeuristicRun run = composite_on_q(inst, q, mode);
        total_calls += run.stp_calls;
        if (!best || run.cost < best->cost ||
            (run.cost == best->cost && *run.subset_used < *best->subset_used))
            best = std::move(run);
    }
    best->stp_calls = total_calls;
    return *std::move(best);
}

// Independent minimum (or 2-approximate) Steiner cost per level, bottom to
// top; one subroutine call per level.
inline std::vector<Rat> level_min_costs(const MlstInstance& inst, SteinerMode mode) {
    std::vector<Rat> mins;
    mins.reserve(inst.levels());
    for (int i = 1; i <= inst.levels(); ++i)
        mins.push_back(steiner_tree(inst.graph, inst.terminals_at(i), WeightOverlay::none(), mode).cost);
    return mins;
}

}  // namespace mlst
