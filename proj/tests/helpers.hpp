#pragma once

#include <map>
#include <vector>

#include "mitotrack/assignment.hpp"
#include "mitotrack/costs.hpp"
#include "mitotrack/rng.hpp"

namespace testutil {

using namespace mitotrack;

/// Exhaustive enumeration of all finite-cost complete assignments
/// (every detection row gets a distinct column).
inline void enumerate_assignments(const CostMatrix& m, int row, std::vector<int>& cols,
                                  std::vector<char>& used, std::vector<Assignment>& out) {
    if (row == m.n_det) {
        Assignment a;
        a.row_to_col = cols;
        a.total_cost = 0.0;
        for (int r = 0; r < m.n_det; ++r) a.total_cost += m.values(r, cols[r]);
        resolve_events(m, a);
        out.push_back(std::move(a));
        return;
    }
    for (int c = 0; c < m.cols(); ++c) {
        if (used[c] || !(m.values(row, c) < kInf)) continue;
        used[c] = 1;
        cols[row] = c;
        enumerate_assignments(m, row + 1, cols, used, out);
        used[c] = 0;
    }
}

inline std::vector<Assignment> all_assignments(const CostMatrix& m) {
    std::vector<Assignment> out;
    std::vector<int> cols(m.n_det, -1);
    std::vector<char> used(m.cols(), 0);
    enumerate_assignments(m, 0, cols, used, out);
    return out;
}

/// One assignment per distinct physical event set, keeping the minimum
/// cost representative; sorted by (cost, row_to_col).
inline std::vector<Assignment> brute_force_events(const CostMatrix& m) {
    std::map<std::uint64_t, Assignment> best;
    for (auto& a : all_assignments(m)) {
        const auto sig = event_signature(m, a);
        auto it = best.find(sig);
        if (it == best.end() || a.total_cost < it->second.total_cost) best[sig] = a;
    }
    std::vector<Assignment> out;
    for (auto& [sig, a] : best) out.push_back(a);
    std::sort(out.begin(), out.end(), [](const Assignment& a, const Assignment& b) {
        if (a.total_cost != b.total_cost) return a.total_cost < b.total_cost;
        return a.row_to_col < b.row_to_col;
    });
    return out;
}

/// Random extended matrix with realistic structure: some gated pairs,
/// random existence, random mitosis costs.
inline CostMatrix random_matrix(Rng& rng, int n_det, int n_obj, double gate_prob = 0.3) {
    std::vector<double> clutter(n_det);
    for (auto& c : clutter) c = rng.uniform(0.0, 0.6);
    std::vector<ObjectCostInput> objects(n_obj);
    for (auto& o : objects) {
        o.existence = rng.uniform(0.2, 1.0);
        o.scores.resize(n_det);
        for (auto& s : o.scores)
            s = rng.uniform() < gate_prob ? 0.0 : rng.uniform(1e-3, 0.3);
        o.mitosis = rng.uniform(0.0, 3.0);
        o.miss_cost = rng.uniform(0.0, 2.5);
    }
    TrackerConfig cfg;
    return build_extended_matrix(clutter, objects, cfg);
}

}  // namespace testutil
