#pragma once

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "mitotrack/hungarian.hpp"
#include "mitotrack/rng.hpp"

namespace mitotrack {

struct GibbsResult {
    Assignment assignment;
    double frequency = 0.0;  // fraction of sweeps where this state was visited
};

/// Gibbs sampler over feasible assignments, initialized at the Hungarian
/// optimum. Each sweep resamples every detection row's column from the
/// conditional distribution proportional to exp(-cost), holding the other
/// rows fixed. Returns the distinct visited assignments ranked by cost,
/// truncated to max_results.
inline std::vector<GibbsResult> gibbs_sample(const CostMatrix& matrix, int n_sweeps, Rng& rng,
                                             int max_results) {
    std::vector<GibbsResult> out;
    if (matrix.n_det == 0) {
        GibbsResult empty;
        resolve_events(matrix, empty.assignment);
        empty.frequency = 1.0;
        out.push_back(empty);
        return out;
    }

    Assignment state = hungarian(matrix);
    const int n = matrix.n_det;
    const int m = matrix.cols();
    std::vector<int> col_owner(m, -1);
    for (int r = 0; r < n; ++r) col_owner[state.row_to_col[r]] = r;

    struct Visit {
        Assignment assignment;
        long count = 0;
    };
    std::unordered_map<std::uint64_t, Visit> visited;
    auto record = [&](const Assignment& a) {
        Assignment resolved = a;
        resolve_events(matrix, resolved);
        auto [it, inserted] = visited.try_emplace(event_signature(matrix, resolved));
        if (inserted) it->second.assignment = resolved;
        ++it->second.count;
    };
    record(state);

    std::vector<double> weights(m);
    for (int sweep = 0; sweep < n_sweeps; ++sweep) {
        for (int r = 0; r < n; ++r) {
            const int current = state.row_to_col[r];
            col_owner[current] = -1;
            double total = 0.0;
            for (int c = 0; c < m; ++c) {
                const double cost = matrix.values(r, c);
                weights[c] = (col_owner[c] < 0 && cost < kInf) ? std::exp(-cost) : 0.0;
                total += weights[c];
            }
            int chosen = current;
            if (total > 0.0) {
                double x = rng.uniform() * total;
                for (int c = 0; c < m; ++c) {
                    x -= weights[c];
                    if (x <= 0.0) {
                        chosen = c;
                        break;
                    }
                }
            }
            state.row_to_col[r] = chosen;
            col_owner[chosen] = r;
        }
        state.total_cost = 0.0;
        for (int r = 0; r < n; ++r) state.total_cost += matrix.values(r, state.row_to_col[r]);
        record(state);
    }

    out.reserve(visited.size());
    const double denom = static_cast<double>(n_sweeps + 1);
    for (auto& [sig, visit] : visited)
        out.push_back({std::move(visit.assignment), static_cast<double>(visit.count) / denom});
    std::sort(out.begin(), out.end(), [](const GibbsResult& a, const GibbsResult& b) {
        if (a.assignment.total_cost != b.assignment.total_cost)
            return a.assignment.total_cost < b.assignment.total_cost;
        return a.assignment.row_to_col < b.assignment.row_to_col;
    });
    if (static_cast<int>(out.size()) > max_results) out.resize(max_results);
    return out;
}

}  // namespace mitotrack
