#pragma once

#include <vector>

#include "mitotrack/assignment.hpp"

namespace mitotrack {

/// Minimum-cost rectangular assignment (rows <= cols, infinities allowed)
/// via shortest augmenting paths with dual potentials. Every row receives
/// exactly one column, every column at most one row.
/// Throws Infeasible when no finite-cost row-complete assignment exists.
inline Assignment hungarian(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    if (n > m) throw Infeasible("hungarian: more rows than columns");

    // 1-based sentinels: p[j] = row matched to column j (0 = free).
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    std::vector<char> used(m + 1);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), char(0));
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = kInf;
            int j1 = -1;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double c = cost(i0 - 1, j - 1);
                if (c < kInf) {
                    const double cur = c - u[i0] - v[j];
                    if (cur < minv[j]) {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if (j1 < 0) throw Infeasible("hungarian: no feasible assignment");
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment a;
    a.row_to_col.assign(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j] != 0) a.row_to_col[p[j] - 1] = j - 1;
    a.total_cost = 0.0;
    for (int i = 0; i < n; ++i) a.total_cost += cost(i, a.row_to_col[i]);
    return a;
}

inline Assignment hungarian(const CostMatrix& m) {
    Assignment a = hungarian(m.values);
    resolve_events(m, a);
    return a;
}

}  // namespace mitotrack
