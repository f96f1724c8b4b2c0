#pragma once

#include <queue>
#include <unordered_set>
#include <vector>

#include "mitotrack/hungarian.hpp"

namespace mitotrack {

namespace detail {

struct MurtyNode {
    Eigen::MatrixXd cost;      // parent matrix with forces/forbids baked in
    Assignment solution;       // optimal solution of `cost`
    int fixed_rows = 0;        // rows 0..fixed_rows-1 are forced
    std::uint64_t order = 0;   // insertion counter, deterministic tie-break
};

struct MurtyNodeCmp {
    bool operator()(const MurtyNode& a, const MurtyNode& b) const {
        if (a.solution.total_cost != b.solution.total_cost)
            return a.solution.total_cost > b.solution.total_cost;
        return a.order > b.order;
    }
};

}  // namespace detail

/// Murty's ranked-assignment enumeration: the k lowest-cost assignments of
/// the extended matrix in non-decreasing cost order. Solutions that encode
/// the same physical events (mitosis column-swap symmetry) are deduplicated
/// by canonical signature; enumeration continues until k distinct event
/// sets are found or the problem is exhausted.
inline std::vector<Assignment> murty_kbest(const CostMatrix& matrix, int k) {
    std::vector<Assignment> out;
    if (k <= 0 || matrix.n_det == 0) {
        if (matrix.n_det == 0 && k > 0) {
            Assignment empty;
            resolve_events(matrix, empty);
            out.push_back(empty);
        }
        return out;
    }

    std::priority_queue<detail::MurtyNode, std::vector<detail::MurtyNode>, detail::MurtyNodeCmp>
        queue;
    std::uint64_t order = 0;

    detail::MurtyNode root;
    root.cost = matrix.values;
    try {
        root.solution = hungarian(root.cost);
    } catch (const Infeasible&) {
        return out;
    }
    resolve_events(matrix, root.solution);
    root.order = order++;
    queue.push(std::move(root));

    std::unordered_set<std::uint64_t> seen;
    const int n = matrix.n_det;

    while (!queue.empty() && static_cast<int>(out.size()) < k) {
        detail::MurtyNode node = queue.top();
        queue.pop();

        if (seen.insert(event_signature(matrix, node.solution)).second)
            out.push_back(node.solution);

        // Partition: children forbid the solution edge of one free row and
        // force the edges of all earlier rows.
        Eigen::MatrixXd work = node.cost;
        for (int r = node.fixed_rows; r < n; ++r) {
            const int c = node.solution.row_to_col[r];
            detail::MurtyNode child;
            child.cost = work;
            child.cost(r, c) = kInf;
            child.fixed_rows = r;
            bool feasible = true;
            try {
                child.solution = hungarian(child.cost);
            } catch (const Infeasible&) {
                feasible = false;
            }
            if (feasible) {
                resolve_events(matrix, child.solution);
                child.order = order++;
                queue.push(std::move(child));
            }
            // Force (r, c) for the remaining children.
            for (int j = 0; j < work.cols(); ++j)
                if (j != c) work(r, j) = kInf;
            for (int i = 0; i < n; ++i)
                if (i != r) work(i, c) = kInf;
        }
    }
    return out;
}

}  // namespace mitotrack
