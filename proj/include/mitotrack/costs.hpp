#pragma once

#include <cmath>
#include <vector>

#include "mitotrack/erlang.hpp"
#include "mitotrack/types.hpp"

namespace mitotrack {

/// Adds diagonal jitter when the covariance is near-singular (e.g. zero
/// covariance from single-pixel masks).
inline Mat2 regularize_cov(const Mat2& cov, double jitter = 1e-6, double cond_limit = 1e12) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(cov);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo < 0.0 && lo < -1e-9)
        throw DegenerateCovariance("regularize_cov: covariance is not PSD");
    if (lo <= 0.0 || hi / lo > cond_limit) return cov + jitter * Mat2::Identity();
    return cov;
}

/// Spatial similarity between an object position and a detection's
/// motion-warped density: the bivariate normal density of the object mean
/// under N(det_mean, cov_obj + cov_det). Returns 0 when the pair is gated
/// out (squared Mahalanobis distance above the threshold).
inline double spatial_score(const SpatialGaussian& object_pos,
                            const SpatialGaussian& det_motion_warped,
                            double gate_mahalanobis_sq = 25.0) {
    const Mat2 s = regularize_cov(object_pos.cov + det_motion_warped.cov);
    const double det = s.determinant();
    if (!(det > 0.0)) throw DegenerateCovariance("spatial_score: singular covariance sum");
    const Vec2 d = object_pos.mean - det_motion_warped.mean;
    const double maha_sq = d.dot(s.inverse() * d);
    if (maha_sq > gate_mahalanobis_sq) return 0.0;
    return std::exp(-0.5 * maha_sq) / (2.0 * M_PI * std::sqrt(det));
}

struct AssociationCosts {
    std::vector<double> per_object;  // c^{j,i}; infinity for gated pairs
    double unassigned;               // c^{j,u}
};

/// Association costs of one detection against the objects of a hypothesis:
///   c^{j,i} = -log( (1-lambda) P^D r^i n^{ij} / (P^B + sum_i' P^D r^i' n^{i'j}) )
///   c^{j,u} = -log( (1-lambda) - sum_i exp(-c^{j,i}) )
/// Gated pairs (score 0) get infinite cost and do not enter the
/// normalizing sum. The argument of the second log is clamped below at
/// clamp_eps so costs stay bounded.
inline AssociationCosts association_cost(double clutter_prob,
                                         const std::vector<std::pair<double, double>>& objects,
                                         double p_detect, double p_birth,
                                         double clamp_eps = 1e-12) {
    const double not_clutter = 1.0 - clutter_prob;
    double denom = p_birth;
    for (const auto& [r, n] : objects) denom += p_detect * r * n;

    AssociationCosts out;
    out.per_object.reserve(objects.size());
    double assigned_mass = 0.0;
    for (const auto& [r, n] : objects) {
        if (n <= 0.0) {
            out.per_object.push_back(kInf);
            continue;
        }
        double mass = not_clutter * p_detect * r * n / denom;
        if (mass < clamp_eps) mass = clamp_eps;  // keeps finite costs bounded
        assigned_mass += mass;
        out.per_object.push_back(-std::log(mass));
    }
    double rest = not_clutter - assigned_mass;
    if (rest < clamp_eps) rest = clamp_eps;
    out.unassigned = -std::log(rest);
    return out;
}

/// Cost against a mitosis at the object's current age: -log of the Erlang
/// lifetime CDF, clamped at -log(clamp_eps). Unknown age costs nothing.
inline double mitosis_cost(std::optional<int> age, int alpha, double rate,
                           double clamp_eps = 1e-12) {
    if (!age.has_value()) return 0.0;
    double cdf = erlang_cdf(static_cast<double>(*age), alpha, rate);
    if (cdf < clamp_eps) cdf = clamp_eps;
    return -std::log(cdf);
}

/// Mitosis-extended cost matrix: n_det rows and (n_obj | n_det | n_obj)
/// column blocks. Left block holds association costs, the middle block is
/// the unassigned diagonal, and the right block equals the left block plus
/// the per-object mitosis cost. A row picking both columns of an object
/// encodes a cell split.
struct CostMatrix {
    int n_det = 0;
    int n_obj = 0;
    Eigen::MatrixXd values;            // n_det x (2*n_obj + n_det)
    std::vector<double> mitosis_cost;  // per object

    int cols() const { return 2 * n_obj + n_det; }

    // Column layout helpers.
    bool is_left(int c) const { return c < n_obj; }
    bool is_diag(int c) const { return c >= n_obj && c < n_obj + n_det; }
    bool is_right(int c) const { return c >= n_obj + n_det; }
    int object_of(int c) const { return is_left(c) ? c : c - n_obj - n_det; }
};

/// Assembles the extended matrix for one hypothesis. `objects` carries
/// (existence, spatial scores against each detection, mitosis cost, missed
/// cost). The missed cost -log(1 - r P^D) is subtracted from the left
/// object columns so that solution ranking equals hypothesis-weight ranking:
/// every object pays its missed cost by default, and matching it refunds
/// the penalty. A mitosis pair (left + right column) refunds it once.
struct ObjectCostInput {
    double existence = 1.0;
    std::vector<double> scores;  // one per detection
    double mitosis = 0.0;
    double miss_cost = 0.0;
};

inline CostMatrix build_extended_matrix(const std::vector<double>& det_clutter_probs,
                                        const std::vector<ObjectCostInput>& objects,
                                        const TrackerConfig& cfg) {
    CostMatrix m;
    m.n_det = static_cast<int>(det_clutter_probs.size());
    m.n_obj = static_cast<int>(objects.size());
    m.values.setConstant(m.n_det, m.cols(), kInf);
    m.mitosis_cost.reserve(objects.size());
    for (const auto& o : objects) m.mitosis_cost.push_back(o.mitosis);

    for (int j = 0; j < m.n_det; ++j) {
        std::vector<std::pair<double, double>> rn;
        rn.reserve(objects.size());
        for (const auto& o : objects) rn.emplace_back(o.existence, o.scores[j]);
        const AssociationCosts costs =
            association_cost(det_clutter_probs[j], rn, cfg.p_detect, cfg.p_birth, cfg.clamp_eps);
        for (int i = 0; i < m.n_obj; ++i) {
            m.values(j, i) = costs.per_object[i] - objects[i].miss_cost;
            m.values(j, m.n_obj + m.n_det + i) = costs.per_object[i] + m.mitosis_cost[i];
        }
        m.values(j, m.n_obj + j) = costs.unassigned;
    }
    return m;
}

}  // namespace mitotrack
