#pragma once

#include <vector>

#include "mitotrack/types.hpp"

namespace mitotrack {

struct WeightedGaussian {
    double weight;
    Vec2 mean;
    Mat2 cov;
};

/// Moment-matching reduction of a Gaussian mixture to a single Gaussian.
/// Preserves the mixture's first two moments exactly:
///   mu  = sum w_p mu_p / W
///   cov = sum w_p (cov_p + (mu_p - mu)(mu_p - mu)^T) / W
inline SpatialGaussian merge_gaussian_mixture(const std::vector<WeightedGaussian>& components) {
    if (components.empty()) throw EmptyMixture("merge_gaussian_mixture: empty component list");

    double total = 0.0;
    Vec2 mean = Vec2::Zero();
    for (const auto& c : components) {
        total += c.weight;
        mean += c.weight * c.mean;
    }
    if (!(total > 0.0)) throw DegenerateWeights("merge_gaussian_mixture: total weight is zero");
    mean /= total;

    Mat2 cov = Mat2::Zero();
    for (const auto& c : components) {
        const Vec2 d = c.mean - mean;
        cov += c.weight * (c.cov + d * d.transpose());
    }
    cov /= total;

    return SpatialGaussian(mean, cov);
}

}  // namespace mitotrack
