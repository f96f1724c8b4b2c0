#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mitotrack/common.hpp"

namespace mitotrack {

/// 2D Gaussian density: mean in pixels, covariance in pixels^2.
/// The covariance is symmetrized on construction and must be PSD.
struct SpatialGaussian {
    Vec2 mean = Vec2::Zero();
    Mat2 cov = Mat2::Zero();

    SpatialGaussian() = default;
    SpatialGaussian(const Vec2& m, const Mat2& c) : mean(m) {
        cov = 0.5 * (c + c.transpose());
    }

    bool psd(double slack = 1e-9) const {
        Eigen::SelfAdjointEigenSolver<Mat2> es(cov);
        return es.eigenvalues().minCoeff() >= -slack;
    }
};

/// One measurement j in Z_k: centroid density in frame k, the motion-warped
/// density in frame k-1 coordinates, a clutter probability, and an optional
/// instance area (0 = unknown).
struct Detection {
    int frame = 0;
    int det_id = 0;
    SpatialGaussian centroid;
    SpatialGaussian motion_warped;
    double clutter_prob = 0.0;  // in [0, 1)
    double area = 0.0;          // pixels^2, 0 = unknown
};

/// One (frame, detection) entry of a component's life. det_id is kMissed
/// when the object went undetected; pos then holds the predicted mean.
struct HistoryEntry {
    int frame = 0;
    int det_id = kMissed;
    Vec2 pos = Vec2::Zero();
};

/// One potential object inside a hypothesis.
struct BernoulliComponent {
    int object_id = 0;
    double existence = 1.0;  // r, in (0, 1]
    SpatialGaussian position;
    Vec2 velocity = Vec2::Zero();  // used only in Kalman ablation mode
    int birth_frame = 0;
    bool age_known = false;  // true iff created by an observed mitosis
    std::optional<int> parent_id;
    std::vector<HistoryEntry> assignment_history;

    std::optional<int> age(int current_frame) const {
        if (!age_known) return std::nullopt;
        return current_frame - birth_frame;
    }
};

/// One global hypothesis: weight is the accumulated cost in nats
/// (negative log-likelihood, lower = more likely).
struct Hypothesis {
    double weight = 0.0;
    std::vector<BernoulliComponent> components;  // alive
    std::vector<BernoulliComponent> archive;     // terminated (kept for lineage export)
};

enum class Sampler { Murty, Gibbs };

/// Tracker hyperparameters. AUTO fields (erlang_*, mean_motion_cov) are
/// resolved from the input sequence before tracking starts.
struct TrackerConfig {
    double p_detect = 0.9;
    double p_birth = 0.1;
    int a_max = 7;
    int h_max = 150;
    std::optional<int> erlang_alpha;        // AUTO: K
    std::optional<double> erlang_rate;      // AUTO: 1/K
    std::optional<Mat2> mean_motion_cov;    // AUTO: estimated from detections
    double gate_mahalanobis_sq = 25.0;
    double clamp_eps = 1e-12;
    double prune_weight_delta = 20.0;
    double existence_floor = 1e-3;
    int min_track_len = 2;
    Sampler sampler = Sampler::Murty;
    int gibbs_samples = 1000;
    std::uint64_t rng_seed = 0;
    bool mitosis_costs_enabled = true;  // ablation: c^M = 0 when false
    bool kalman_motion = false;         // ablation: constant-velocity Kalman mode
};

}  // namespace mitotrack
