#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mitotrack/gaussian_merge.hpp"
#include "mitotrack/types.hpp"

namespace mitotrack {

/// Per-pixel 2-vector field (e.g. one augmentation layer of centroid or
/// motion offsets), row-major H x W.
struct OffsetField {
    int height = 0;
    int width = 0;
    std::vector<Vec2> values;  // size H*W

    const Vec2& at(int y, int x) const { return values[static_cast<size_t>(y) * width + x]; }
    Vec2& at(int y, int x) { return values[static_cast<size_t>(y) * width + x]; }
};

/// Aligned per-augmentation predictions for one frame. All augmentation
/// layers must already be inverse-transformed into the reference frame.
struct PredictionStack {
    int height = 0;
    int width = 0;
    std::vector<double> seg;                    // H*W, probabilities, averaged over augs
    std::vector<OffsetField> centroid_offsets;  // n_aug layers
    std::vector<OffsetField> motion_offsets;    // n_aug layers
    std::vector<std::int32_t> labels;           // H*W, 0 = background

    int n_aug() const { return static_cast<int>(centroid_offsets.size()); }
    double seg_at(int y, int x) const { return seg[static_cast<size_t>(y) * width + x]; }
    std::int32_t label_at(int y, int x) const { return labels[static_cast<size_t>(y) * width + x]; }
};

/// Per-pixel mean and unbiased sample covariance over augmentation layers.
struct PixelMoments {
    int height = 0;
    int width = 0;
    std::vector<Vec2> mean;  // H*W
    std::vector<Mat2> cov;   // H*W

    const Vec2& mean_at(int y, int x) const { return mean[static_cast<size_t>(y) * width + x]; }
    const Mat2& cov_at(int y, int x) const { return cov[static_cast<size_t>(y) * width + x]; }
};

inline PixelMoments pixel_moments(const std::vector<OffsetField>& layers) {
    if (layers.size() < 2)
        throw InsufficientAugmentations("pixel_moments: need at least 2 augmentation layers");
    const int h = layers[0].height;
    const int w = layers[0].width;
    const double n = static_cast<double>(layers.size());

    PixelMoments out;
    out.height = h;
    out.width = w;
    out.mean.assign(static_cast<size_t>(h) * w, Vec2::Zero());
    out.cov.assign(static_cast<size_t>(h) * w, Mat2::Zero());

    for (const auto& layer : layers)
        for (size_t p = 0; p < out.mean.size(); ++p) out.mean[p] += layer.values[p];
    for (auto& m : out.mean) m /= n;

    for (const auto& layer : layers)
        for (size_t p = 0; p < out.cov.size(); ++p) {
            const Vec2 d = layer.values[p] - out.mean[p];
            out.cov[p] += d * d.transpose();
        }
    for (auto& c : out.cov) c /= (n - 1.0);  // unbiased

    return out;
}

/// Builds the Gaussian detection densities for label j: every pixel of the
/// instance mask defines a weighted Gaussian (weight = segmentation score,
/// mean = pixel + offset, cov = per-pixel offset covariance) and the mixture
/// is reduced by moment matching. Clutter probability is the inverted
/// segmentation score at the pixel nearest to the merged centroid mean.
inline Detection detection_from_pixels(const PredictionStack& stack, int frame, int label,
                                       const PixelMoments& centroid_moments,
                                       const PixelMoments& motion_moments,
                                       double clamp_eps = 1e-12) {
    std::vector<WeightedGaussian> centroid_mix;
    std::vector<WeightedGaussian> motion_mix;
    int area = 0;

    for (int y = 0; y < stack.height; ++y)
        for (int x = 0; x < stack.width; ++x) {
            if (stack.label_at(y, x) != label) continue;
            ++area;
            const double w = stack.seg_at(y, x);
            const Vec2 p(static_cast<double>(x), static_cast<double>(y));
            centroid_mix.push_back({w, p + centroid_moments.mean_at(y, x), centroid_moments.cov_at(y, x)});
            motion_mix.push_back({w, p + motion_moments.mean_at(y, x), motion_moments.cov_at(y, x)});
        }
    if (area == 0) throw UnknownLabel("detection_from_pixels: label " + std::to_string(label));

    Detection det;
    det.frame = frame;
    det.det_id = label;
    det.centroid = merge_gaussian_mixture(centroid_mix);
    det.motion_warped = merge_gaussian_mixture(motion_mix);
    det.area = static_cast<double>(area);

    // Half-away-from-zero rounding to the nearest integer pixel.
    int cx = static_cast<int>(std::round(det.centroid.mean.x()));
    int cy = static_cast<int>(std::round(det.centroid.mean.y()));
    cx = std::max(0, std::min(stack.width - 1, cx));
    cy = std::max(0, std::min(stack.height - 1, cy));
    double clutter = 1.0 - stack.seg_at(cy, cx);
    clutter = std::max(0.0, std::min(1.0 - clamp_eps, clutter));
    det.clutter_prob = clutter;

    return det;
}

/// Mean equivalent-circle radius over all labeled instances: (1/N) sum sqrt(area/pi).
/// This is the test-time shift magnitude, constant for the whole sequence.
inline double average_cell_radius(const std::vector<std::vector<std::int32_t>>& masks) {
    double sum = 0.0;
    long count = 0;
    for (const auto& mask : masks) {
        std::vector<std::int64_t> areas;
        for (std::int32_t v : mask) {
            if (v <= 0) continue;
            if (static_cast<size_t>(v) >= areas.size() + 1) areas.resize(v, 0);
            ++areas[v - 1];
        }
        for (std::int64_t a : areas) {
            if (a == 0) continue;
            sum += std::sqrt(static_cast<double>(a) / M_PI);
            ++count;
        }
    }
    if (count == 0) throw EmptyGroundTruth("average_cell_radius: no labeled cells");
    return sum / static_cast<double>(count);
}

/// Descriptor for one test-time transform: a base transform id plus the shift
/// (in pixels) applied to frame k-1 only. Frame k stays unchanged.
struct ShiftTransform {
    int base_id = 0;
    Vec2 shift = Vec2::Zero();
};

/// {no-shift, +x, -x, +y, -y} x base transforms; count = 5 * base_count.
inline std::vector<ShiftTransform> shift_transform_set(int base_count, double radius) {
    const Vec2 dirs[5] = {Vec2(0, 0), Vec2(radius, 0), Vec2(-radius, 0), Vec2(0, radius),
                          Vec2(0, -radius)};
    std::vector<ShiftTransform> out;
    out.reserve(static_cast<size_t>(base_count) * 5);
    for (int b = 0; b < base_count; ++b)
        for (const Vec2& d : dirs) out.push_back({b, d});
    return out;
}

}  // namespace mitotrack
