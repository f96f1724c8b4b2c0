#include <catch_amalgamated.hpp>

#include "mitotrack/density.hpp"

using namespace mitotrack;

namespace {

OffsetField constant_field(int h, int w, const Vec2& v) {
    OffsetField f;
    f.height = h;
    f.width = w;
    f.values.assign(static_cast<std::size_t>(h) * w, v);
    return f;
}

}  // namespace

TEST_CASE("pixel_moments mean and unbiased covariance") {
    // Two layers differing by +/- d: mean = base, cov = d d^T (unbiased, n-1).
    const Vec2 base(1.0, -2.0), d(0.5, 0.25);
    std::vector<OffsetField> layers = {constant_field(2, 3, base + d),
                                       constant_field(2, 3, base - d)};
    const PixelMoments m = pixel_moments(layers);
    REQUIRE((m.mean_at(1, 2) - base).norm() < 1e-14);
    const Mat2 expect = 2.0 * d * d.transpose();
    REQUIRE((m.cov_at(0, 0) - expect).norm() < 1e-14);

    REQUIRE_THROWS_AS(pixel_moments({constant_field(2, 3, base)}), InsufficientAugmentations);
}

TEST_CASE("detection_from_pixels two-pixel mask") {
    PredictionStack s;
    s.height = 1;
    s.width = 3;
    s.seg = {0.8, 0.1, 0.8};
    s.labels = {7, 0, 7};
    s.centroid_offsets = {constant_field(1, 3, Vec2::Zero()), constant_field(1, 3, Vec2::Zero())};
    s.motion_offsets = s.centroid_offsets;
    const PixelMoments cm = pixel_moments(s.centroid_offsets);
    const PixelMoments mm = pixel_moments(s.motion_offsets);

    const Detection det = detection_from_pixels(s, 4, 7, cm, mm);
    REQUIRE(det.frame == 4);
    REQUIRE(det.det_id == 7);
    REQUIRE(det.area == 2.0);
    REQUIRE(det.centroid.mean.x() == Catch::Approx(1.0));
    REQUIRE(det.centroid.mean.y() == Catch::Approx(0.0));
    REQUIRE(det.centroid.cov(0, 0) == Catch::Approx(1.0));
    REQUIRE(det.centroid.cov(1, 1) == Catch::Approx(0.0).margin(1e-14));
    // Clutter = inverted seg score at the pixel nearest the centroid (x=1).
    REQUIRE(det.clutter_prob == Catch::Approx(0.9));

    REQUIRE_THROWS_AS(detection_from_pixels(s, 4, 9, cm, mm), UnknownLabel);
}

TEST_CASE("detection_from_pixels per-pixel covariance enters the merge") {
    PredictionStack s;
    s.height = 1;
    s.width = 1;
    s.seg = {1.0};
    s.labels = {1};
    s.centroid_offsets = {constant_field(1, 1, Vec2(1.0, 0.0)),
                          constant_field(1, 1, Vec2(-1.0, 0.0))};
    s.motion_offsets = {constant_field(1, 1, Vec2::Zero()), constant_field(1, 1, Vec2::Zero())};
    const Detection det = detection_from_pixels(s, 0, 1, pixel_moments(s.centroid_offsets),
                                                pixel_moments(s.motion_offsets));
    REQUIRE(det.centroid.mean.x() == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(det.centroid.cov(0, 0) == Catch::Approx(2.0));  // unbiased over 2 augs
    REQUIRE(det.motion_warped.cov(0, 0) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("average_cell_radius") {
    // One 4-pixel instance: r = sqrt(4/pi); plus a 1-pixel instance: r = sqrt(1/pi).
    std::vector<std::vector<std::int32_t>> masks = {{1, 1, 1, 1, 0, 2}};
    const double expect = 0.5 * (std::sqrt(4.0 / M_PI) + std::sqrt(1.0 / M_PI));
    REQUIRE(average_cell_radius(masks) == Catch::Approx(expect).epsilon(1e-12));
    REQUIRE_THROWS_AS(average_cell_radius({{0, 0}}), EmptyGroundTruth);
}

TEST_CASE("shift_transform_set is 5x base transforms") {
    const auto set = shift_transform_set(3, 2.5);
    REQUIRE(set.size() == 15);
    int zero = 0;
    for (const auto& t : set) {
        if (t.shift.norm() == 0.0)
            ++zero;
        else
            REQUIRE(t.shift.norm() == Catch::Approx(2.5));
    }
    REQUIRE(zero == 3);  // one unshifted variant per base transform
}
