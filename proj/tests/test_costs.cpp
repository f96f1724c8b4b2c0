#include <catch_amalgamated.hpp>

#include "mitotrack/costs.hpp"

using namespace mitotrack;

TEST_CASE("association_cost worked example") {
    // lambda=0, P^D=0.9, P^B=0.1, one object with r=1, n=1/(2*pi):
    //   mass = 0.9/(2*pi) / (0.1 + 0.9/(2*pi))
    //   c_match = -log(mass) ~ 0.529529, c_unassigned = -log(1 - mass) ~ 0.888876
    const double n = 1.0 / (2.0 * M_PI);
    const AssociationCosts c = association_cost(0.0, {{1.0, n}}, 0.9, 0.1);
    const double mass = 0.9 * n / (0.1 + 0.9 * n);
    REQUIRE(c.per_object[0] == Catch::Approx(-std::log(mass)).epsilon(1e-12));
    REQUIRE(c.unassigned == Catch::Approx(-std::log(1.0 - mass)).epsilon(1e-12));
    REQUIRE(c.per_object[0] == Catch::Approx(0.5295286471886179).margin(1e-9));
    REQUIRE(c.unassigned == Catch::Approx(0.8888761581154917).margin(1e-9));
}

TEST_CASE("association_cost clutter factor") {
    const double n = 0.2;
    const AssociationCosts a = association_cost(0.0, {{1.0, n}}, 0.9, 0.1);
    const AssociationCosts b = association_cost(0.5, {{1.0, n}}, 0.9, 0.1);
    // Halving (1 - lambda) adds log 2 to the matched cost.
    REQUIRE(b.per_object[0] - a.per_object[0] == Catch::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("association_cost gating and clamping") {
    const AssociationCosts c = association_cost(0.0, {{1.0, 0.0}, {0.8, 0.25}}, 0.9, 0.1);
    REQUIRE(c.per_object[0] == kInf);  // gated pair
    REQUIRE(std::isfinite(c.per_object[1]));
    // Gated pair does not contribute to the normalizing sum.
    const AssociationCosts solo = association_cost(0.0, {{0.8, 0.25}}, 0.9, 0.1);
    REQUIRE(c.per_object[1] == Catch::Approx(solo.per_object[0]).epsilon(1e-14));

    // Fully explained detection: unassigned cost is clamped, not infinite.
    const AssociationCosts full = association_cost(0.0, {{1.0, 1e9}}, 0.9, 0.1);
    REQUIRE(std::isfinite(full.unassigned));
    REQUIRE(full.unassigned <= -std::log(1e-12) + 1e-9);

    // All costs bounded by -log(clamp_eps).
    const AssociationCosts tiny = association_cost(0.0, {{1e-8, 1e-15}}, 0.9, 0.1);
    REQUIRE(tiny.per_object[0] <= -std::log(1e-12) + 1e-9);
}

TEST_CASE("association_cost probability mass interpretation") {
    // exp(-c) over all outcomes of one detection sums to (1 - lambda).
    const double lambda = 0.3;
    const AssociationCosts c =
        association_cost(lambda, {{0.9, 0.1}, {0.5, 0.05}}, 0.9, 0.1);
    const double total =
        std::exp(-c.per_object[0]) + std::exp(-c.per_object[1]) + std::exp(-c.unassigned);
    REQUIRE(total == Catch::Approx(1.0 - lambda).epsilon(1e-9));
}

TEST_CASE("spatial_score gating and peak") {
    const SpatialGaussian obj(Vec2(10, 10), Mat2::Identity());
    const SpatialGaussian det_same(Vec2(10, 10), Mat2::Identity());
    // Peak density of N(0, 2 I) at the mean.
    REQUIRE(spatial_score(obj, det_same) == Catch::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-12));
    const SpatialGaussian det_far(Vec2(30, 10), Mat2::Identity());
    REQUIRE(spatial_score(obj, det_far) == 0.0);  // Mahalanobis^2 = 200 > 25
    // Monotone decay with distance inside the gate.
    double prev = kInf;
    for (double d = 0.0; d < 7.0; d += 0.5) {
        const double s = spatial_score(obj, SpatialGaussian(Vec2(10 + d, 10), Mat2::Identity()));
        REQUIRE(s < prev);
        prev = s;
    }
}

TEST_CASE("regularize_cov") {
    const Mat2 good = (Mat2() << 2.0, 0.3, 0.3, 1.0).finished();
    REQUIRE((regularize_cov(good) - good).norm() == 0.0);
    const Mat2 singular = Mat2::Zero();
    const Mat2 fixed = regularize_cov(singular);
    REQUIRE(fixed(0, 0) > 0.0);
    const Mat2 indefinite = (Mat2() << 1.0, 0.0, 0.0, -1.0).finished();
    REQUIRE_THROWS_AS(regularize_cov(indefinite), DegenerateCovariance);
}

TEST_CASE("extended matrix layout") {
    std::vector<double> clutter = {0.1, 0.2};
    std::vector<ObjectCostInput> objects(1);
    objects[0].existence = 0.9;
    objects[0].scores = {0.2, 0.15};
    objects[0].mitosis = 1.5;
    objects[0].miss_cost = 0.8;
    TrackerConfig cfg;
    const CostMatrix m = build_extended_matrix(clutter, objects, cfg);

    REQUIRE(m.n_det == 2);
    REQUIRE(m.n_obj == 1);
    REQUIRE(m.cols() == 4);  // obj | diag(2) | obj+mitosis
    // Right block = left block + mitosis + refunded miss cost.
    for (int j = 0; j < 2; ++j)
        REQUIRE(m.values(j, 3) - m.values(j, 0) ==
                Catch::Approx(objects[0].mitosis + objects[0].miss_cost).epsilon(1e-12));
    // Each row reaches only its own diagonal birth column.
    REQUIRE(m.values(0, 1) < kInf);
    REQUIRE(m.values(0, 2) == kInf);
    REQUIRE(m.values(1, 2) < kInf);
    REQUIRE(m.values(1, 1) == kInf);
    // Column classification helpers.
    REQUIRE(m.is_left(0));
    REQUIRE(m.is_diag(1));
    REQUIRE(m.is_diag(2));
    REQUIRE(m.is_right(3));
    REQUIRE(m.object_of(3) == 0);
}
