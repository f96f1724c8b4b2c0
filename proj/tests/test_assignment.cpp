#include <catch_amalgamated.hpp>

#include <map>
#include <set>

#include "helpers.hpp"
#include "mitotrack/gibbs.hpp"
#include "mitotrack/hungarian.hpp"
#include "mitotrack/murty.hpp"

using namespace mitotrack;

TEST_CASE("hungarian square oracle") {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + rng.uniform_int(5);
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-5.0, 5.0);

        // Brute force over all permutations.
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        double best = kInf;
        do {
            double c = 0.0;
            for (int i = 0; i < n; ++i) c += m(i, perm[i]);
            best = std::min(best, c);
        } while (std::next_permutation(perm.begin(), perm.end()));

        const Assignment a = hungarian(m);
        REQUIRE(a.total_cost == Catch::Approx(best).margin(1e-9));
        std::vector<char> used(n, 0);
        for (int c : a.row_to_col) {
            REQUIRE(!used[c]);
            used[c] = 1;
        }
    }
}

TEST_CASE("hungarian rectangular with infinities") {
    Eigen::MatrixXd m(2, 4);
    m << 5.0, kInf, 1.0, kInf, kInf, kInf, 2.0, 0.5;
    const Assignment a = hungarian(m);
    // Row 1 must avoid column 2 if row 0 needs it; optimum is 1.0 + 0.5.
    REQUIRE(a.total_cost == Catch::Approx(1.5));
    REQUIRE(a.row_to_col[0] == 2);
    REQUIRE(a.row_to_col[1] == 3);
}

TEST_CASE("hungarian infeasibility") {
    Eigen::MatrixXd all_inf = Eigen::MatrixXd::Constant(2, 3, kInf);
    REQUIRE_THROWS_AS(hungarian(all_inf), Infeasible);
    Eigen::MatrixXd wide(3, 2);
    wide.setZero();
    REQUIRE_THROWS_AS(hungarian(wide), Infeasible);
    // Competition for a single finite column.
    Eigen::MatrixXd m(2, 2);
    m << 1.0, kInf, 1.0, kInf;
    REQUIRE_THROWS_AS(hungarian(m), Infeasible);
}

TEST_CASE("murty top-1 equals brute force on extended matrices") {
    Rng rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const int n_det = 1 + rng.uniform_int(4);
        const int n_obj = rng.uniform_int(4);
        const CostMatrix m = testutil::random_matrix(rng, n_det, n_obj);
        const auto brute = testutil::brute_force_events(m);
        const auto top = murty_kbest(m, 1);
        REQUIRE(top.size() == 1);
        REQUIRE(!brute.empty());
        REQUIRE(top[0].total_cost == Catch::Approx(brute[0].total_cost).margin(1e-9));
    }
}

TEST_CASE("murty k-best enumerates the complete event set") {
    Rng rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        const CostMatrix m = testutil::random_matrix(rng, 3, 2);
        const auto brute = testutil::brute_force_events(m);
        const auto sols = murty_kbest(m, static_cast<int>(brute.size()) + 5);
        REQUIRE(sols.size() == brute.size());
        for (std::size_t i = 0; i < sols.size(); ++i) {
            REQUIRE(sols[i].total_cost == Catch::Approx(brute[i].total_cost).margin(1e-9));
            if (i > 0) REQUIRE(sols[i].total_cost >= sols[i - 1].total_cost - 1e-12);
        }
        // Distinct event signatures throughout.
        std::set<std::uint64_t> sigs;
        for (const auto& s : sols) sigs.insert(event_signature(m, s));
        REQUIRE(sigs.size() == sols.size());
    }
}

TEST_CASE("murty resolves mitosis events") {
    // Two detections, one object, cheap mitosis: top solution pairs both
    // detections onto the object.
    std::vector<double> clutter = {0.05, 0.05};
    std::vector<ObjectCostInput> objects(1);
    objects[0].existence = 1.0;
    objects[0].scores = {0.3, 0.3};
    objects[0].mitosis = 0.0;
    objects[0].miss_cost = -std::log(1.0 - 0.9);
    TrackerConfig cfg;
    const CostMatrix m = build_extended_matrix(clutter, objects, cfg);
    const auto sols = murty_kbest(m, 3);
    REQUIRE(!sols.empty());
    REQUIRE(sols[0].per_object[0].kind == ObjectEvent::Kind::Mitosis);
    REQUIRE(sols[0].per_object[0].det1 == 0);
    REQUIRE(sols[0].per_object[0].det2 == 1);
}

TEST_CASE("murty empty detection set") {
    Rng rng(1);
    const CostMatrix m = testutil::random_matrix(rng, 0, 3);
    const auto sols = murty_kbest(m, 5);
    REQUIRE(sols.size() == 1);
    REQUIRE(sols[0].row_to_col.empty());
    for (const auto& ev : sols[0].per_object) REQUIRE(ev.kind == ObjectEvent::Kind::Missed);
}

TEST_CASE("gibbs visits states with Boltzmann frequencies") {
    Rng rng(41);
    const CostMatrix m = testutil::random_matrix(rng, 2, 1, 0.0);

    // Expected event frequencies: sum exp(-cost) over representatives.
    const auto all = testutil::all_assignments(m);
    std::map<std::uint64_t, double> expect;
    double z = 0.0;
    for (const auto& a : all) {
        expect[event_signature(m, a)] += std::exp(-a.total_cost);
        z += std::exp(-a.total_cost);
    }

    Rng grng(99);
    const auto res = gibbs_sample(m, 200000, grng, 100);
    double freq_total = 0.0;
    for (const auto& r : res) {
        const double e = expect.at(event_signature(m, r.assignment)) / z;
        REQUIRE(r.frequency == Catch::Approx(e).margin(0.02));
        freq_total += r.frequency;
    }
    REQUIRE(freq_total == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("gibbs includes the optimum and ranks by cost") {
    Rng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const CostMatrix m = testutil::random_matrix(rng, 3, 2);
        Rng grng(1000 + trial);
        const auto res = gibbs_sample(m, 2000, grng, 10);
        REQUIRE(!res.empty());
        const auto top = murty_kbest(m, 1);
        REQUIRE(res[0].assignment.total_cost ==
                Catch::Approx(top[0].total_cost).margin(1e-9));
        for (std::size_t i = 1; i < res.size(); ++i)
            REQUIRE(res[i].assignment.total_cost >=
                    res[i - 1].assignment.total_cost - 1e-12);
    }
}

TEST_CASE("event signatures collapse mitosis column swaps") {
    Rng rng(47);
    const CostMatrix m = testutil::random_matrix(rng, 2, 1, 0.0);
    Assignment a, b;
    a.row_to_col = {0, 3};  // det0 -> left, det1 -> right
    b.row_to_col = {3, 0};  // swapped representative
    resolve_events(m, a);
    resolve_events(m, b);
    REQUIRE(event_signature(m, a) == event_signature(m, b));
    REQUIRE(a.per_object[0].kind == ObjectEvent::Kind::Mitosis);
}
