#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mitotrack/lineage.hpp"
#include "mitotrack/rng.hpp"
#include "mitotrack/types.hpp"

namespace mitotrack {

/// Synthetic colony generator: random-walk motion, Erlang-distributed
/// lifetimes, binary fission, detection dropout, measurement noise and
/// clutter. Besides uniform clutter, divisions can spawn persistent
/// over-segmentation fragments: freshly divided cells are still touching,
/// so for a few frames a daughter-like artifact shadows one of the
/// daughters, indistinguishable from a further division by motion alone.
struct SimConfig {
    double width = 512.0;
    double height = 512.0;
    int n_frames = 100;
    int n_init = 1;
    double motion_sigma = 1.0;      // px/frame per axis
    int lifetime_alpha = 50;        // Erlang shape
    double lifetime_rate = 0.5;     // Erlang rate (per frame)
    double p_detect_sim = 1.0;
    double clutter_rate = 0.0;      // expected uniform clutter per frame
    double frag_prob = 0.0;         // chance a division spawns a fragment
    int frag_len_min = 4;           // fragment lifetime range in frames
    int frag_len_max = 8;
    double meas_sigma = 0.5;        // px
    double daughter_sep = 4.0;      // px between daughters at division
    std::uint64_t seed = 0;
};

// Fixed clutter probabilities written into the detections so the
// (1 - lambda^C) factor of the association costs is exercised.
inline constexpr double kSimClutterProbTrue = 0.05;
inline constexpr double kSimClutterProbFalse = 0.5;

struct SimResult {
    LineageTree ground_truth;
    std::vector<std::vector<Detection>> detections;  // per frame
};

inline SimResult simulate(const SimConfig& cfg) {
    struct Cell {
        int track_id;
        int parent_track_id;
        Vec2 pos;
        Vec2 prev_pos;
        double division_time;  // absolute frame at which the cell divides
        int birth_frame;
        std::vector<TrackPoint> points;
    };

    Rng rng(cfg.seed);
    SimResult out;
    out.detections.resize(cfg.n_frames);

    int next_track_id = 1;
    std::vector<Cell> alive;
    for (int i = 0; i < cfg.n_init; ++i) {
        Cell c;
        c.track_id = next_track_id++;
        c.parent_track_id = 0;
        c.pos = Vec2(rng.uniform(0.1 * cfg.width, 0.9 * cfg.width),
                     rng.uniform(0.1 * cfg.height, 0.9 * cfg.height));
        c.prev_pos = c.pos;
        c.division_time = rng.erlang(cfg.lifetime_alpha, cfg.lifetime_rate);
        c.birth_frame = 0;
        alive.push_back(std::move(c));
    }

    auto finish = [&](Cell& c) {
        if (c.points.empty()) return;
        Track t;
        t.track_id = c.track_id;
        t.parent_track_id = c.parent_track_id;
        t.begin_frame = c.points.front().frame;
        t.end_frame = c.points.back().frame;
        t.points = std::move(c.points);
        out.ground_truth.tracks.push_back(std::move(t));
    };

    const Mat2 meas_cov = cfg.meas_sigma * cfg.meas_sigma * Mat2::Identity();

    struct Frag {
        int cell_track_id;
        Vec2 off;
        int until;  // first frame the fragment is gone
    };
    std::vector<Frag> frags;

    for (int k = 0; k < cfg.n_frames; ++k) {
        // Move, record ground truth, then divide or leave the field.
        std::vector<Cell> next_alive;
        for (auto& c : alive) {
            if (k > c.birth_frame) {
                c.prev_pos = c.pos;
                c.pos.x() += cfg.motion_sigma * rng.gaussian();
                c.pos.y() += cfg.motion_sigma * rng.gaussian();
            }
            // On the birth frame prev_pos stays at the parent position so
            // motion warping maps the daughter back onto the dividing cell.
            const bool inside = c.pos.x() >= 0 && c.pos.x() < cfg.width && c.pos.y() >= 0 &&
                                c.pos.y() < cfg.height;
            if (!inside) {
                finish(c);
                continue;
            }
            c.points.push_back({k, c.track_id, c.pos});
            next_alive.push_back(std::move(c));
        }
        alive = std::move(next_alive);

        // Emit detections for this frame.
        int det_id = 1;
        for (const auto& c : alive) {
            if (rng.uniform() >= cfg.p_detect_sim) continue;
            const Vec2 noise(cfg.meas_sigma * rng.gaussian(), cfg.meas_sigma * rng.gaussian());
            Detection d;
            d.frame = k;
            d.det_id = det_id++;
            d.centroid = SpatialGaussian(c.pos + noise, meas_cov);
            d.motion_warped = SpatialGaussian(c.prev_pos + noise, meas_cov);
            d.clutter_prob = kSimClutterProbTrue;
            out.detections[k].push_back(std::move(d));
        }
        // Over-segmentation fragments shadow their cell: the artifact sits a
        // daughter-like offset away while its warped density points at the
        // cell's previous position, exactly like a real child's would.
        for (auto it = frags.begin(); it != frags.end();) {
            const Cell* host = nullptr;
            for (const auto& c : alive)
                if (c.track_id == it->cell_track_id) host = &c;
            if (host == nullptr || k >= it->until) {
                it = frags.erase(it);
                continue;
            }
            const Vec2 noise(cfg.meas_sigma * rng.gaussian(), cfg.meas_sigma * rng.gaussian());
            Detection d;
            d.frame = k;
            d.det_id = det_id++;
            d.centroid = SpatialGaussian(host->pos + it->off + noise, meas_cov);
            d.motion_warped = SpatialGaussian(host->prev_pos + noise, meas_cov);
            d.clutter_prob = kSimClutterProbFalse;
            out.detections[k].push_back(std::move(d));
            ++it;
        }
        const int n_clutter = rng.poisson(cfg.clutter_rate);
        for (int i = 0; i < n_clutter; ++i) {
            const Vec2 p(rng.uniform(0.0, cfg.width), rng.uniform(0.0, cfg.height));
            Detection d;
            d.frame = k;
            d.det_id = det_id++;
            d.centroid = SpatialGaussian(p, meas_cov);
            d.motion_warped = SpatialGaussian(p, meas_cov);
            d.clutter_prob = kSimClutterProbFalse;
            out.detections[k].push_back(std::move(d));
        }

        // Divisions take effect after the frame was observed; daughters
        // first appear in frame k+1.
        std::vector<Cell> after;
        for (auto& c : alive) {
            const double age = static_cast<double>(k - c.birth_frame);
            if (age < c.division_time || k + 1 >= cfg.n_frames) {
                after.push_back(std::move(c));
                continue;
            }
            const double angle = rng.uniform(0.0, 2.0 * M_PI);
            const Vec2 dir(std::cos(angle), std::sin(angle));
            finish(c);
            for (double sign : {1.0, -1.0}) {
                Cell d;
                d.track_id = next_track_id++;
                d.parent_track_id = c.track_id;
                d.pos = c.pos + sign * (cfg.daughter_sep / 2.0) * dir;
                d.prev_pos = c.pos;
                d.division_time = rng.erlang(cfg.lifetime_alpha, cfg.lifetime_rate);
                d.birth_frame = k + 1;
                after.push_back(std::move(d));
            }
            if (rng.uniform() < cfg.frag_prob) {
                const int host = next_track_id - 1 - rng.uniform_int(2);
                const double phi = rng.uniform(0.0, 2.0 * M_PI);
                const int len =
                    cfg.frag_len_min + rng.uniform_int(cfg.frag_len_max - cfg.frag_len_min + 1);
                frags.push_back({host,
                                 0.5 * cfg.daughter_sep * Vec2(std::cos(phi), std::sin(phi)),
                                 k + 1 + len});
            }
        }
        alive = std::move(after);
    }
    for (auto& c : alive) finish(c);

    std::sort(out.ground_truth.tracks.begin(), out.ground_truth.tracks.end(),
              [](const Track& a, const Track& b) { return a.track_id < b.track_id; });
    return out;
}

}  // namespace mitotrack
