#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mitotrack/lineage.hpp"

namespace mitotrack {

/// Per-frame correspondence between computed and reference tracks, matched
/// by centroid distance below match_radius, injective in both directions
/// (greedy nearest-pair).
class TrackMatch {
public:
    TrackMatch(const LineageTree& pred, const LineageTree& gt, double match_radius) {
        struct Entry {
            int track_id;
            Vec2 pos;
        };
        std::map<int, std::vector<Entry>> pred_by_frame, gt_by_frame;
        for (const auto& t : pred.tracks)
            for (const auto& p : t.points) pred_by_frame[p.frame].push_back({t.track_id, p.pos});
        for (const auto& t : gt.tracks)
            for (const auto& p : t.points) gt_by_frame[p.frame].push_back({t.track_id, p.pos});

        for (const auto& [frame, gts] : gt_by_frame) {
            auto it = pred_by_frame.find(frame);
            if (it == pred_by_frame.end()) continue;
            const auto& preds = it->second;

            struct Pair {
                double dist;
                int gi, pi;
            };
            std::vector<Pair> pairs;
            for (int gi = 0; gi < static_cast<int>(gts.size()); ++gi)
                for (int pi = 0; pi < static_cast<int>(preds.size()); ++pi) {
                    const double d = (gts[gi].pos - preds[pi].pos).norm();
                    if (d < match_radius) pairs.push_back({d, gi, pi});
                }
            std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
                if (a.dist != b.dist) return a.dist < b.dist;
                if (a.gi != b.gi) return a.gi < b.gi;
                return a.pi < b.pi;
            });
            std::set<int> used_g, used_p;
            for (const auto& pr : pairs) {
                if (used_g.count(pr.gi) || used_p.count(pr.pi)) continue;
                used_g.insert(pr.gi);
                used_p.insert(pr.pi);
                match_[{frame, gts[pr.gi].track_id}] = preds[pr.pi].track_id;
            }
        }
    }

    /// Pred track matched to gt track `gt_id` at `frame`, or nullopt.
    std::optional<int> pred_track_at(int frame, int gt_id) const {
        auto it = match_.find({frame, gt_id});
        if (it == match_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::map<std::pair<int, int>, int> match_;
};

/// Fraction of reference tracks fully reconstructed by a single computed
/// track over their whole lifetime.
inline double complete_tracks(const LineageTree& pred, const LineageTree& gt,
                              double match_radius) {
    if (gt.tracks.empty()) throw EmptyGroundTruth("complete_tracks: empty reference tree");
    const TrackMatch match(pred, gt, match_radius);
    int complete = 0;
    for (const auto& t : gt.tracks) {
        std::optional<int> owner;
        bool ok = true;
        for (const auto& p : t.points) {
            const auto m = match.pred_track_at(p.frame, t.track_id);
            if (!m || (owner && *owner != *m)) {
                ok = false;
                break;
            }
            owner = *m;
        }
        if (ok && owner) ++complete;
    }
    return static_cast<double>(complete) / static_cast<double>(gt.tracks.size());
}

/// Mean over reference tracks of the longest run of consecutive frames
/// correctly reconstructed by one computed track, divided by track length.
inline double track_fractions(const LineageTree& pred, const LineageTree& gt,
                              double match_radius) {
    if (gt.tracks.empty()) throw EmptyGroundTruth("track_fractions: empty reference tree");
    const TrackMatch match(pred, gt, match_radius);
    double sum = 0.0;
    for (const auto& t : gt.tracks) {
        int best = 0, run = 0;
        std::optional<int> owner;
        for (const auto& p : t.points) {
            const auto m = match.pred_track_at(p.frame, t.track_id);
            if (m && (!owner || *owner == *m)) {
                ++run;
            } else if (m) {
                run = 1;  // identity switch starts a new run
            } else {
                run = 0;
            }
            owner = m;
            best = std::max(best, run);
        }
        sum += static_cast<double>(best) / static_cast<double>(t.points.size());
    }
    return sum / static_cast<double>(gt.tracks.size());
}

namespace detail {

struct Division {
    int parent_id;
    int frame;  // birth frame of the daughters
    int child1, child2;
};

inline std::vector<Division> divisions_of(const LineageTree& tree) {
    std::map<int, std::vector<const Track*>> kids;
    for (const auto& t : tree.tracks)
        if (t.parent_track_id != 0) kids[t.parent_track_id].push_back(&t);
    std::vector<Division> out;
    for (const auto& [pid, ts] : kids)
        if (ts.size() == 2)
            out.push_back({pid, ts[0]->begin_frame, ts[0]->track_id, ts[1]->track_id});
    return out;
}

}  // namespace detail

/// F1 of detected cell splits: a predicted division matches a reference one
/// when the parents correspond and both daughter pairs correspond, within
/// +-frame_tolerance frames. Returns nullopt when the reference contains no
/// divisions.
inline std::optional<double> branching_correctness(const LineageTree& pred,
                                                   const LineageTree& gt, int frame_tolerance,
                                                   double match_radius) {
    const auto gt_divs = detail::divisions_of(gt);
    if (gt_divs.empty()) return std::nullopt;
    const auto pred_divs = detail::divisions_of(pred);
    const TrackMatch match(pred, gt, match_radius);

    auto corresponds = [&](const detail::Division& g, const detail::Division& p) {
        if (std::abs(g.frame - p.frame) > frame_tolerance) return false;
        // Parent tracks must correspond on the frame before the reference division.
        const auto parent = match.pred_track_at(g.frame - 1, g.parent_id);
        if (!parent || *parent != p.parent_id) return false;
        // Both daughters must correspond at the later of the two birth frames.
        const int f = std::max(g.frame, p.frame);
        const auto m1 = match.pred_track_at(f, g.child1);
        const auto m2 = match.pred_track_at(f, g.child2);
        if (!m1 || !m2) return false;
        return (*m1 == p.child1 && *m2 == p.child2) || (*m1 == p.child2 && *m2 == p.child1);
    };

    std::vector<bool> used(pred_divs.size(), false);
    int tp = 0;
    for (const auto& g : gt_divs)
        for (size_t i = 0; i < pred_divs.size(); ++i) {
            if (used[i] || !corresponds(g, pred_divs[i])) continue;
            used[i] = true;
            ++tp;
            break;
        }
    const int fn = static_cast<int>(gt_divs.size()) - tp;
    const int fp = static_cast<int>(pred_divs.size()) - tp;
    if (tp == 0 && fp == 0 && fn == 0) return std::nullopt;
    return 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
}

/// Overlap of predicted and reference cell-cycle length distributions:
/// 1 - sup_t |F_pred(t) - F_gt(t)| over the empirical CDFs. A complete
/// cycle is a track born by division that divides itself; its length is
/// the number of frames from birth to division. Returns nullopt when
/// either tree has no complete cycle.
inline std::optional<double> cell_cycle_accuracy(const LineageTree& pred,
                                                 const LineageTree& gt) {
    auto cycles = [](const LineageTree& tree) {
        std::set<int> parents;
        for (const auto& t : tree.tracks)
            if (t.parent_track_id != 0) parents.insert(t.parent_track_id);
        std::vector<double> out;
        for (const auto& t : tree.tracks)
            if (t.parent_track_id != 0 && parents.count(t.track_id))
                out.push_back(static_cast<double>(t.end_frame - t.begin_frame + 1));
        std::sort(out.begin(), out.end());
        return out;
    };
    const auto a = cycles(pred);
    const auto b = cycles(gt);
    if (a.empty() || b.empty()) return std::nullopt;

    auto ecdf = [](const std::vector<double>& xs, double t) {
        return static_cast<double>(std::upper_bound(xs.begin(), xs.end(), t) - xs.begin()) /
               static_cast<double>(xs.size());
    };
    double sup = 0.0;
    for (const auto& xs : {a, b})
        for (double t : xs) sup = std::max(sup, std::abs(ecdf(a, t) - ecdf(b, t)));
    return 1.0 - sup;
}

}  // namespace mitotrack
