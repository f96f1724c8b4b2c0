#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>
#include <unordered_map>
#include <vector>

#include "mitotrack/costs.hpp"
#include "mitotrack/gibbs.hpp"
#include "mitotrack/lineage.hpp"
#include "mitotrack/murty.hpp"
#include "mitotrack/rng.hpp"
#include "mitotrack/types.hpp"

namespace mitotrack {

/// The hypothesis forest between frames. After reduce() the hypotheses are
/// sorted by weight, minimum first.
struct HypothesisStore {
    int frame = -1;  // frame index of the current state; -1 = before first frame
    std::vector<Hypothesis> hypotheses;
    int next_object_id = 1;

    static HypothesisStore initial(int first_frame = 0) {
        HypothesisStore s;
        s.frame = first_frame - 1;
        s.hypotheses.push_back(Hypothesis{});  // empty hypothesis, weight 0
        return s;
    }
};

/// Config with the AUTO fields resolved against a concrete input sequence.
struct ResolvedConfig {
    TrackerConfig cfg;
    int erlang_alpha = 1;
    double erlang_rate = 1.0;
    Mat2 mean_motion_cov = Mat2::Identity();
};

/// Mean per-frame motion spread of the detections:
/// sigma = mean ||centroid - motion_warped|| / sqrt(2), Sigma = sigma^2 I.
/// Falls back to the identity when no motion data exists, and to a
/// clamp_eps floor when all offsets are exactly zero.
inline Mat2 estimate_mean_motion_cov(const std::vector<std::vector<Detection>>& frames,
                                     double clamp_eps = 1e-12, bool* fallback_used = nullptr) {
    double sum = 0.0;
    long n = 0;
    for (const auto& dets : frames)
        for (const auto& d : dets) {
            sum += (d.centroid.mean - d.motion_warped.mean).norm();
            ++n;
        }
    if (fallback_used) *fallback_used = (n == 0);
    if (n == 0) return Mat2::Identity();
    const double sigma = sum / static_cast<double>(n) / std::sqrt(2.0);
    double var = sigma * sigma;
    if (var < clamp_eps) var = clamp_eps;
    return var * Mat2::Identity();
}

inline ResolvedConfig resolve_config(const TrackerConfig& cfg,
                                     const std::vector<std::vector<Detection>>& frames) {
    ResolvedConfig r;
    r.cfg = cfg;
    const int n_frames = static_cast<int>(frames.size());
    r.erlang_alpha = cfg.erlang_alpha.value_or(std::max(1, n_frames));
    r.erlang_rate = cfg.erlang_rate.value_or(1.0 / std::max(1, n_frames));
    r.mean_motion_cov =
        cfg.mean_motion_cov ? *cfg.mean_motion_cov : estimate_mean_motion_cov(frames, cfg.clamp_eps);
    return r;
}

/// Random-walk prediction: means stay, covariances grow by the mean-motion
/// covariance. In Kalman ablation mode the mean advances by the velocity.
inline void predict(HypothesisStore& store, const ResolvedConfig& rc) {
    for (auto& h : store.hypotheses)
        for (auto& c : h.components) {
            if (rc.cfg.kalman_motion) c.position.mean += c.velocity;
            c.position.cov += rc.mean_motion_cov;
        }
}

namespace detail {

/// Candidate child produced by sampling one hypothesis.
struct ChildCandidate {
    int parent_index = 0;
    Assignment assignment;
    double missed_penalty = 0.0;
};

inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

/// Structural signature of a component: birth, parentage and full
/// (frame, det_id) history. Independent of object_id numbering so that
/// hypotheses describing the same state collide across parents.
inline std::uint64_t component_signature(
    const BernoulliComponent& c, const std::unordered_map<int, std::uint64_t>& sig_by_id) {
    std::uint64_t h = 0x6a09e667f3bcc908ULL;
    h = hash_mix(h, static_cast<std::uint64_t>(c.birth_frame));
    h = hash_mix(h, c.age_known ? 1 : 0);
    if (c.parent_id) {
        auto it = sig_by_id.find(*c.parent_id);
        h = hash_mix(h, it != sig_by_id.end() ? it->second : 0xdeadULL);
    } else {
        h = hash_mix(h, 0);
    }
    for (const auto& e : c.assignment_history) {
        h = hash_mix(h, static_cast<std::uint64_t>(e.frame));
        h = hash_mix(h, static_cast<std::uint64_t>(e.det_id + 2));
    }
    return h;
}

inline std::uint64_t hypothesis_signature(const Hypothesis& h) {
    // Archived components first so parent signatures are available.
    std::unordered_map<int, std::uint64_t> sig_by_id;
    std::vector<std::uint64_t> sigs;
    sigs.reserve(h.archive.size() + h.components.size());
    for (const auto& c : h.archive) {
        const std::uint64_t s = component_signature(c, sig_by_id);
        sig_by_id[c.object_id] = s;
        sigs.push_back(s);
    }
    for (const auto& c : h.components) {
        const std::uint64_t s = component_signature(c, sig_by_id);
        sig_by_id[c.object_id] = s;
        sigs.push_back(s);
    }
    std::sort(sigs.begin(), sigs.end());
    std::uint64_t out = 0x510e527fade682d1ULL;
    for (std::uint64_t s : sigs) out = hash_mix(out, s);
    return out;
}

}  // namespace detail

/// Merges hypotheses with identical canonical signatures (keeping the
/// minimum weight), sorts by weight, prunes by weight delta and truncates
/// to H_max.
inline void reduce(HypothesisStore& store, const ResolvedConfig& rc) {
    if (store.hypotheses.empty()) return;

    std::unordered_map<std::uint64_t, size_t> best_by_sig;
    std::vector<Hypothesis> merged;
    merged.reserve(store.hypotheses.size());
    for (auto& h : store.hypotheses) {
        const std::uint64_t sig = detail::hypothesis_signature(h);
        auto it = best_by_sig.find(sig);
        if (it == best_by_sig.end()) {
            best_by_sig.emplace(sig, merged.size());
            merged.push_back(std::move(h));
        } else if (h.weight < merged[it->second].weight) {
            merged[it->second] = std::move(h);
        }
    }

    std::stable_sort(merged.begin(), merged.end(),
                     [](const Hypothesis& a, const Hypothesis& b) { return a.weight < b.weight; });

    const double cutoff = merged.front().weight + rc.cfg.prune_weight_delta;
    while (merged.size() > 1 && merged.back().weight > cutoff) merged.pop_back();
    if (static_cast<int>(merged.size()) > rc.cfg.h_max) merged.resize(rc.cfg.h_max);

    store.hypotheses = std::move(merged);
}

/// One full filter recursion: predict, sample assignments per hypothesis,
/// spawn child hypotheses with updated weights and component states, then
/// reduce. Hypotheses are sampled concurrently when n_threads > 1; results
/// are gathered in deterministic order.
inline void step(HypothesisStore& store, const std::vector<Detection>& detections,
                 const ResolvedConfig& rc, const Rng& rng, int n_threads = 1) {
    const int frame = store.frame + 1;
    for (const auto& d : detections)
        if (d.frame != frame)
            throw FrameOrder("step: detection frame " + std::to_string(d.frame) +
                             ", expected " + std::to_string(frame));

    predict(store, rc);

    const auto& cfg = rc.cfg;
    const int n_det = static_cast<int>(detections.size());
    const int n_hyp = static_cast<int>(store.hypotheses.size());

    std::vector<double> clutter(n_det);
    for (int j = 0; j < n_det; ++j) clutter[j] = detections[j].clutter_prob;

    // Fan-out: per-hypothesis matrix build and sampling is pure.
    std::vector<std::vector<detail::ChildCandidate>> sampled(n_hyp);
    auto process = [&](int hi) {
        const Hypothesis& h = store.hypotheses[hi];
        const int n_obj = static_cast<int>(h.components.size());

        std::vector<ObjectCostInput> inputs(n_obj);
        for (int i = 0; i < n_obj; ++i) {
            const auto& c = h.components[i];
            inputs[i].existence = c.existence;
            inputs[i].scores.resize(n_det);
            for (int j = 0; j < n_det; ++j) {
                const SpatialGaussian& target =
                    cfg.kalman_motion ? detections[j].centroid : detections[j].motion_warped;
                inputs[i].scores[j] =
                    spatial_score(c.position, target, cfg.gate_mahalanobis_sq);
            }
            inputs[i].mitosis =
                cfg.mitosis_costs_enabled
                    ? mitosis_cost(c.age(store.frame), rc.erlang_alpha, rc.erlang_rate,
                                   cfg.clamp_eps)
                    : 0.0;
            inputs[i].miss_cost = -std::log(1.0 - c.existence * cfg.p_detect);
        }
        double miss_total = 0.0;
        for (const auto& in : inputs) miss_total += in.miss_cost;

        const CostMatrix matrix = build_extended_matrix(clutter, inputs, cfg);

        std::vector<Assignment> assignments;
        if (cfg.sampler == Sampler::Murty) {
            assignments = murty_kbest(matrix, cfg.a_max);
        } else {
            Rng local = rng.split(static_cast<std::uint64_t>(frame),
                                  static_cast<std::uint64_t>(hi));
            for (auto& g : gibbs_sample(matrix, cfg.gibbs_samples, local, cfg.a_max))
                assignments.push_back(std::move(g.assignment));
        }
        if (assignments.empty() && n_det == 0) {
            Assignment empty;
            resolve_events(matrix, empty);
            assignments.push_back(empty);
        }

        for (auto& a : assignments) {
            detail::ChildCandidate cand;
            cand.parent_index = hi;
            // Matrix costs already refund the per-object missed penalty for
            // anything matched; adding the full sum restores the ledger
            // weight = parent + assignment cost + missed penalties.
            cand.missed_penalty = miss_total;
            cand.assignment = std::move(a);
            sampled[hi].push_back(std::move(cand));
        }
    };

    if (n_threads > 1 && n_hyp > 1) {
        std::vector<std::thread> pool;
        std::atomic<int> cursor{0};
        const int workers = std::min(n_threads, n_hyp);
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (int hi = cursor.fetch_add(1); hi < n_hyp; hi = cursor.fetch_add(1))
                    process(hi);
            });
        for (auto& th : pool) th.join();
    } else {
        for (int hi = 0; hi < n_hyp; ++hi) process(hi);
    }

    // Gather serially: child construction assigns object ids in a fixed order.
    std::vector<Hypothesis> children;
    for (int hi = 0; hi < n_hyp; ++hi) {
        const Hypothesis& parent = store.hypotheses[hi];
        for (const auto& cand : sampled[hi]) {
            Hypothesis child;
            child.weight = parent.weight + cand.assignment.total_cost + cand.missed_penalty;
            child.archive = parent.archive;

            const int n_obj = static_cast<int>(parent.components.size());
            for (int i = 0; i < n_obj; ++i) {
                const BernoulliComponent& prev = parent.components[i];
                const ObjectEvent& ev = cand.assignment.per_object[i];
                switch (ev.kind) {
                    case ObjectEvent::Kind::Matched: {
                        BernoulliComponent c = prev;
                        const Detection& det = detections[ev.det1];
                        if (cfg.kalman_motion) {
                            // Scalar-gain Kalman update on the centroid measurement.
                            const Mat2 s = regularize_cov(c.position.cov + det.centroid.cov);
                            const Mat2 gain = c.position.cov * s.inverse();
                            const Vec2 prior = c.position.mean;
                            c.position.mean += gain * (det.centroid.mean - prior);
                            c.position.cov =
                                (Mat2::Identity() - gain) * c.position.cov;
                            c.velocity = c.position.mean - (prior - c.velocity);
                        } else {
                            c.position = det.centroid;
                        }
                        c.existence = 1.0;
                        c.assignment_history.push_back(
                            {frame, det.det_id, det.centroid.mean});
                        child.components.push_back(std::move(c));
                        break;
                    }
                    case ObjectEvent::Kind::Mitosis: {
                        BernoulliComponent archived = prev;
                        for (int d : {ev.det1, ev.det2}) {
                            const Detection& det = detections[d];
                            BernoulliComponent daughter;
                            daughter.object_id = store.next_object_id++;
                            daughter.existence = 1.0;
                            daughter.position = det.centroid;
                            daughter.birth_frame = frame;
                            daughter.age_known = true;
                            daughter.parent_id = archived.object_id;
                            daughter.assignment_history.push_back(
                                {frame, det.det_id, det.centroid.mean});
                            child.components.push_back(std::move(daughter));
                        }
                        child.archive.push_back(std::move(archived));
                        break;
                    }
                    case ObjectEvent::Kind::Missed: {
                        BernoulliComponent c = prev;  // covariance already inflated by predict
                        c.existence = c.existence * (1.0 - cfg.p_detect) /
                                      (1.0 - c.existence * cfg.p_detect);
                        if (c.existence < cfg.existence_floor) {
                            child.archive.push_back(std::move(c));
                        } else {
                            c.assignment_history.push_back({frame, kMissed, c.position.mean});
                            child.components.push_back(std::move(c));
                        }
                        break;
                    }
                }
            }
            for (int row : cand.assignment.birth_rows) {
                const Detection& det = detections[row];
                BernoulliComponent born;
                born.object_id = store.next_object_id++;
                born.existence = 1.0 - det.clutter_prob;
                born.position = det.centroid;
                born.birth_frame = frame;
                born.age_known = false;
                born.assignment_history.push_back({frame, det.det_id, det.centroid.mean});
                child.components.push_back(std::move(born));
            }
            children.push_back(std::move(child));
        }
    }

    store.frame = frame;
    store.hypotheses = std::move(children);
    reduce(store, rc);
}

/// Walks the best hypothesis and emits the lineage: per-component tracks
/// with parent links, short non-dividing tracks removed and MISSED gaps
/// linearly interpolated.
inline LineageTree extract_lineage(const HypothesisStore& store, const ResolvedConfig& rc) {
    LineageTree tree;
    if (store.hypotheses.empty()) return tree;
    const Hypothesis& best = store.hypotheses.front();

    std::vector<const BernoulliComponent*> comps;
    for (const auto& c : best.archive) comps.push_back(&c);
    for (const auto& c : best.components) comps.push_back(&c);
    std::sort(comps.begin(), comps.end(),
              [](const BernoulliComponent* a, const BernoulliComponent* b) {
                  if (a->birth_frame != b->birth_frame) return a->birth_frame < b->birth_frame;
                  return a->object_id < b->object_id;
              });

    // Pass 1: raw tracks keyed by object id.
    struct Raw {
        const BernoulliComponent* comp;
        std::vector<TrackPoint> points;
        bool keep = true;
    };
    std::map<int, Raw> raw;
    for (const BernoulliComponent* c : comps) {
        if (c->assignment_history.empty()) continue;
        Raw r;
        r.comp = c;
        for (const auto& e : c->assignment_history)
            r.points.push_back({e.frame, e.det_id, e.pos});
        raw.emplace(c->object_id, std::move(r));
    }

    std::map<int, std::vector<int>> children_by_parent;
    std::map<int, Vec2> division_pos;  // mean daughter position at the division frame
    for (const auto& [id, r] : raw)
        if (r.comp->parent_id) children_by_parent[*r.comp->parent_id].push_back(id);
    for (const auto& [pid, kids] : children_by_parent) {
        Vec2 mean = Vec2::Zero();
        int n = 0;
        for (int k : kids)
            if (raw.count(k)) {
                mean += raw.at(k).points.front().pos;
                ++n;
            }
        if (n > 0) division_pos[pid] = mean / n;
    }

    for (auto& [id, r] : raw) {
        const auto div = division_pos.find(id);
        if (div == division_pos.end()) {
            // Trailing missed entries do not belong to the reconstructed track.
            while (!r.points.empty() && r.points.back().det_id == kMissed) r.points.pop_back();
        } else if (!r.points.empty() && r.points.back().det_id == kMissed) {
            // A dividing parent keeps its trailing gap so it still ends one
            // frame before the daughters; interpolate toward the division.
            size_t a = r.points.size();
            while (a > 0 && r.points[a - 1].det_id == kMissed) --a;
            if (a > 0) {
                const Vec2 p0 = r.points[a - 1].pos;
                const double span = static_cast<double>(r.points.size() - a + 1);
                for (size_t g = a; g < r.points.size(); ++g)
                    r.points[g].pos =
                        p0 + (div->second - p0) * (static_cast<double>(g - a + 1) / span);
            }
        }
        if (r.points.empty()) {
            r.keep = false;
            continue;
        }
        // Linear interpolation across interior gaps.
        for (size_t a = 0; a + 1 < r.points.size(); ++a) {
            if (r.points[a].det_id == kMissed) continue;
            size_t b = a + 1;
            while (b < r.points.size() && r.points[b].det_id == kMissed) ++b;
            if (b >= r.points.size() || b == a + 1) continue;
            const Vec2 p0 = r.points[a].pos;
            const Vec2 p1 = r.points[b].pos;
            const double span = static_cast<double>(b - a);
            for (size_t g = a + 1; g < b; ++g)
                r.points[g].pos = p0 + (p1 - p0) * (static_cast<double>(g - a) / span);
        }
    }

    // Pass 2: drop short tracks that are not mitosis parents. When a
    // daughter is dropped, the sibling's parent link is cleared below so a
    // division never has a single child.
    for (auto& [id, r] : raw) {
        const bool is_parent = children_by_parent.count(id) > 0;
        if (r.points.size() < static_cast<size_t>(rc.cfg.min_track_len) && !is_parent)
            r.keep = false;
    }

    std::map<int, int> track_id_by_object;
    int next_track_id = 1;
    for (const BernoulliComponent* c : comps) {
        auto it = raw.find(c->object_id);
        if (it == raw.end() || !it->second.keep) continue;
        track_id_by_object[c->object_id] = next_track_id++;
    }

    for (const BernoulliComponent* c : comps) {
        auto it = raw.find(c->object_id);
        if (it == raw.end() || !it->second.keep) continue;
        Track t;
        t.track_id = track_id_by_object[c->object_id];
        t.points = it->second.points;
        t.begin_frame = t.points.front().frame;
        t.end_frame = t.points.back().frame;
        t.parent_track_id = 0;
        if (c->parent_id) {
            // Keep the parent link only when the whole division survived.
            auto sibs = children_by_parent.find(*c->parent_id);
            int kept = 0;
            if (sibs != children_by_parent.end())
                for (int k : sibs->second)
                    if (raw.count(k) && raw.at(k).keep) ++kept;
            auto pt = track_id_by_object.find(*c->parent_id);
            if (kept == 2 && pt != track_id_by_object.end()) t.parent_track_id = pt->second;
        }
        tree.tracks.push_back(std::move(t));
    }
    return tree;
}

/// Runs the full recursion over per-frame detection lists and extracts the
/// minimum-weight lineage.
inline LineageTree track_sequence(const std::vector<std::vector<Detection>>& frames,
                                  const TrackerConfig& cfg, int n_threads = 1,
                                  int first_frame = 0) {
    const ResolvedConfig rc = resolve_config(cfg, frames);
    HypothesisStore store = HypothesisStore::initial(first_frame);
    const Rng rng(cfg.rng_seed);
    for (const auto& dets : frames) step(store, dets, rc, rng, n_threads);
    return extract_lineage(store, rc);
}

}  // namespace mitotrack
