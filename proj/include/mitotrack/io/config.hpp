#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mitotrack/sim.hpp"
#include "mitotrack/types.hpp"

namespace mitotrack::io {

inline constexpr const char* kVersion = "0.1.0";

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known,
                                const std::string& what) {
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw std::runtime_error(what + ": unknown key '" + key + "'");
}

}  // namespace detail

inline nlohmann::json tracker_config_to_json(const TrackerConfig& c) {
    nlohmann::json j;
    j["p_detect"] = c.p_detect;
    j["p_birth"] = c.p_birth;
    j["a_max"] = c.a_max;
    j["h_max"] = c.h_max;
    if (c.erlang_alpha) j["erlang_alpha"] = *c.erlang_alpha;
    if (c.erlang_rate) j["erlang_rate"] = *c.erlang_rate;
    if (c.mean_motion_cov) {
        const Mat2& m = *c.mean_motion_cov;
        j["mean_motion_cov"] = {m(0, 0), m(0, 1), m(1, 1)};
    }
    j["gate_mahalanobis_sq"] = c.gate_mahalanobis_sq;
    j["clamp_eps"] = c.clamp_eps;
    j["prune_weight_delta"] = c.prune_weight_delta;
    j["existence_floor"] = c.existence_floor;
    j["min_track_len"] = c.min_track_len;
    j["sampler"] = c.sampler == Sampler::Murty ? "murty" : "gibbs";
    j["gibbs_samples"] = c.gibbs_samples;
    j["rng_seed"] = c.rng_seed;
    j["mitosis_costs_enabled"] = c.mitosis_costs_enabled;
    j["kalman_motion"] = c.kalman_motion;
    return j;
}

inline TrackerConfig tracker_config_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j,
        {"p_detect", "p_birth", "a_max", "h_max", "erlang_alpha", "erlang_rate",
         "mean_motion_cov", "gate_mahalanobis_sq", "clamp_eps", "prune_weight_delta",
         "existence_floor", "min_track_len", "sampler", "gibbs_samples", "rng_seed",
         "mitosis_costs_enabled", "kalman_motion"},
        "tracker config");
    TrackerConfig c;
    if (j.contains("p_detect")) c.p_detect = j["p_detect"].get<double>();
    if (j.contains("p_birth")) c.p_birth = j["p_birth"].get<double>();
    if (j.contains("a_max")) c.a_max = j["a_max"].get<int>();
    if (j.contains("h_max")) c.h_max = j["h_max"].get<int>();
    if (j.contains("erlang_alpha")) c.erlang_alpha = j["erlang_alpha"].get<int>();
    if (j.contains("erlang_rate")) c.erlang_rate = j["erlang_rate"].get<double>();
    if (j.contains("mean_motion_cov")) {
        const auto v = j["mean_motion_cov"].get<std::vector<double>>();
        if (v.size() != 3)
            throw std::runtime_error("tracker config: mean_motion_cov must be [xx, xy, yy]");
        c.mean_motion_cov = (Mat2() << v[0], v[1], v[1], v[2]).finished();
    }
    if (j.contains("gate_mahalanobis_sq"))
        c.gate_mahalanobis_sq = j["gate_mahalanobis_sq"].get<double>();
    if (j.contains("clamp_eps")) c.clamp_eps = j["clamp_eps"].get<double>();
    if (j.contains("prune_weight_delta"))
        c.prune_weight_delta = j["prune_weight_delta"].get<double>();
    if (j.contains("existence_floor")) c.existence_floor = j["existence_floor"].get<double>();
    if (j.contains("min_track_len")) c.min_track_len = j["min_track_len"].get<int>();
    if (j.contains("sampler")) {
        const auto s = j["sampler"].get<std::string>();
        if (s == "murty")
            c.sampler = Sampler::Murty;
        else if (s == "gibbs")
            c.sampler = Sampler::Gibbs;
        else
            throw std::runtime_error("tracker config: sampler must be 'murty' or 'gibbs'");
    }
    if (j.contains("gibbs_samples")) c.gibbs_samples = j["gibbs_samples"].get<int>();
    if (j.contains("rng_seed")) c.rng_seed = j["rng_seed"].get<std::uint64_t>();
    if (j.contains("mitosis_costs_enabled"))
        c.mitosis_costs_enabled = j["mitosis_costs_enabled"].get<bool>();
    if (j.contains("kalman_motion")) c.kalman_motion = j["kalman_motion"].get<bool>();
    return c;
}

inline nlohmann::json sim_config_to_json(const SimConfig& c) {
    nlohmann::json j;
    j["width"] = c.width;
    j["height"] = c.height;
    j["n_frames"] = c.n_frames;
    j["n_init"] = c.n_init;
    j["motion_sigma"] = c.motion_sigma;
    j["lifetime_alpha"] = c.lifetime_alpha;
    j["lifetime_rate"] = c.lifetime_rate;
    j["p_detect_sim"] = c.p_detect_sim;
    j["clutter_rate"] = c.clutter_rate;
    j["frag_prob"] = c.frag_prob;
    j["frag_len_min"] = c.frag_len_min;
    j["frag_len_max"] = c.frag_len_max;
    j["meas_sigma"] = c.meas_sigma;
    j["daughter_sep"] = c.daughter_sep;
    j["seed"] = c.seed;
    return j;
}

inline SimConfig sim_config_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(j,
                                {"width", "height", "n_frames", "n_init", "motion_sigma",
                                 "lifetime_alpha", "lifetime_rate", "p_detect_sim",
                                 "clutter_rate", "frag_prob", "frag_len_min", "frag_len_max",
                                 "meas_sigma", "daughter_sep", "seed"},
                                "sim config");
    SimConfig c;
    if (j.contains("width")) c.width = j["width"].get<double>();
    if (j.contains("height")) c.height = j["height"].get<double>();
    if (j.contains("n_frames")) c.n_frames = j["n_frames"].get<int>();
    if (j.contains("n_init")) c.n_init = j["n_init"].get<int>();
    if (j.contains("motion_sigma")) c.motion_sigma = j["motion_sigma"].get<double>();
    if (j.contains("lifetime_alpha")) c.lifetime_alpha = j["lifetime_alpha"].get<int>();
    if (j.contains("lifetime_rate")) c.lifetime_rate = j["lifetime_rate"].get<double>();
    if (j.contains("p_detect_sim")) c.p_detect_sim = j["p_detect_sim"].get<double>();
    if (j.contains("clutter_rate")) c.clutter_rate = j["clutter_rate"].get<double>();
    if (j.contains("frag_prob")) c.frag_prob = j["frag_prob"].get<double>();
    if (j.contains("frag_len_min")) c.frag_len_min = j["frag_len_min"].get<int>();
    if (j.contains("frag_len_max")) c.frag_len_max = j["frag_len_max"].get<int>();
    if (j.contains("meas_sigma")) c.meas_sigma = j["meas_sigma"].get<double>();
    if (j.contains("daughter_sep")) c.daughter_sep = j["daughter_sep"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    return c;
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    nlohmann::json j;
    in >> j;
    return j;
}

/// FNV-1a 64-bit over the raw file bytes, as a hex string.
inline std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

/// Reproducibility record written into the output directory before any
/// computation starts.
inline void write_run_manifest(const std::string& path, const std::string& subcommand,
                               const nlohmann::json& resolved_config, std::uint64_t seed,
                               const std::map<std::string, std::string>& inputs) {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["config"] = resolved_config;
    j["seed"] = seed;
    j["version"] = kVersion;
    nlohmann::json in = nlohmann::json::object();
    for (const auto& [p, h] : inputs) in[p] = h;
    j["input_hashes"] = in;
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace mitotrack::io
