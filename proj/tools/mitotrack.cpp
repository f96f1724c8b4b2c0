#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mitotrack/hungarian.hpp"
#include "mitotrack/io/config.hpp"
#include "mitotrack/io/csv.hpp"
#include "mitotrack/io/manifest.hpp"
#include "mitotrack/metrics.hpp"
#include "mitotrack/rng.hpp"
#include "mitotrack/sim.hpp"
#include "mitotrack/tracker.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int log_level() {
    const char* v = std::getenv("MITOTRACK_LOG");
    if (!v || !*v) return 0;
    return std::atoi(v);
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[mitotrack] " << msg << "\n";
}

void ensure_dir(const fs::path& p) { fs::create_directories(p); }

int cmd_track(const std::string& detections_path, const std::string& config_path,
              const std::string& out_dir, std::optional<std::uint64_t> seed, int threads) {
    mitotrack::TrackerConfig cfg;
    std::map<std::string, std::string> inputs;
    if (!config_path.empty()) {
        cfg = mitotrack::io::tracker_config_from_json(mitotrack::io::load_json_file(config_path));
        inputs[config_path] = mitotrack::io::file_hash(config_path);
    }
    if (seed) cfg.rng_seed = *seed;
    inputs[detections_path] = mitotrack::io::file_hash(detections_path);

    ensure_dir(out_dir);
    mitotrack::io::write_run_manifest((fs::path(out_dir) / "run.json").string(), "track",
                                      mitotrack::io::tracker_config_to_json(cfg), cfg.rng_seed,
                                      inputs);

    const auto frames = mitotrack::io::read_detections_csv(detections_path);
    int first_frame = 0;
    for (const auto& f : frames)
        if (!f.empty()) {
            first_frame = f.front().frame;
            break;
        }
    log_info("tracking " + std::to_string(frames.size()) + " frames");
    const mitotrack::LineageTree tree =
        mitotrack::track_sequence(frames, cfg, threads, first_frame);
    log_info("extracted " + std::to_string(tree.tracks.size()) + " tracks");

    mitotrack::io::write_tracks_csv((fs::path(out_dir) / "tracks.csv").string(), tree);
    mitotrack::io::write_res_track((fs::path(out_dir) / "res_track.txt").string(), tree);
    return 0;
}

int cmd_densify(const std::string& manifest_path, const std::string& out_csv) {
    const auto manifest = mitotrack::io::read_density_manifest(manifest_path);
    const bool normalized = manifest.units == "normalized";
    std::vector<std::vector<mitotrack::Detection>> frames;
    for (const auto& f : manifest.frames) {
        log_info("densifying frame " + std::to_string(f.frame));
        frames.push_back(mitotrack::io::densify_frame(f, normalized));
    }
    const fs::path out(out_csv);
    if (out.has_parent_path()) ensure_dir(out.parent_path());
    mitotrack::io::write_detections_csv(out_csv, frames);
    mitotrack::io::write_run_manifest(
        (out.has_parent_path() ? out.parent_path() : fs::path(".")) / "run.json", "densify",
        json{{"manifest", manifest_path}}, 0,
        {{manifest_path, mitotrack::io::file_hash(manifest_path)}});
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
    mitotrack::SimConfig cfg;
    std::map<std::string, std::string> inputs;
    if (!config_path.empty()) {
        cfg = mitotrack::io::sim_config_from_json(mitotrack::io::load_json_file(config_path));
        inputs[config_path] = mitotrack::io::file_hash(config_path);
    }
    if (seed) cfg.seed = *seed;

    ensure_dir(out_dir);
    ensure_dir(fs::path(out_dir) / "gt");
    mitotrack::io::write_run_manifest((fs::path(out_dir) / "run.json").string(), "simulate",
                                      mitotrack::io::sim_config_to_json(cfg), cfg.seed, inputs);

    const mitotrack::SimResult r = mitotrack::simulate(cfg);
    log_info("simulated " + std::to_string(r.ground_truth.tracks.size()) + " tracks");
    mitotrack::io::write_detections_csv((fs::path(out_dir) / "detections.csv").string(),
                                        r.detections);
    mitotrack::io::write_tracks_csv((fs::path(out_dir) / "gt" / "tracks.csv").string(),
                                    r.ground_truth);
    mitotrack::io::write_res_track((fs::path(out_dir) / "gt" / "res_track.txt").string(),
                                   r.ground_truth);
    return 0;
}

int cmd_evaluate(const std::string& pred_dir, const std::string& gt_dir, const std::string& out,
                 double match_radius) {
    const auto pred = mitotrack::io::read_lineage((fs::path(pred_dir) / "tracks.csv").string(),
                                                  (fs::path(pred_dir) / "res_track.txt").string());
    const auto gt = mitotrack::io::read_lineage((fs::path(gt_dir) / "tracks.csv").string(),
                                                (fs::path(gt_dir) / "res_track.txt").string());

    json j;
    j["CT"] = mitotrack::complete_tracks(pred, gt, match_radius);
    j["TF"] = mitotrack::track_fractions(pred, gt, match_radius);
    const auto bc1 = mitotrack::branching_correctness(pred, gt, 1, match_radius);
    const auto bc2 = mitotrack::branching_correctness(pred, gt, 2, match_radius);
    const auto cca = mitotrack::cell_cycle_accuracy(pred, gt);
    j["BC1"] = bc1 ? json(*bc1) : json(nullptr);
    j["BC2"] = bc2 ? json(*bc2) : json(nullptr);
    j["CCA"] = cca ? json(*cca) : json(nullptr);
    j["match_radius"] = match_radius;

    const fs::path outp(out);
    if (outp.has_parent_path()) ensure_dir(outp.parent_path());
    std::ofstream os(out);
    if (!os) throw std::runtime_error(out + ": cannot open for writing");
    os << j.dump(2) << "\n";
    std::cout << j.dump(2) << "\n";
    return 0;
}

// Random instances of the three Fig.-style cost formulations at size N
// (N detections, N objects): finite association block, unassigned diagonal,
// and a split block at +c^M with c^M finite / 0 / infinite.
int cmd_bench_assign(const std::vector<int>& sizes, int trials, const std::string& out,
                     std::uint64_t seed) {
    using clock = std::chrono::steady_clock;
    std::ofstream os(out);
    if (!os) throw std::runtime_error(out + ": cannot open for writing");
    os << "n,variant,mean_seconds\n";

    mitotrack::Rng rng(seed);
    for (int n : sizes) {
        double total[3] = {0.0, 0.0, 0.0};
        for (int t = 0; t < trials; ++t) {
            Eigen::MatrixXd left(n, n);
            Eigen::VectorXd diag(n), cm(n);
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) left(j, i) = rng.uniform(0.0, 10.0);
                diag(j) = rng.uniform(8.0, 15.0);
                cm(j) = rng.uniform(0.05, 0.5);
            }
            const double cm_variant[3] = {1.0, 0.0, mitotrack::kInf};  // standard, zero, inf
            for (int v = 0; v < 3; ++v) {
                Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, 3 * n, mitotrack::kInf);
                m.block(0, 0, n, n) = left;
                for (int j = 0; j < n; ++j) m(j, n + j) = diag(j);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        m(j, 2 * n + i) =
                            cm_variant[v] == mitotrack::kInf ? mitotrack::kInf
                                                             : left(j, i) + cm_variant[v] * cm(i);
                const auto t0 = clock::now();
                volatile double cost = mitotrack::hungarian(m).total_cost;
                (void)cost;
                total[v] += std::chrono::duration<double>(clock::now() - t0).count();
            }
        }
        const char* names[3] = {"standard", "cm_zero", "cm_inf"};
        for (int v = 0; v < 3; ++v)
            os << n << ',' << names[v] << ',' << total[v] / trials << "\n";
        log_info("bench n=" + std::to_string(n) + " done");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mitosis-aware multi-hypothesis cell tracker"};
    app.require_subcommand(1);

    std::string config_path, out_path, detections_path, manifest_path, pred_dir, gt_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    double match_radius = 5.0;
    std::vector<int> sizes = {8, 16, 32, 64, 128};
    int trials = 200;
    std::uint64_t bench_seed = 0;

    auto* track = app.add_subcommand("track", "Track a detections.csv sequence");
    track->add_option("--detections", detections_path, "Input detections.csv")->required();
    track->add_option("--config", config_path, "Tracker config JSON");
    track->add_option("--out", out_path, "Output directory")->required();
    track->add_option("--seed", seed, "Override the config RNG seed");
    track->add_option("--threads", threads, "Worker threads");

    auto* densify = app.add_subcommand("densify", "Aggregate pixel predictions into detections");
    densify->add_option("--manifest", manifest_path, "Manifest JSON of .nft stacks")->required();
    densify->add_option("--out", out_path, "Output detections.csv")->required();

    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic colony");
    simulate->add_option("--config", config_path, "Sim config JSON");
    simulate->add_option("--out", out_path, "Output directory")->required();
    simulate->add_option("--seed", seed, "Override the config seed");

    auto* evaluate = app.add_subcommand("evaluate", "Compute CT/TF/BC/CCA metrics");
    evaluate->add_option("--pred", pred_dir, "Prediction dir (tracks.csv + res_track.txt)")
        ->required();
    evaluate->add_option("--gt", gt_dir, "Ground-truth dir (tracks.csv + res_track.txt)")
        ->required();
    evaluate->add_option("--out", out_path, "Output metrics.json")->required();
    evaluate->add_option("--match-radius", match_radius, "Centroid match radius in px");

    auto* bench = app.add_subcommand("bench-assign", "Benchmark the assignment solver");
    bench->add_option("--sizes", sizes, "Matrix sizes (detections per frame)");
    bench->add_option("--trials", trials, "Trials per size");
    bench->add_option("--out", out_path, "Output CSV")->required();
    bench->add_option("--seed", bench_seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (track->parsed())
            return cmd_track(detections_path, config_path, out_path, seed, threads);
        if (densify->parsed()) return cmd_densify(manifest_path, out_path);
        if (simulate->parsed()) return cmd_simulate(config_path, out_path, seed);
        if (evaluate->parsed()) return cmd_evaluate(pred_dir, gt_dir, out_path, match_radius);
        if (bench->parsed()) return cmd_bench_assign(sizes, trials, out_path, bench_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
