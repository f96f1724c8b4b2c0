#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mitotrack/density.hpp"
#include "mitotrack/io/config.hpp"
#include "mitotrack/io/nft.hpp"

namespace mitotrack::io {

/// One frame of a density manifest: paths to the averaged segmentation map,
/// the instance label map and the per-augmentation offset stacks.
struct ManifestFrame {
    int frame = 0;
    std::string seg;
    std::string labels;
    std::vector<std::string> centroid_offsets;
    std::vector<std::string> motion_offsets;
};

struct DensityManifest {
    std::string units = "pixels";  // "pixels" | "normalized"
    std::vector<ManifestFrame> frames;
};

inline DensityManifest read_density_manifest(const std::string& path) {
    const nlohmann::json j = load_json_file(path);
    DensityManifest m;
    if (!j.contains("offset_units") || !j.contains("frames"))
        throw std::runtime_error(path + ": manifest needs 'offset_units' and 'frames'");
    m.units = j["offset_units"].get<std::string>();
    if (m.units != "pixels" && m.units != "normalized")
        throw std::runtime_error(path + ": offset_units must be 'pixels' or 'normalized'");

    const auto root = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        return (std::filesystem::path(p).is_absolute() ? p : (root / p).string());
    };
    for (const auto& fj : j["frames"]) {
        ManifestFrame f;
        f.frame = fj.at("frame").get<int>();
        f.seg = resolve(fj.at("seg").get<std::string>());
        f.labels = resolve(fj.at("labels").get<std::string>());
        for (const auto& p : fj.at("centroid_offsets"))
            f.centroid_offsets.push_back(resolve(p.get<std::string>()));
        for (const auto& p : fj.at("motion_offsets"))
            f.motion_offsets.push_back(resolve(p.get<std::string>()));
        m.frames.push_back(std::move(f));
    }
    return m;
}

namespace detail {

/// Offset tensor layout: [H, W, 2] float32, channel-last.
inline OffsetField offset_field_from_tensor(const FloatTensor& t, const std::string& path,
                                            bool normalized) {
    if (t.dims.size() != 3 || t.dims[2] != 2)
        throw BadTensorHeader(path + ": offset tensor must be [H, W, 2]");
    OffsetField f;
    f.height = static_cast<int>(t.dims[0]);
    f.width = static_cast<int>(t.dims[1]);
    f.values.resize(static_cast<std::size_t>(f.height) * f.width);
    const double sx = normalized ? static_cast<double>(f.width) : 1.0;
    const double sy = normalized ? static_cast<double>(f.height) : 1.0;
    for (std::size_t p = 0; p < f.values.size(); ++p)
        f.values[p] = Vec2(sx * t.data[2 * p], sy * t.data[2 * p + 1]);
    return f;
}

}  // namespace detail

inline PredictionStack load_prediction_stack(const ManifestFrame& f, bool normalized) {
    PredictionStack s;
    const FloatTensor seg = read_nft<float>(f.seg);
    if (seg.dims.size() != 2) throw BadTensorHeader(f.seg + ": seg tensor must be [H, W]");
    s.height = static_cast<int>(seg.dims[0]);
    s.width = static_cast<int>(seg.dims[1]);
    s.seg.assign(seg.data.begin(), seg.data.end());

    const IntTensor lab = read_nft<std::int32_t>(f.labels);
    if (lab.dims.size() != 2 || static_cast<int>(lab.dims[0]) != s.height ||
        static_cast<int>(lab.dims[1]) != s.width)
        throw BadTensorHeader(f.labels + ": label tensor shape mismatch");
    s.labels = lab.data;

    auto load_layers = [&](const std::vector<std::string>& paths) {
        std::vector<OffsetField> layers;
        for (const auto& p : paths) {
            OffsetField of = detail::offset_field_from_tensor(read_nft<float>(p), p, normalized);
            if (of.height != s.height || of.width != s.width)
                throw BadTensorHeader(p + ": offset tensor shape mismatch");
            layers.push_back(std::move(of));
        }
        return layers;
    };
    s.centroid_offsets = load_layers(f.centroid_offsets);
    s.motion_offsets = load_layers(f.motion_offsets);
    return s;
}

/// Full densification of one frame: per-pixel moments once, then one
/// detection per instance label.
inline std::vector<Detection> densify_frame(const ManifestFrame& f, bool normalized,
                                            double clamp_eps = 1e-12) {
    const PredictionStack stack = load_prediction_stack(f, normalized);
    const PixelMoments cm = pixel_moments(stack.centroid_offsets);
    const PixelMoments mm = pixel_moments(stack.motion_offsets);

    std::vector<std::int32_t> labels;
    for (std::int32_t v : stack.labels)
        if (v > 0) labels.push_back(v);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

    std::vector<Detection> out;
    out.reserve(labels.size());
    for (std::int32_t label : labels)
        out.push_back(detection_from_pixels(stack, f.frame, label, cm, mm, clamp_eps));
    return out;
}

}  // namespace mitotrack::io
