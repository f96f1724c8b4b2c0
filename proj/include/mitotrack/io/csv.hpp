#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mitotrack/lineage.hpp"
#include "mitotrack/types.hpp"

namespace mitotrack::io {

inline constexpr const char* kDetectionsHeader =
    "frame,det_id,cx,cy,cxx,cxy,cyy,mx,my,mxx,mxy,myy,clutter,area";
inline constexpr const char* kTracksHeader = "frame,track_id,det_id,cx,cy";

namespace detail {

inline std::runtime_error parse_error(const std::string& path, int line, const std::string& what) {
    return std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double to_double(const std::string& s, const std::string& path, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw parse_error(path, line, "bad number '" + s + "'");
    }
}

inline int to_int(const std::string& s, const std::string& path, int line) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw parse_error(path, line, "bad integer '" + s + "'");
    }
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// detections.csv

inline void write_detections_csv(const std::string& path,
                                 const std::vector<std::vector<Detection>>& frames) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << kDetectionsHeader << "\n";
    for (const auto& frame : frames)
        for (const auto& d : frame) {
            using detail::fmt;
            out << d.frame << ',' << d.det_id << ',' << fmt(d.centroid.mean.x()) << ','
                << fmt(d.centroid.mean.y()) << ',' << fmt(d.centroid.cov(0, 0)) << ','
                << fmt(d.centroid.cov(0, 1)) << ',' << fmt(d.centroid.cov(1, 1)) << ','
                << fmt(d.motion_warped.mean.x()) << ',' << fmt(d.motion_warped.mean.y()) << ','
                << fmt(d.motion_warped.cov(0, 0)) << ',' << fmt(d.motion_warped.cov(0, 1)) << ','
                << fmt(d.motion_warped.cov(1, 1)) << ',' << fmt(d.clutter_prob) << ','
                << fmt(d.area) << "\n";
        }
    if (!out) throw std::runtime_error(path + ": write failed");
}

/// Reads detections grouped per frame, index 0 = smallest frame present.
/// Frame gaps are preserved as empty lists.
inline std::vector<std::vector<Detection>> read_detections_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");

    std::string line;
    int lineno = 1;
    if (!std::getline(in, line)) throw detail::parse_error(path, 1, "empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kDetectionsHeader)
        throw detail::parse_error(path, 1, "bad header, expected '" +
                                               std::string(kDetectionsHeader) + "'");

    std::map<int, std::vector<Detection>> by_frame;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 14)
            throw detail::parse_error(path, lineno,
                                      "expected 14 fields, got " + std::to_string(f.size()));
        Detection d;
        d.frame = detail::to_int(f[0], path, lineno);
        d.det_id = detail::to_int(f[1], path, lineno);
        const double cx = detail::to_double(f[2], path, lineno);
        const double cy = detail::to_double(f[3], path, lineno);
        const double cxx = detail::to_double(f[4], path, lineno);
        const double cxy = detail::to_double(f[5], path, lineno);
        const double cyy = detail::to_double(f[6], path, lineno);
        const double mx = detail::to_double(f[7], path, lineno);
        const double my = detail::to_double(f[8], path, lineno);
        const double mxx = detail::to_double(f[9], path, lineno);
        const double mxy = detail::to_double(f[10], path, lineno);
        const double myy = detail::to_double(f[11], path, lineno);
        d.clutter_prob = detail::to_double(f[12], path, lineno);
        d.area = detail::to_double(f[13], path, lineno);
        d.centroid = SpatialGaussian(Vec2(cx, cy), (Mat2() << cxx, cxy, cxy, cyy).finished());
        d.motion_warped = SpatialGaussian(Vec2(mx, my), (Mat2() << mxx, mxy, mxy, myy).finished());
        by_frame[d.frame].push_back(std::move(d));
    }

    std::vector<std::vector<Detection>> frames;
    if (by_frame.empty()) return frames;
    const int first = by_frame.begin()->first;
    const int last = by_frame.rbegin()->first;
    frames.resize(static_cast<std::size_t>(last - first + 1));
    for (auto& [frame, dets] : by_frame) frames[frame - first] = std::move(dets);
    return frames;
}

// ---------------------------------------------------------------------------
// tracks.csv + res_track.txt (lineage export / import)

inline void write_tracks_csv(const std::string& path, const LineageTree& tree) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << kTracksHeader << "\n";
    for (const auto& t : tree.tracks)
        for (const auto& p : t.points)
            out << p.frame << ',' << t.track_id << ',' << p.det_id << ','
                << detail::fmt(p.pos.x()) << ',' << detail::fmt(p.pos.y()) << "\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

inline void write_res_track(const std::string& path, const LineageTree& tree) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    for (const auto& t : tree.tracks)
        out << t.track_id << ' ' << t.begin_frame << ' ' << t.end_frame << ' '
            << t.parent_track_id << "\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

/// Rebuilds a LineageTree from tracks.csv plus res_track.txt.
inline LineageTree read_lineage(const std::string& tracks_path, const std::string& res_path) {
    LineageTree tree;
    {
        std::ifstream in(res_path);
        if (!in) throw std::runtime_error(res_path + ": cannot open");
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            Track t;
            std::istringstream ss(line);
            if (!(ss >> t.track_id >> t.begin_frame >> t.end_frame >> t.parent_track_id))
                throw detail::parse_error(res_path, lineno, "expected 'label begin end parent'");
            tree.tracks.push_back(std::move(t));
        }
    }

    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < tree.tracks.size(); ++i) index[tree.tracks[i].track_id] = i;

    std::ifstream in(tracks_path);
    if (!in) throw std::runtime_error(tracks_path + ": cannot open");
    std::string line;
    int lineno = 1;
    if (!std::getline(in, line)) throw detail::parse_error(tracks_path, 1, "empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTracksHeader)
        throw detail::parse_error(tracks_path, 1,
                                  "bad header, expected '" + std::string(kTracksHeader) + "'");
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 5)
            throw detail::parse_error(tracks_path, lineno,
                                      "expected 5 fields, got " + std::to_string(f.size()));
        TrackPoint p;
        p.frame = detail::to_int(f[0], tracks_path, lineno);
        const int track_id = detail::to_int(f[1], tracks_path, lineno);
        p.det_id = detail::to_int(f[2], tracks_path, lineno);
        p.pos = Vec2(detail::to_double(f[3], tracks_path, lineno),
                     detail::to_double(f[4], tracks_path, lineno));
        const auto it = index.find(track_id);
        if (it == index.end())
            throw detail::parse_error(tracks_path, lineno,
                                      "track " + std::to_string(track_id) + " not in lineage file");
        tree.tracks[it->second].points.push_back(std::move(p));
    }
    for (auto& t : tree.tracks)
        std::sort(t.points.begin(), t.points.end(),
                  [](const TrackPoint& a, const TrackPoint& b) { return a.frame < b.frame; });
    return tree;
}

}  // namespace mitotrack::io
