#pragma once

#include <vector>

#include "mitotrack/common.hpp"

namespace mitotrack {

/// One reconstructed point of a track. det_id is kMissed (-1) for
/// gap-interpolated positions.
struct TrackPoint {
    int frame = 0;
    int det_id = kMissed;
    Vec2 pos = Vec2::Zero();
};

struct Track {
    int track_id = 0;
    int begin_frame = 0;
    int end_frame = 0;
    int parent_track_id = 0;  // 0 = no parent
    std::vector<TrackPoint> points;

    int detection_count() const {
        int n = 0;
        for (const auto& p : points)
            if (p.det_id != kMissed) ++n;
        return n;
    }
};

struct LineageTree {
    std::vector<Track> tracks;

    const Track* find(int track_id) const {
        for (const auto& t : tracks)
            if (t.track_id == track_id) return &t;
        return nullptr;
    }

    std::vector<int> children_of(int track_id) const {
        std::vector<int> out;
        for (const auto& t : tracks)
            if (t.parent_track_id == track_id) out.push_back(t.track_id);
        return out;
    }
};

}  // namespace mitotrack
