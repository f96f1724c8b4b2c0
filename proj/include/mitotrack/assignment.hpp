#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "mitotrack/costs.hpp"

namespace mitotrack {

/// Events induced by one feasible assignment of detection rows to columns.
struct ObjectEvent {
    enum class Kind { Matched, Mitosis, Missed };
    Kind kind = Kind::Missed;
    int det1 = kMissed;  // matched detection, or first daughter
    int det2 = kMissed;  // second daughter (mitosis only), det1 < det2
};

struct Assignment {
    std::vector<int> row_to_col;          // one column per detection row
    double total_cost = 0.0;
    std::vector<ObjectEvent> per_object;  // filled by resolve_events
    std::vector<int> birth_rows;          // detections assigned to the diagonal
};

/// Derives per-object events from the raw column assignment. Mitosis
/// daughters are ordered ascending so the column-swapped variant of the
/// same physical event resolves identically.
inline void resolve_events(const CostMatrix& m, Assignment& a) {
    a.per_object.assign(m.n_obj, ObjectEvent{});
    a.birth_rows.clear();
    for (int row = 0; row < m.n_det; ++row) {
        const int col = a.row_to_col[row];
        if (m.is_diag(col)) {
            a.birth_rows.push_back(row);
            continue;
        }
        ObjectEvent& ev = a.per_object[m.object_of(col)];
        if (ev.kind == ObjectEvent::Kind::Missed) {
            ev.kind = ObjectEvent::Kind::Matched;
            ev.det1 = row;
        } else {
            ev.kind = ObjectEvent::Kind::Mitosis;
            ev.det2 = row;
            if (ev.det2 < ev.det1) std::swap(ev.det1, ev.det2);
        }
    }
}

/// Canonical signature of the physical event set; column-swap symmetric
/// mitosis variants collapse to the same signature.
inline std::uint64_t event_signature(const CostMatrix& m, const Assignment& a) {
    auto mix = [](std::uint64_t h, std::uint64_t v) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    };
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (int i = 0; i < m.n_obj; ++i) {
        const ObjectEvent& ev = a.per_object[i];
        h = mix(h, static_cast<std::uint64_t>(ev.kind));
        h = mix(h, static_cast<std::uint64_t>(ev.det1 + 1));
        h = mix(h, static_cast<std::uint64_t>(ev.det2 + 1));
    }
    for (int row : a.birth_rows) h = mix(h, static_cast<std::uint64_t>(row) | (1ULL << 40));
    return h;
}

}  // namespace mitotrack
