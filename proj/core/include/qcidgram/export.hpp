#pragma once

#include <qcidgram/qcid.hpp>

#include <map>
#include <nlohmann/json.hpp>
#include <string>

namespace qcidgram {

struct Point {
    int x = 0;
    int y = 0;
    auto operator<=>(const Point&) const = default;
};

using Layout = std::map<VertexId, Point>;

inline constexpr int layer_spacing = 160;
inline constexpr int row_spacing = 90;

/// Layered left-to-right layout. A vertex's rank is its longest directed path to a sink
/// (the utility node in a valid model); rank 0 sits rightmost. Within a layer vertices are
/// ordered by label, then id. Throws ModelError on a cyclic graph.
Layout layout(const QcidModel& m);

/// Longest-path rank per vertex, as used by `layout`.
std::map<VertexId, int> ranks(const QcidModel& m);

/// Graphviz DOT. Shapes: decision box, chance circle, utility hexagon. Signed arcs are
/// labeled "+", "-" or "?"; informational and plain arcs carry no label.
std::string to_dot(const QcidModel& m, const Layout* coords = nullptr);

/// Structured diagram: {nodes: [{id, label, kind, x, y, contingency?, emphasis?}],
/// edges: [{from, to, sign}]}.
nlohmann::json to_diagram(const QcidModel& m, const Layout& coords);
QcidModel model_from_diagram(const nlohmann::json& doc);

} // namespace qcidgram
