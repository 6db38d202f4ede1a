#include <qcidgram/export.hpp>

#include <algorithm>
#include <functional>
#include <sstream>

namespace qcidgram {

std::map<VertexId, int> ranks(const QcidModel& m)
{
    const auto& g = m.graph;
    std::map<VertexId, int> rank;
    std::map<VertexId, int> state;  // 0 unvisited, 1 on stack, 2 done
    std::function<int(VertexId)> visit = [&](VertexId v) -> int {
        if (state[v] == 2) {
            return rank[v];
        }
        if (state[v] == 1) {
            throw ModelError("cannot lay out a cyclic model (vertex " + to_string(v) + ")");
        }
        state[v] = 1;
        int r = 0;
        for (const auto& e : g.out_edges(v)) {
            r = std::max(r, visit(e.to) + 1);
        }
        state[v] = 2;
        rank[v] = r;
        return r;
    };
    for (const auto& [v, _] : g.vertices()) {
        visit(v);
    }
    return rank;
}

Layout layout(const QcidModel& m)
{
    auto rank = ranks(m);
    int max_rank = 0;
    std::map<int, std::vector<VertexId>> layers;
    for (const auto& [v, r] : rank) {
        layers[r].push_back(v);
        max_rank = std::max(max_rank, r);
    }
    Layout out;
    for (auto& [r, members] : layers) {
        std::sort(members.begin(), members.end(), [&](VertexId a, VertexId b) {
            const auto& la = m.graph.label(a);
            const auto& lb = m.graph.label(b);
            return la != lb ? la < lb : a < b;
        });
        for (std::size_t i = 0; i < members.size(); ++i) {
            out[members[i]] = {(max_rank - r) * layer_spacing, static_cast<int>(i) * row_spacing};
        }
    }
    return out;
}

namespace {

std::string dot_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out;
}

const char* shape(NodeKind k)
{
    switch (k) {
    case NodeKind::decision: return "box";
    case NodeKind::chance: return "circle";
    case NodeKind::utility: return "hexagon";
    }
    return "circle";
}

const char* sign_text(EdgeLabel l)
{
    switch (l) {
    case EdgeLabel::plus: return "+";
    case EdgeLabel::minus: return "-";
    case EdgeLabel::unknown: return "?";
    default: return nullptr;
    }
}

} // namespace

std::string to_dot(const QcidModel& m, const Layout* coords)
{
    std::ostringstream out;
    out << "digraph qcid {\n";
    out << "  rankdir=LR;\n";
    out << "  node [fontname=\"Helvetica\"];\n";
    for (const auto& [v, label] : m.graph.vertices()) {
        auto kind = m.kinds.at(v);
        out << "  n" << v.value << " [label=\"" << dot_escape(label.text()) << "\", shape=" << shape(kind);
        if (kind == NodeKind::chance) {
            if (m.emphasized.contains(v)) {
                out << ", style=filled, fillcolor=black, fontcolor=white";
            } else {
                out << ", style=filled, fillcolor=lightgray";
            }
        }
        if (coords) {
            const auto& p = coords->at(v);
            out << ", pos=\"" << p.x << "," << -p.y << "\"";
        }
        out << "];\n";
    }
    for (const auto& e : m.graph.edges()) {
        out << "  n" << e.from.value << " -> n" << e.to.value;
        if (const char* s = sign_text(e.label)) {
            out << " [label=\"" << s << "\"]";
        } else if (e.label == EdgeLabel::info) {
            out << " [style=dashed]";
        }
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

nlohmann::json to_diagram(const QcidModel& m, const Layout& coords)
{
    auto nodes = nlohmann::json::array();
    for (const auto& [v, label] : m.graph.vertices()) {
        const auto& p = coords.at(v);
        nlohmann::json node{{"id", v.value},
                            {"label", label.text()},
                            {"kind", to_string(m.kinds.at(v))},
                            {"x", p.x},
                            {"y", p.y}};
        if (auto it = m.contingency.find(v); it != m.contingency.end()) {
            node["contingency"] = {{"group", it->second.group}, {"condition", it->second.condition}};
        }
        if (m.emphasized.contains(v)) {
            node["emphasis"] = true;
        }
        nodes.push_back(std::move(node));
    }
    auto edges = nlohmann::json::array();
    for (const auto& e : m.graph.edges()) {
        edges.push_back({{"from", e.from.value}, {"to", e.to.value}, {"sign", to_string(e.label)}});
    }
    return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

QcidModel model_from_diagram(const nlohmann::json& doc)
{
    QcidModel m;
    try {
        for (const auto& n : doc.at("nodes")) {
            VertexId v{n.at("id").get<std::uint32_t>()};
            Symbol label(n.at("label").get<std::string>());
            m.graph.add_vertex(v, label);
            m.kinds.emplace(v, node_kind_from_string(n.at("kind").get<std::string>()));
            if (n.contains("contingency")) {
                m.contingency.emplace(v, ContingencyTag{n.at("contingency").at("group").get<std::string>(),
                                                        n.at("contingency").at("condition").get<std::string>()});
            } else if (auto tag = parse_contingency(label)) {
                m.contingency.emplace(v, *tag);
            }
            if (n.value("emphasis", false)) {
                m.emphasized.insert(v);
            }
        }
        for (const auto& e : doc.at("edges")) {
            m.graph.add_edge({VertexId{e.at("from").get<std::uint32_t>()},
                              VertexId{e.at("to").get<std::uint32_t>()},
                              edge_label_from_string(e.value("sign", std::string("plain")))});
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ModelError(std::string("malformed diagram: ") + ex.what());
    } catch (const GraphError& ex) {
        throw ModelError(std::string("malformed diagram: ") + ex.what());
    } catch (const TaxonomyError& ex) {
        throw ModelError(std::string("malformed diagram: ") + ex.what());
    }
    return m;
}

} // namespace qcidgram
