#include <qcidgram/graph.hpp>

#include <algorithm>
#include <deque>

namespace qcidgram {

Symbol::Symbol(std::string text) : text_(std::move(text))
{
    if (text_.empty()) {
        throw GraphError("symbol text must be nonempty");
    }
}

bool Symbol::is_nonterminal() const noexcept
{
    return text_.size() > 2 && text_.front() == '<' && text_.back() == '>';
}

std::string to_string(VertexId v) { return std::to_string(v.value); }

std::string_view to_string(EdgeLabel label) noexcept
{
    switch (label) {
    case EdgeLabel::plus: return "plus";
    case EdgeLabel::minus: return "minus";
    case EdgeLabel::unknown: return "unknown";
    case EdgeLabel::info: return "info";
    case EdgeLabel::plain: return "plain";
    }
    return "plain";
}

EdgeLabel edge_label_from_string(std::string_view text)
{
    for (auto label : {EdgeLabel::plus, EdgeLabel::minus, EdgeLabel::unknown, EdgeLabel::info,
                       EdgeLabel::plain}) {
        if (to_string(label) == text) {
            return label;
        }
    }
    throw GraphError("unknown edge label '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------

void LabeledGraph::require_vertex(VertexId id) const
{
    if (!has_vertex(id)) {
        throw GraphError("unknown vertex id " + to_string(id));
    }
}

void LabeledGraph::add_vertex(VertexId id, Symbol label)
{
    if (has_vertex(id)) {
        throw GraphError("duplicate vertex id " + to_string(id));
    }
    labels_.emplace(id, std::move(label));
}

void LabeledGraph::remove_vertex(VertexId id)
{
    require_vertex(id);
    for (const auto& e : out_edges(id)) {
        remove_edge(e);
    }
    for (const auto& e : in_edges(id)) {
        remove_edge(e);
    }
    labels_.erase(id);
    out_.erase(id);
    in_.erase(id);
}

void LabeledGraph::add_edge(Edge e)
{
    if (!insert_edge(e)) {
        throw GraphError("duplicate edge " + to_string(e.from) + " -> " + to_string(e.to) + " (" +
                         std::string(to_string(e.label)) + ")");
    }
}

bool LabeledGraph::insert_edge(Edge e)
{
    require_vertex(e.from);
    require_vertex(e.to);
    if (!edges_.insert(e).second) {
        return false;
    }
    out_[e.from].insert(e);
    in_[e.to].insert(e);
    return true;
}

void LabeledGraph::remove_edge(const Edge& e)
{
    if (edges_.erase(e) == 0) {
        return;
    }
    out_[e.from].erase(e);
    in_[e.to].erase(e);
}

const Symbol& LabeledGraph::label(VertexId id) const
{
    auto it = labels_.find(id);
    if (it == labels_.end()) {
        throw GraphError("unknown vertex id " + to_string(id));
    }
    return it->second;
}

std::vector<Edge> LabeledGraph::out_edges(VertexId id) const
{
    auto it = out_.find(id);
    if (it == out_.end()) {
        return {};
    }
    return {it->second.begin(), it->second.end()};
}

std::vector<Edge> LabeledGraph::in_edges(VertexId id) const
{
    auto it = in_.find(id);
    if (it == in_.end()) {
        return {};
    }
    return {it->second.begin(), it->second.end()};
}

std::size_t LabeledGraph::degree(VertexId id) const
{
    std::size_t d = 0;
    if (auto it = out_.find(id); it != out_.end()) {
        d += it->second.size();
    }
    if (auto it = in_.find(id); it != in_.end()) {
        d += it->second.size();
    }
    return d;
}

std::set<VertexId> LabeledGraph::vertex_set() const
{
    std::set<VertexId> out;
    for (const auto& [id, _] : labels_) {
        out.insert(id);
    }
    return out;
}

VertexId LabeledGraph::next_free_id() const
{
    if (labels_.empty()) {
        return VertexId{0};
    }
    return VertexId{labels_.rbegin()->first.value + 1};
}

std::vector<VertexId> LabeledGraph::find_by_label(const Symbol& label) const
{
    std::vector<VertexId> out;
    for (const auto& [id, l] : labels_) {
        if (l == label) {
            out.push_back(id);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

LabeledGraph span(const std::set<VertexId>& vertex_subset, const LabeledGraph& g)
{
    LabeledGraph out;
    for (auto v : vertex_subset) {
        out.add_vertex(v, g.label(v));
    }
    for (auto v : vertex_subset) {
        for (const auto& e : g.out_edges(v)) {
            if (vertex_subset.contains(e.to)) {
                out.add_edge(e);
            }
        }
    }
    return out;
}

namespace {

std::set<VertexId> reach_within(VertexId start, const std::set<VertexId>& allowed,
                                const LabeledGraph& g)
{
    std::set<VertexId> seen{start};
    std::deque<VertexId> queue{start};
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        auto visit = [&](VertexId w) {
            if (allowed.contains(w) && seen.insert(w).second) {
                queue.push_back(w);
            }
        };
        for (const auto& e : g.out_edges(v)) {
            visit(e.to);
        }
        for (const auto& e : g.in_edges(v)) {
            visit(e.from);
        }
    }
    return seen;
}

} // namespace

bool chain_exists(VertexId from, VertexId to, const LabeledGraph& g)
{
    if (!g.has_vertex(from)) {
        throw GraphError("unknown vertex id " + to_string(from));
    }
    if (!g.has_vertex(to)) {
        throw GraphError("unknown vertex id " + to_string(to));
    }
    return reach_within(from, g.vertex_set(), g).contains(to);
}

std::vector<std::set<VertexId>> connected_components(const std::set<VertexId>& restriction,
                                                     const LabeledGraph& g)
{
    for (auto v : restriction) {
        if (!g.has_vertex(v)) {
            throw GraphError("unknown vertex id " + to_string(v));
        }
    }
    std::vector<std::set<VertexId>> classes;
    std::set<VertexId> assigned;
    for (auto v : restriction) {
        if (assigned.contains(v)) {
            continue;
        }
        auto cls = reach_within(v, restriction, g);
        assigned.insert(cls.begin(), cls.end());
        classes.push_back(std::move(cls));
    }
    return classes;
}

// ---------------------------------------------------------------------------

namespace {

struct IsoSearch {
    const LabeledGraph& a;
    const LabeledGraph& b;
    std::vector<VertexId> order;
    std::map<VertexId, std::vector<VertexId>> candidates;
    std::map<VertexId, VertexId> forward;
    std::set<VertexId> used;

    bool consistent(VertexId va, VertexId vb) const
    {
        auto image = [&](VertexId w) -> std::optional<VertexId> {
            if (w == va) {
                return vb;
            }
            auto it = forward.find(w);
            if (it == forward.end()) {
                return std::nullopt;
            }
            return it->second;
        };
        for (const auto& e : a.out_edges(va)) {
            auto target = image(e.to);
            if (target && !b.has_edge({vb, *target, e.label})) {
                return false;
            }
        }
        for (const auto& e : a.in_edges(va)) {
            auto source = image(e.from);
            if (e.from != va && source && !b.has_edge({*source, vb, e.label})) {
                return false;
            }
        }
        return true;
    }

    bool search(std::size_t depth)
    {
        if (depth == order.size()) {
            return true;
        }
        auto va = order[depth];
        for (auto vb : candidates[va]) {
            if (used.contains(vb) || !consistent(va, vb)) {
                continue;
            }
            forward[va] = vb;
            used.insert(vb);
            if (search(depth + 1)) {
                return true;
            }
            forward.erase(va);
            used.erase(vb);
        }
        return false;
    }
};

using Signature = std::tuple<Symbol, std::multiset<EdgeLabel>, std::multiset<EdgeLabel>>;

Signature signature(const LabeledGraph& g, VertexId v)
{
    std::multiset<EdgeLabel> outs;
    std::multiset<EdgeLabel> ins;
    for (const auto& e : g.out_edges(v)) {
        outs.insert(e.label);
    }
    for (const auto& e : g.in_edges(v)) {
        ins.insert(e.label);
    }
    return {g.label(v), outs, ins};
}

} // namespace

std::optional<std::map<VertexId, VertexId>> find_isomorphism(const LabeledGraph& a,
                                                             const LabeledGraph& b)
{
    if (a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count()) {
        return std::nullopt;
    }
    std::map<Signature, std::vector<VertexId>> b_by_sig;
    for (const auto& [v, _] : b.vertices()) {
        b_by_sig[signature(b, v)].push_back(v);
    }
    IsoSearch s{a, b, {}, {}, {}, {}};
    for (const auto& [v, _] : a.vertices()) {
        auto it = b_by_sig.find(signature(a, v));
        if (it == b_by_sig.end()) {
            return std::nullopt;
        }
        s.candidates[v] = it->second;
        s.order.push_back(v);
    }
    // Most constrained vertices first.
    std::stable_sort(s.order.begin(), s.order.end(), [&](VertexId x, VertexId y) {
        return s.candidates[x].size() < s.candidates[y].size();
    });
    if (!s.search(0)) {
        return std::nullopt;
    }
    return s.forward;
}

bool isomorphic(const LabeledGraph& a, const LabeledGraph& b)
{
    return find_isomorphism(a, b).has_value();
}

// ---------------------------------------------------------------------------

nlohmann::json graph_to_json(const LabeledGraph& g)
{
    auto vertices = nlohmann::json::array();
    for (const auto& [id, label] : g.vertices()) {
        vertices.push_back({{"id", id.value}, {"label", label.text()}});
    }
    auto edges = nlohmann::json::array();
    for (const auto& e : g.edges()) {
        edges.push_back({{"from", e.from.value}, {"to", e.to.value}, {"label", to_string(e.label)}});
    }
    return {{"vertices", std::move(vertices)}, {"edges", std::move(edges)}};
}

LabeledGraph graph_from_json(const nlohmann::json& doc)
{
    LabeledGraph g;
    try {
        for (const auto& v : doc.at("vertices")) {
            g.add_vertex(VertexId{v.at("id").get<std::uint32_t>()}, Symbol(v.at("label").get<std::string>()));
        }
        if (doc.contains("edges")) {
            for (const auto& e : doc.at("edges")) {
                g.add_edge({VertexId{e.at("from").get<std::uint32_t>()},
                            VertexId{e.at("to").get<std::uint32_t>()},
                            edge_label_from_string(e.value("label", std::string("plain")))});
            }
        }
    } catch (const nlohmann::json::exception& ex) {
        throw GraphError(std::string("malformed graph document: ") + ex.what());
    }
    return g;
}

} // namespace qcidgram
