#include <qcidgram/qcid.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace qcidgram {

std::optional<ContingencyTag> parse_contingency(const Symbol& label)
{
    const auto& text = label.text();
    auto bar = text.find(" | ");
    if (bar == std::string::npos || bar == 0 || bar + 3 >= text.size()) {
        return std::nullopt;
    }
    return ContingencyTag{text.substr(0, bar), text.substr(bar + 3)};
}

std::vector<VertexId> QcidModel::of_kind(NodeKind kind) const
{
    std::vector<VertexId> out;
    for (const auto& [v, k] : kinds) {
        if (k == kind) {
            out.push_back(v);
        }
    }
    return out;
}

QcidModel classify_model(const LabeledGraph& g, const Taxonomy& t)
{
    QcidModel m{g, {}, {}, {}};
    for (const auto& [v, label] : g.vertices()) {
        auto tag = parse_contingency(label);
        Symbol base = tag ? Symbol(tag->group) : label;
        try {
            m.kinds.emplace(v, t.kind_of(base));
        } catch (const TaxonomyError& ex) {
            throw ModelError("vertex " + to_string(v) + " ('" + label.text() + "') has no node kind: " +
                             ex.what());
        }
        if (tag) {
            m.contingency.emplace(v, *tag);
        }
        if (t.emphasized(base)) {
            m.emphasized.insert(v);
        }
    }
    return m;
}

std::string_view to_string(CheckStatus s) noexcept
{
    switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_applicable: return "n/a";
    }
    return "n/a";
}

// ---------------------------------------------------------------------------

namespace {

bool is_sign(EdgeLabel l)
{
    return l == EdgeLabel::plus || l == EdgeLabel::minus || l == EdgeLabel::unknown;
}

std::optional<std::vector<VertexId>> find_cycle(const LabeledGraph& g)
{
    enum class Color { white, grey, black };
    std::map<VertexId, Color> color;
    std::vector<VertexId> stack;
    std::optional<std::vector<VertexId>> cycle;

    std::function<void(VertexId)> visit = [&](VertexId v) {
        color[v] = Color::grey;
        stack.push_back(v);
        for (const auto& e : g.out_edges(v)) {
            if (cycle) {
                return;
            }
            auto c = color[e.to];
            if (c == Color::grey) {
                auto start = std::find(stack.begin(), stack.end(), e.to);
                cycle = std::vector<VertexId>(start, stack.end());
                return;
            }
            if (c == Color::white) {
                visit(e.to);
            }
        }
        stack.pop_back();
        color[v] = Color::black;
    };
    for (const auto& [v, _] : g.vertices()) {
        if (color[v] == Color::white) {
            visit(v);
        }
        if (cycle) {
            break;
        }
    }
    return cycle;
}

// Vertices with a directed path to one of `targets`, walking backwards only through
// vertices accepted by `passable` (targets themselves always count).
std::set<VertexId> reaching(const LabeledGraph& g, const std::vector<VertexId>& targets,
                            const std::function<bool(VertexId)>& passable)
{
    std::set<VertexId> seen(targets.begin(), targets.end());
    std::deque<VertexId> queue(targets.begin(), targets.end());
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (const auto& e : g.in_edges(v)) {
            if (!seen.contains(e.from)) {
                seen.insert(e.from);
                if (passable(e.from)) {
                    queue.push_back(e.from);
                }
            }
        }
    }
    return seen;
}

PropertyResult row(std::string id, std::string title)
{
    PropertyResult r;
    r.id = std::move(id);
    r.title = std::move(title);
    return r;
}

void settle(PropertyResult& r)
{
    r.status = r.witness_vertices.empty() && r.witness_edges.empty() ? CheckStatus::pass : CheckStatus::fail;
}

} // namespace

PropertyReport check_properties(const QcidModel& m)
{
    const auto& g = m.graph;
    auto kind = [&](VertexId v) { return m.kinds.at(v); };
    const auto utilities = m.of_kind(NodeKind::utility);
    PropertyReport report;

    auto acyclic = row("1", "directed graph is acyclic");
    if (auto cycle = find_cycle(g)) {
        acyclic.witness_vertices = *cycle;
        acyclic.note = "cycle found";
    }
    settle(acyclic);

    // Reachability used by 2 and 7: paths to a utility whose intermediate nodes are not decisions.
    auto chance_reach =
        reaching(g, utilities, [&](VertexId v) { return kind(v) != NodeKind::decision; });

    auto dominated = row("2", "no qualitatively dominated decision nodes");
    dominated.proxy = true;
    dominated.note = "structural proxy: each decision reaches the utility directly or via chance nodes "
                     "and touches a signed arc";
    for (auto d : m.of_kind(NodeKind::decision)) {
        bool reaches = false;
        bool signed_arc = false;
        for (const auto& e : g.out_edges(d)) {
            if (kind(e.to) == NodeKind::utility ||
                (kind(e.to) == NodeKind::chance && chance_reach.contains(e.to))) {
                reaches = true;
            }
            signed_arc = signed_arc || is_sign(e.label);
        }
        for (const auto& e : g.in_edges(d)) {
            signed_arc = signed_arc || is_sign(e.label);
        }
        if (!reaches || !signed_arc) {
            dominated.witness_vertices.push_back(d);
        }
    }
    settle(dominated);

    auto unambiguous = row("3", "at most one derivation per input");
    unambiguous.status = CheckStatus::not_applicable;
    unambiguous.note = "grammar-level property; checked by repeated derivation, not per model";

    auto single_utility = row("4", "exactly one overall utility node");
    if (utilities.size() != 1) {
        single_utility.witness_vertices = utilities;
        single_utility.note = std::to_string(utilities.size()) + " utility nodes";
    }
    single_utility.status = utilities.size() == 1 ? CheckStatus::pass : CheckStatus::fail;

    auto no_successors = row("5", "no successors to the utility node");
    for (auto u : utilities) {
        auto outs = g.out_edges(u);
        no_successors.witness_edges.insert(no_successors.witness_edges.end(), outs.begin(), outs.end());
    }
    settle(no_successors);

    auto all_reach = row("6", "all nodes have a path to the utility node");
    auto any_reach = reaching(g, utilities, [](VertexId) { return true; });
    for (const auto& [v, _] : g.vertices()) {
        if (!any_reach.contains(v)) {
            all_reach.witness_vertices.push_back(v);
        }
    }
    settle(all_reach);

    auto chance_paths = row("7", "chance nodes reach the value node with no intervening decision");
    for (auto c : m.of_kind(NodeKind::chance)) {
        if (!chance_reach.contains(c)) {
            chance_paths.witness_vertices.push_back(c);
        }
    }
    settle(chance_paths);

    auto signs = row("signs", "arc labels follow the notation");
    signs.note = "arcs into decisions are informational; chance arcs into chance or utility nodes carry a sign";
    for (const auto& e : g.edges()) {
        auto from = kind(e.from);
        auto to = kind(e.to);
        bool ok = true;
        if (to == NodeKind::decision) {
            ok = e.label == EdgeLabel::info;
        } else if (from == NodeKind::chance) {
            ok = is_sign(e.label);
        } else if (from == NodeKind::decision) {
            ok = e.label != EdgeLabel::info;
        }
        if (!ok) {
            signs.witness_edges.push_back(e);
        }
    }
    settle(signs);

    auto contingency = row("contingency", "contingent nodes of a group have distinct conditions");
    std::map<std::string, std::map<std::string, std::vector<VertexId>>> groups;
    for (const auto& [v, tag] : m.contingency) {
        groups[tag.group][tag.condition].push_back(v);
    }
    for (const auto& [_, conditions] : groups) {
        for (const auto& [__, members] : conditions) {
            if (members.size() > 1) {
                contingency.witness_vertices.insert(contingency.witness_vertices.end(), members.begin(),
                                                    members.end());
            }
        }
    }
    settle(contingency);

    report.results = {acyclic,        dominated, unambiguous, single_utility, no_successors,
                      all_reach,      chance_paths, signs,     contingency};
    return report;
}

const PropertyResult& PropertyReport::get(std::string_view id) const
{
    for (const auto& r : results) {
        if (r.id == id) {
            return r;
        }
    }
    throw ModelError("no property row '" + std::string(id) + "'");
}

bool PropertyReport::all_pass() const
{
    return std::all_of(results.begin(), results.end(),
                       [](const PropertyResult& r) { return r.status != CheckStatus::fail; });
}

nlohmann::json PropertyReport::to_json() const
{
    auto rows = nlohmann::json::array();
    for (const auto& r : results) {
        auto vertices = nlohmann::json::array();
        for (auto v : r.witness_vertices) {
            vertices.push_back(v.value);
        }
        auto edges = nlohmann::json::array();
        for (const auto& e : r.witness_edges) {
            edges.push_back({{"from", e.from.value}, {"to", e.to.value}, {"label", to_string(e.label)}});
        }
        rows.push_back({{"id", r.id},
                        {"title", r.title},
                        {"status", to_string(r.status)},
                        {"proxy", r.proxy},
                        {"witness_vertices", std::move(vertices)},
                        {"witness_edges", std::move(edges)},
                        {"note", r.note}});
    }
    return {{"properties", std::move(rows)}, {"all_pass", all_pass()}};
}

std::string PropertyReport::to_table(const QcidModel& m) const
{
    auto name = [&](VertexId v) {
        return m.graph.has_vertex(v) ? m.graph.label(v).text() : "#" + to_string(v);
    };
    std::ostringstream out;
    out << "property     status      check\n";
    for (const auto& r : results) {
        std::string status(to_string(r.status));
        if (r.proxy) {
            status = "proxy-" + status;
        }
        out << r.id << std::string(r.id.size() < 13 ? 13 - r.id.size() : 1, ' ') << status
            << std::string(status.size() < 12 ? 12 - status.size() : 1, ' ') << r.title << '\n';
        if (r.status != CheckStatus::fail) {
            continue;
        }
        std::string witness;
        for (auto v : r.witness_vertices) {
            witness += (witness.empty() ? "" : ", ") + name(v);
        }
        for (const auto& e : r.witness_edges) {
            witness += (witness.empty() ? "" : ", ") + name(e.from) + " -> " + name(e.to) + " (" +
                       std::string(to_string(e.label)) + ")";
        }
        out << "             witness: " << (witness.empty() ? r.note : witness) << '\n';
    }
    return out.str();
}

} // namespace qcidgram
