#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <regex>
#include <sstream>

namespace oracle {

using qcidgram::EdgeLabel;
using qcidgram::Region;

std::vector<VertexMap> all_maps(const LabeledGraph& pattern, const std::set<VertexId>& domain,
                                const LabeledGraph& host, const Taxonomy& t, const VertexMap& fixed)
{
    std::vector<VertexId> dom(domain.begin(), domain.end());
    std::vector<VertexId> hosts;
    for (const auto& [v, _] : host.vertices()) {
        hosts.push_back(v);
    }
    std::vector<VertexMap> out;
    if (!dom.empty() && hosts.empty()) {
        return out;
    }
    std::vector<std::size_t> digits(dom.size(), 0);
    while (true) {
        VertexMap full = fixed;
        bool ok = true;
        for (std::size_t i = 0; i < dom.size(); ++i) {
            full[dom[i]] = hosts[digits[i]];
        }
        std::set<VertexId> images;
        for (const auto& [_, hv] : full) {
            images.insert(hv);
        }
        ok = images.size() == full.size();
        for (std::size_t i = 0; ok && i < dom.size(); ++i) {
            ok = t.label_matches(host.label(full[dom[i]]), pattern.label(dom[i]));
        }
        for (const auto& e : pattern.edges()) {
            if (!ok) {
                break;
            }
            if (full.contains(e.from) && full.contains(e.to) &&
                (domain.contains(e.from) || domain.contains(e.to))) {
                ok = host.has_edge({full[e.from], full[e.to], e.label});
            }
        }
        if (ok) {
            VertexMap part;
            for (auto v : dom) {
                part[v] = full[v];
            }
            out.push_back(part);
        }
        std::size_t k = 0;
        while (k < digits.size() && ++digits[k] == hosts.size()) {
            digits[k++] = 0;
        }
        if (k == digits.size()) {
            break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool dangling_free(const Production& p, const VertexMap& anchor, const std::vector<VertexMap>& extensions,
                   const LabeledGraph& host)
{
    std::set<VertexId> doomed;
    for (const auto& [pv, hv] : anchor) {
        if (p.region_of(pv) == Region::left) {
            doomed.insert(hv);
        }
    }
    std::vector<VertexMap> maps{anchor};
    for (const auto& ext : extensions) {
        VertexMap m = anchor;
        m.insert(ext.begin(), ext.end());
        maps.push_back(m);
    }
    for (const auto& he : host.edges()) {
        if (!doomed.contains(he.from) && !doomed.contains(he.to)) {
            continue;
        }
        bool explained = false;
        for (const auto& m : maps) {
            for (const auto& pe : p.pattern().edges()) {
                bool touches_left = p.region_of(pe.from) == Region::left || p.region_of(pe.to) == Region::left;
                if (!touches_left || !m.contains(pe.from) || !m.contains(pe.to)) {
                    continue;
                }
                if (m.at(pe.from) == he.from && m.at(pe.to) == he.to && pe.label == he.label) {
                    explained = true;
                }
            }
        }
        if (!explained) {
            return false;
        }
    }
    return true;
}

bool has_cycle(const LabeledGraph& g)
{
    bool found = false;
    std::function<void(VertexId, VertexId, std::set<VertexId>&)> walk = [&](VertexId start, VertexId at,
                                                                             std::set<VertexId>& seen) {
        for (const auto& e : g.edges()) {
            if (found || e.from != at) {
                continue;
            }
            if (e.to == start) {
                found = true;
                return;
            }
            if (!seen.contains(e.to)) {
                seen.insert(e.to);
                walk(start, e.to, seen);
                seen.erase(e.to);
            }
        }
    };
    for (const auto& [v, _] : g.vertices()) {
        std::set<VertexId> seen{v};
        walk(v, v, seen);
        if (found) {
            return true;
        }
    }
    return false;
}

bool is_cycle(const LabeledGraph& g, const std::vector<VertexId>& cycle)
{
    if (cycle.empty()) {
        return false;
    }
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        auto from = cycle[i];
        auto to = cycle[(i + 1) % cycle.size()];
        bool edge = false;
        for (const auto& e : g.edges()) {
            edge = edge || (e.from == from && e.to == to);
        }
        if (!edge) {
            return false;
        }
    }
    return true;
}

std::map<VertexId, std::set<VertexId>> closure(const LabeledGraph& g, const std::set<VertexId>& through)
{
    std::vector<VertexId> vs;
    for (const auto& [v, _] : g.vertices()) {
        vs.push_back(v);
    }
    std::size_t n = vs.size();
    std::map<VertexId, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) {
        index[vs[i]] = i;
    }
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (const auto& e : g.edges()) {
        r[index[e.from]][index[e.to]] = true;
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!through.contains(vs[k])) {
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (r[i][k] && r[k][j]) {
                    r[i][j] = true;
                }
            }
        }
    }
    std::map<VertexId, std::set<VertexId>> out;
    for (std::size_t i = 0; i < n; ++i) {
        out[vs[i]];
        for (std::size_t j = 0; j < n; ++j) {
            if (r[i][j]) {
                out[vs[i]].insert(vs[j]);
            }
        }
    }
    return out;
}

std::vector<std::set<VertexId>> components(const std::set<VertexId>& restriction, const LabeledGraph& g)
{
    std::map<VertexId, VertexId> parent;
    for (auto v : restriction) {
        parent[v] = v;
    }
    std::function<VertexId(VertexId)> root = [&](VertexId v) {
        return parent[v] == v ? v : parent[v] = root(parent[v]);
    };
    for (const auto& e : g.edges()) {
        if (restriction.contains(e.from) && restriction.contains(e.to)) {
            auto a = root(e.from);
            auto b = root(e.to);
            if (a != b) {
                parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }
    std::map<VertexId, std::set<VertexId>> groups;
    for (auto v : restriction) {
        groups[root(v)].insert(v);
    }
    std::vector<std::set<VertexId>> out;
    for (auto& [_, members] : groups) {
        out.push_back(std::move(members));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool isomorphic(const LabeledGraph& a, const LabeledGraph& b)
{
    if (a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count()) {
        return false;
    }
    std::vector<VertexId> va;
    std::vector<VertexId> vb;
    for (const auto& [v, _] : a.vertices()) {
        va.push_back(v);
    }
    for (const auto& [v, _] : b.vertices()) {
        vb.push_back(v);
    }
    std::sort(vb.begin(), vb.end());
    do {
        std::map<VertexId, VertexId> m;
        bool ok = true;
        for (std::size_t i = 0; i < va.size() && ok; ++i) {
            m[va[i]] = vb[i];
            ok = a.label(va[i]) == b.label(vb[i]);
        }
        for (const auto& e : a.edges()) {
            ok = ok && b.has_edge({m[e.from], m[e.to], e.label});
        }
        if (ok) {
            return true;
        }
    } while (std::next_permutation(vb.begin(), vb.end()));
    return false;
}

DotGraph read_dot(const std::string& text)
{
    static const std::regex node_re(R"re(^\s*(n\d+) \[label="((?:[^"\\]|\\.)*)", shape=(\w+).*\];)re");
    static const std::regex edge_re(R"re(^\s*(n\d+) -> (n\d+)(?: \[(.*)\])?;)re");
    static const std::regex sign_re(R"re(label="([^"]*)")re");
    DotGraph g;
    std::istringstream in(text);
    std::string line;
    std::smatch m;
    while (std::getline(in, line)) {
        if (std::regex_search(line, m, edge_re)) {
            DotEdge e{m[1], m[2], "", false};
            std::string attrs = m[3];
            std::smatch s;
            if (std::regex_search(attrs, s, sign_re)) {
                e.sign = s[1];
            }
            e.dashed = attrs.find("dashed") != std::string::npos;
            g.edges.push_back(e);
        } else if (std::regex_search(line, m, node_re)) {
            g.nodes[m[1]] = {m[2], m[3]};
        }
    }
    return g;
}

// ---------------------------------------------------------------------------

Taxonomy toy_taxonomy()
{
    return Taxonomy::parse(R"({
        "classes": [
            {"name": "<r>", "kind": "chance"},
            {"name": "<a>", "parent": "<r>"},
            {"name": "<a1>", "parent": "<a>"},
            {"name": "<a2>", "parent": "<a>"},
            {"name": "<b>", "parent": "<r>"}
        ],
        "terminals": [
            {"term": "x1", "classes": ["<a1>"]}, {"term": "x2", "classes": ["<a1>"]},
            {"term": "x3", "classes": ["<a1>"]}, {"term": "y1", "classes": ["<a2>"]},
            {"term": "y2", "classes": ["<a2>"]}, {"term": "z1", "classes": ["<b>"]},
            {"term": "z2", "classes": ["<b>"]}
        ]
    })");
}

std::vector<Symbol> toy_terms()
{
    return {Symbol("x1"), Symbol("x2"), Symbol("x3"), Symbol("y1"), Symbol("y2"), Symbol("z1"), Symbol("z2")};
}

std::vector<Symbol> toy_classes()
{
    return {Symbol("<r>"), Symbol("<a>"), Symbol("<a1>"), Symbol("<a2>"), Symbol("<b>")};
}

namespace {

const EdgeLabel all_labels[] = {EdgeLabel::plus, EdgeLabel::minus, EdgeLabel::unknown, EdgeLabel::info,
                                EdgeLabel::plain};

Symbol random_label(std::mt19937& rng, bool allow_classes)
{
    auto terms = toy_terms();
    auto classes = toy_classes();
    std::uniform_int_distribution<int> coin(0, 2);
    if (allow_classes && coin(rng) != 0) {
        return classes[std::uniform_int_distribution<std::size_t>(0, classes.size() - 1)(rng)];
    }
    return terms[std::uniform_int_distribution<std::size_t>(0, terms.size() - 1)(rng)];
}

EdgeLabel random_edge_label(std::mt19937& rng)
{
    // A narrow alphabet keeps random edges likely to line up.
    return all_labels[std::uniform_int_distribution<int>(0, 1)(rng)];
}

} // namespace

LabeledGraph random_host(std::mt19937& rng, std::size_t max_vertices, double edge_probability)
{
    LabeledGraph g;
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_vertices)(rng);
    for (std::size_t i = 0; i < n; ++i) {
        g.add_vertex(VertexId{static_cast<std::uint32_t>(i)}, random_label(rng, false));
    }
    std::bernoulli_distribution edge(edge_probability);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && edge(rng)) {
                g.insert_edge({VertexId{static_cast<std::uint32_t>(i)}, VertexId{static_cast<std::uint32_t>(j)},
                               random_edge_label(rng)});
            }
        }
    }
    return g;
}

Production random_production(std::mt19937& rng, const ProductionShape& shape, const std::string& name)
{
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, shape.max_vertices)(rng);
    std::vector<Production::Vertex> vertices;
    std::uniform_int_distribution<int> region_pick(0, 3);
    for (std::size_t i = 0; i < n; ++i) {
        auto region = static_cast<Region>(region_pick(rng));
        if (shape.require_left && i == 0) {
            region = Region::left;
        }
        vertices.push_back({"v" + std::to_string(i), random_label(rng, true), region, std::nullopt});
    }
    auto forbidden = [](Region a, Region b) {
        auto pair = [&](Region x, Region y) { return (a == x && b == y) || (a == y && b == x); };
        return pair(Region::left, Region::right) || pair(Region::above, Region::below);
    };
    std::vector<std::tuple<std::string, std::string, EdgeLabel>> edges;
    std::bernoulli_distribution edge(shape.edge_probability);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && !forbidden(vertices[i].region, vertices[j].region) && edge(rng)) {
                edges.emplace_back(vertices[i].name, vertices[j].name, random_edge_label(rng));
            }
        }
    }
    return Production(name, std::move(vertices), std::move(edges));
}

std::size_t RandomChoices::choose(const qcidgram::ChoiceRequest& request)
{
    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, request.candidates.size() - 1)(rng_);
    answers_.push_back(pick);
    return pick;
}

Production make_production(const std::string& name, const std::vector<std::string>& vertices,
                           const std::vector<std::string>& edges)
{
    std::vector<Production::Vertex> vs;
    for (const auto& spec : vertices) {
        auto a = spec.find(':');
        auto b = spec.rfind(':');
        vs.push_back({spec.substr(0, a), Symbol(spec.substr(a + 1, b - a - 1)),
                      qcidgram::region_from_string(spec.substr(b + 1)), std::nullopt});
    }
    std::vector<std::tuple<std::string, std::string, EdgeLabel>> es;
    for (const auto& spec : edges) {
        auto gt = spec.find('>');
        auto colon = spec.find(':');
        es.emplace_back(spec.substr(0, gt), spec.substr(gt + 1, colon - gt - 1),
                        qcidgram::edge_label_from_string(spec.substr(colon + 1)));
    }
    return Production(name, std::move(vs), std::move(es));
}

} // namespace oracle
