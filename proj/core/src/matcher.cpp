#include <qcidgram/matcher.hpp>

#include <algorithm>

namespace qcidgram {

namespace {

// Backtracking over pattern vertices. Pattern edges are checked as soon as both
// endpoints are mapped; edges to never-mapped vertices are outside the span and ignored.
class MapSearch {
public:
    MapSearch(const Production& p, const LabeledGraph& host, const Taxonomy& t,
              std::map<VertexId, VertexId> fixed)
        : p_(p), host_(host), t_(t), map_(std::move(fixed))
    {
        for (const auto& [_, hv] : map_) {
            used_.insert(hv);
        }
    }

    std::vector<std::map<VertexId, VertexId>> run(const std::set<VertexId>& to_map)
    {
        order_ = search_order(to_map);
        for (auto pv : order_) {
            auto& cands = candidates_[pv];
            const auto& pattern_label = p_.pattern().label(pv);
            for (const auto& [hv, host_label] : host_.vertices()) {
                if (t_.label_matches(host_label, pattern_label)) {
                    cands.push_back(hv);
                }
            }
        }
        results_.clear();
        descend(0);
        return std::move(results_);
    }

private:
    std::vector<VertexId> search_order(const std::set<VertexId>& to_map) const
    {
        std::set<VertexId> domain = to_map;
        for (const auto& [pv, _] : map_) {
            domain.insert(pv);
        }
        std::map<VertexId, std::size_t> degree;
        for (const auto& e : p_.pattern().edges()) {
            if (domain.contains(e.from) && domain.contains(e.to)) {
                ++degree[e.from];
                ++degree[e.to];
            }
        }
        std::vector<VertexId> order(to_map.begin(), to_map.end());
        std::stable_sort(order.begin(), order.end(),
                         [&](VertexId a, VertexId b) { return degree[a] > degree[b]; });
        return order;
    }

    bool edges_ok(VertexId pv, VertexId hv) const
    {
        auto image = [&](VertexId w) -> std::optional<VertexId> {
            if (w == pv) {
                return hv;
            }
            auto it = map_.find(w);
            if (it == map_.end()) {
                return std::nullopt;
            }
            return it->second;
        };
        for (const auto& e : p_.pattern().out_edges(pv)) {
            auto to = image(e.to);
            if (to && !host_.has_edge({hv, *to, e.label})) {
                return false;
            }
        }
        for (const auto& e : p_.pattern().in_edges(pv)) {
            auto from = image(e.from);
            if (e.from != pv && from && !host_.has_edge({*from, hv, e.label})) {
                return false;
            }
        }
        return true;
    }

    void descend(std::size_t depth)
    {
        if (depth == order_.size()) {
            results_.push_back(map_);
            return;
        }
        auto pv = order_[depth];
        for (auto hv : candidates_[pv]) {
            if (used_.contains(hv) || !edges_ok(pv, hv)) {
                continue;
            }
            map_[pv] = hv;
            used_.insert(hv);
            descend(depth + 1);
            map_.erase(pv);
            used_.erase(hv);
        }
    }

    const Production& p_;
    const LabeledGraph& host_;
    const Taxonomy& t_;
    std::map<VertexId, VertexId> map_;
    std::set<VertexId> used_;
    std::vector<VertexId> order_;
    std::map<VertexId, std::vector<VertexId>> candidates_;
    std::vector<std::map<VertexId, VertexId>> results_;
};

std::map<VertexId, VertexId> combined(const Extension& ext)
{
    auto m = ext.anchor.vertex_map;
    m.insert(ext.vertex_map.begin(), ext.vertex_map.end());
    return m;
}

// Images of production edges running between V_L and `others`, in both orientations.
std::set<Edge> boundary_images(const Production& p, const std::map<VertexId, VertexId>& map,
                               const std::set<VertexId>& others)
{
    const auto& left = p.regions().left;
    std::set<Edge> out;
    for (const auto& e : p.pattern().edges()) {
        bool forward = left.contains(e.from) && others.contains(e.to);
        bool backward = others.contains(e.from) && left.contains(e.to);
        if (forward || backward) {
            out.insert({map.at(e.from), map.at(e.to), e.label});
        }
    }
    return out;
}

} // namespace

std::vector<Anchor> find_anchors(const Production& p, const LabeledGraph& host, const Taxonomy& t)
{
    MapSearch search(p, host, t, {});
    auto maps = search.run(p.anchor_domain());
    std::sort(maps.begin(), maps.end());
    std::vector<Anchor> out;
    out.reserve(maps.size());
    for (auto& m : maps) {
        out.push_back({p.name(), std::move(m)});
    }
    return out;
}

std::vector<ComponentExtensions> enumerate_extensions(const Production& p, const Anchor& a,
                                                      const LabeledGraph& host, const Taxonomy& t)
{
    std::vector<ComponentExtensions> out;
    const auto& components = p.above_components();
    for (std::size_t i = 0; i < components.size(); ++i) {
        MapSearch search(p, host, t, a.vertex_map);
        auto maps = search.run(components[i]);
        ComponentExtensions ce{i, components[i], {}};
        for (auto& full : maps) {
            std::map<VertexId, VertexId> restricted;
            for (auto v : components[i]) {
                restricted.emplace(v, full.at(v));
            }
            ce.extensions.push_back({a, i, std::move(restricted)});
        }
        std::sort(ce.extensions.begin(), ce.extensions.end());
        out.push_back(std::move(ce));
    }
    return out;
}

std::set<Edge> anchor_old_edges(const Anchor& a, const Production& p)
{
    return boundary_images(p, a.vertex_map, p.regions().below);
}

std::set<Edge> old_edges(const Extension& ext, const Production& p)
{
    auto others = p.regions().below;
    for (const auto& [pv, _] : ext.vertex_map) {
        others.insert(pv);
    }
    return boundary_images(p, combined(ext), others);
}

bool applicable(const Production& p, const Anchor& a, std::span<const Extension> confirmed,
                const LabeledGraph& host)
{
    const auto& left = p.regions().left;
    if (left.empty()) {
        return true;
    }
    std::set<Edge> covered = anchor_old_edges(a, p);
    for (const auto& e : p.pattern().edges()) {
        if (left.contains(e.from) && left.contains(e.to)) {
            covered.insert({a.vertex_map.at(e.from), a.vertex_map.at(e.to), e.label});
        }
    }
    for (const auto& ext : confirmed) {
        auto old = old_edges(ext, p);
        covered.insert(old.begin(), old.end());
    }
    for (auto pv : left) {
        auto hv = a.vertex_map.at(pv);
        for (const auto& e : host.out_edges(hv)) {
            if (!covered.contains(e)) {
                return false;
            }
        }
        for (const auto& e : host.in_edges(hv)) {
            if (!covered.contains(e)) {
                return false;
            }
        }
    }
    return true;
}

std::set<VertexId> matched_host_vertices(const Anchor& a, std::span<const Extension> extensions)
{
    std::set<VertexId> out;
    for (const auto& [_, hv] : a.vertex_map) {
        out.insert(hv);
    }
    for (const auto& ext : extensions) {
        for (const auto& [_, hv] : ext.vertex_map) {
            out.insert(hv);
        }
    }
    return out;
}

void check_confirmation(std::span<const Extension> confirmed)
{
    for (std::size_t i = 0; i < confirmed.size(); ++i) {
        for (std::size_t j = i + 1; j < confirmed.size(); ++j) {
            if (confirmed[i].component == confirmed[j].component) {
                continue;
            }
            for (const auto& [_, hi] : confirmed[i].vertex_map) {
                for (const auto& [__, hj] : confirmed[j].vertex_map) {
                    if (hi == hj) {
                        throw MatchError("extensions of components " +
                                         std::to_string(confirmed[i].component) + " and " +
                                         std::to_string(confirmed[j].component) +
                                         " both claim host vertex " + to_string(hi));
                    }
                }
            }
        }
    }
}

bool valid_map(const Production& p, const std::map<VertexId, VertexId>& map, const LabeledGraph& host,
               const Taxonomy& t)
{
    std::set<VertexId> images;
    for (const auto& [pv, hv] : map) {
        if (!p.pattern().has_vertex(pv) || !host.has_vertex(hv) || !images.insert(hv).second) {
            return false;
        }
        if (!t.label_matches(host.label(hv), p.pattern().label(pv))) {
            return false;
        }
    }
    for (const auto& e : p.pattern().edges()) {
        auto f = map.find(e.from);
        auto to = map.find(e.to);
        if (f != map.end() && to != map.end() && !host.has_edge({f->second, to->second, e.label})) {
            return false;
        }
    }
    return true;
}

} // namespace qcidgram
