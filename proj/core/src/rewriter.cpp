#include <qcidgram/rewriter.hpp>

#include <algorithm>

namespace qcidgram {

namespace {

// Host images of a production vertex in the embedding part. A V_A vertex has one image
// per confirmed extension of its component (possibly none).
std::vector<VertexId> embedding_images(const Production& p, VertexId pv, const Match& m)
{
    if (p.regions().below.contains(pv)) {
        return {m.anchor.vertex_map.at(pv)};
    }
    std::vector<VertexId> out;
    for (const auto& ext : m.confirmed) {
        if (auto it = ext.vertex_map.find(pv); it != ext.vertex_map.end()) {
            out.push_back(it->second);
        }
    }
    return out;
}

} // namespace

std::vector<Symbol> stem_candidates(const Production& p, VertexId variant_vertex, const Match& m,
                                    const LabeledGraph& host,
                                    const std::map<VertexId, Symbol>& assignments)
{
    const auto& stem_class = p.variants().at(variant_vertex).stem_class;
    std::set<Symbol> found;
    for (const auto& [pv, label] : p.pattern().vertices()) {
        if (pv == variant_vertex || p.is_variant(pv) || label != stem_class) {
            continue;
        }
        switch (p.region_of(pv)) {
        case Region::left:
        case Region::below:
            found.insert(host.label(m.anchor.vertex_map.at(pv)));
            break;
        case Region::above:
            for (auto hv : embedding_images(p, pv, m)) {
                found.insert(host.label(hv));
            }
            break;
        case Region::right:
            if (auto it = assignments.find(pv); it != assignments.end()) {
                found.insert(it->second);
            } else if (label.is_terminal()) {
                found.insert(label);
            }
            break;
        }
    }
    return {found.begin(), found.end()};
}

LabelPlan plan_labels(const Production& p, const Match& m, const LabeledGraph& host, const Taxonomy& t,
                      const std::map<VertexId, Symbol>& assignments,
                      const std::map<VertexId, Symbol>& stem_choices)
{
    LabelPlan plan;
    for (auto v : p.right_new()) {
        const auto& pattern_label = p.pattern().label(v);
        auto it = assignments.find(v);
        if (it == assignments.end()) {
            if (pattern_label.is_nonterminal()) {
                throw RewriteError("production '" + p.name() + "': no term assigned to vertex '" +
                                   p.vertex_name(v) + "'");
            }
            plan.emplace(v, pattern_label);
            continue;
        }
        if (!t.label_matches(it->second, pattern_label)) {
            throw RewriteError("production '" + p.name() + "': term '" + it->second.text() +
                               "' does not match " + pattern_label.text());
        }
        plan.emplace(v, it->second);
    }
    for (const auto& [v, spec] : p.variants()) {
        auto stems = stem_candidates(p, v, m, host, assignments);
        std::optional<Symbol> stem;
        if (stems.size() == 1) {
            stem = stems.front();
        } else if (auto c = stem_choices.find(v); c != stem_choices.end()) {
            if (std::find(stems.begin(), stems.end(), c->second) != stems.end()) {
                stem = c->second;
            }
        }
        if (!stem) {
            std::string listed;
            for (const auto& s : stems) {
                listed += (listed.empty() ? "" : ", ") + s.text();
            }
            throw StemAmbiguityError(v, stems,
                                     "production '" + p.name() + "': variant vertex '" +
                                         p.vertex_name(v) + "' has " + std::to_string(stems.size()) +
                                         " candidate stems of class " + spec.stem_class.text() +
                                         (listed.empty() ? "" : " (" + listed + ")"));
        }
        plan.emplace(v, variant_label(spec, *stem));
    }
    return plan;
}

RewriteOutcome apply(const Production& p, const Match& m, const LabeledGraph& host, Taxonomy& t,
                     const LabelPlan& plan, IdAllocator& ids)
{
    for (auto v : p.regions().right) {
        if (!plan.contains(v)) {
            throw RewriteError("production '" + p.name() + "': label plan misses vertex '" +
                               p.vertex_name(v) + "'");
        }
    }
    for (auto hv : matched_host_vertices(m.anchor, m.confirmed)) {
        if (!host.has_vertex(hv)) {
            throw InapplicableError("production '" + p.name() + "': matched vertex " + to_string(hv) +
                                    " is not in the host");
        }
    }
    check_confirmation(m.confirmed);
    if (!applicable(p, m.anchor, m.confirmed, host)) {
        throw InapplicableError("production '" + p.name() +
                                "' is not applicable: a host edge at a removed vertex is unaccounted for");
    }

    RewriteOutcome out{host, {}, {}, {}, {}};
    for (auto pv : p.regions().left) {
        auto hv = m.anchor.vertex_map.at(pv);
        out.graph.remove_vertex(hv);
        out.removed.insert(hv);
    }
    for (auto pv : p.regions().right) {
        const auto& label = plan.at(pv);
        if (p.is_variant(pv)) {
            t.register_terminal(label, {p.pattern().label(pv)});
            auto existing = out.graph.find_by_label(label);
            if (!existing.empty()) {
                out.inserted.emplace(pv, existing.front());
                out.reused.insert(pv);
                continue;
            }
        }
        auto hv = ids.allocate();
        out.graph.add_vertex(hv, label);
        out.inserted.emplace(pv, hv);
    }

    const auto& right = p.regions().right;
    const auto embedding = p.embedding();
    auto add = [&](VertexId from, VertexId to, EdgeLabel label) {
        Edge e{from, to, label};
        if (out.graph.insert_edge(e)) {
            out.new_edges.insert(e);
        }
    };
    for (const auto& e : p.pattern().edges()) {
        if (right.contains(e.from) && right.contains(e.to)) {
            add(out.inserted.at(e.from), out.inserted.at(e.to), e.label);
        } else if (embedding.contains(e.from) && right.contains(e.to)) {
            for (auto src : embedding_images(p, e.from, m)) {
                add(src, out.inserted.at(e.to), e.label);
            }
        } else if (right.contains(e.from) && embedding.contains(e.to)) {
            for (auto dst : embedding_images(p, e.to, m)) {
                add(out.inserted.at(e.from), dst, e.label);
            }
        }
    }
    return out;
}

} // namespace qcidgram
