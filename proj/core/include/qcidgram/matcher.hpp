#pragma once

#include <qcidgram/grammar.hpp>
#include <qcidgram/graph.hpp>
#include <qcidgram/taxonomy.hpp>

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace qcidgram {

/// Monomorphism of span(V_L ∪ V_B) into the host: production vertex -> host vertex.
struct Anchor {
    std::string production;
    std::map<VertexId, VertexId> vertex_map;

    auto operator<=>(const Anchor&) const = default;
};

/// One candidate enlargement of an anchor over a connected component of V_A.
/// `vertex_map` covers the component's vertices only; the anchor supplies the rest.
struct Extension {
    Anchor anchor;
    std::size_t component = 0;
    std::map<VertexId, VertexId> vertex_map;

    auto operator<=>(const Extension&) const = default;
};

struct ComponentExtensions {
    std::size_t component = 0;
    std::set<VertexId> members;
    std::vector<Extension> extensions;
};

/// An anchor together with the extensions the user (or policy) confirmed.
struct Match {
    Anchor anchor;
    std::vector<Extension> confirmed;
};

class MatchError : public Error {
public:
    using Error::Error;
};

/// All injective, label-compatible, edge-preserving maps of span(V_L ∪ V_B) into `host`,
/// sorted by mapped host ids.
std::vector<Anchor> find_anchors(const Production& p, const LabeledGraph& host, const Taxonomy& t);

/// Per component of V_A/~ (in component order), every extension of `a` over it.
/// Components with no match are present with an empty list.
std::vector<ComponentExtensions> enumerate_extensions(const Production& p, const Anchor& a,
                                                      const LabeledGraph& host, const Taxonomy& t);

/// Old(μ): host images of production edges between V_L and the embedding part,
/// with μ given by the anchor plus this extension.
std::set<Edge> old_edges(const Extension& ext, const Production& p);

/// The V_L/V_B part of Old, which every extension shares; usable when V_A is empty.
std::set<Edge> anchor_old_edges(const Anchor& a, const Production& p);

/// Dangling-edge condition: every host edge incident to δ(V_L) is the image of a
/// V_L-internal production edge or belongs to Old of the anchor or a confirmed extension.
bool applicable(const Production& p, const Anchor& a, std::span<const Extension> confirmed,
                const LabeledGraph& host);

/// Host vertices covered by the anchor and the extensions.
std::set<VertexId> matched_host_vertices(const Anchor& a, std::span<const Extension> extensions);

/// Throws MatchError when two confirmed extensions of different components share a host vertex.
void check_confirmation(std::span<const Extension> confirmed);

/// Structural validity of a map (injective, label- and edge-compatible over its domain).
bool valid_map(const Production& p, const std::map<VertexId, VertexId>& map, const LabeledGraph& host,
               const Taxonomy& t);

} // namespace qcidgram
