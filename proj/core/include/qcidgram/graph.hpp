#pragma once

#include <qcidgram/error.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace qcidgram {

/// A vertex label. Nonterminals are written in angle brackets, e.g. `<ablative tx>`;
/// everything else is a terminal term.
class Symbol {
public:
    explicit Symbol(std::string text);

    const std::string& text() const noexcept { return text_; }
    bool is_nonterminal() const noexcept;
    bool is_terminal() const noexcept { return !is_nonterminal(); }

    auto operator<=>(const Symbol&) const = default;

private:
    std::string text_;
};

inline Symbol operator""_sym(const char* s, std::size_t n) { return Symbol(std::string(s, n)); }

struct VertexId {
    std::uint32_t value = 0;
    auto operator<=>(const VertexId&) const = default;
};

std::string to_string(VertexId v);

enum class EdgeLabel { plus, minus, unknown, info, plain };

std::string_view to_string(EdgeLabel label) noexcept;
EdgeLabel edge_label_from_string(std::string_view text);

struct Edge {
    VertexId from;
    VertexId to;
    EdgeLabel label = EdgeLabel::plain;
    auto operator<=>(const Edge&) const = default;
};

/// Directed graph with labeled vertices and a set of labeled edges
/// (E subset of V x V x L_E). Parallel edges are allowed when their labels differ.
class LabeledGraph {
public:
    void add_vertex(VertexId id, Symbol label);
    /// Removes the vertex and every incident edge.
    void remove_vertex(VertexId id);
    /// Throws on a missing endpoint or a duplicate (from, to, label) triple.
    void add_edge(Edge e);
    /// Inserts if absent; returns whether the edge is new.
    bool insert_edge(Edge e);
    void remove_edge(const Edge& e);

    bool has_vertex(VertexId id) const { return labels_.contains(id); }
    bool has_edge(const Edge& e) const { return edges_.contains(e); }
    const Symbol& label(VertexId id) const;

    const std::map<VertexId, Symbol>& vertices() const noexcept { return labels_; }
    const std::set<Edge>& edges() const noexcept { return edges_; }
    std::vector<Edge> out_edges(VertexId id) const;
    std::vector<Edge> in_edges(VertexId id) const;
    std::size_t degree(VertexId id) const;

    std::size_t vertex_count() const noexcept { return labels_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return labels_.empty(); }

    std::set<VertexId> vertex_set() const;
    /// Smallest id strictly greater than every id present (0 for the empty graph).
    VertexId next_free_id() const;
    /// Vertices carrying exactly this label, in id order.
    std::vector<VertexId> find_by_label(const Symbol& label) const;

    bool operator==(const LabeledGraph& other) const
    {
        return labels_ == other.labels_ && edges_ == other.edges_;
    }

private:
    void require_vertex(VertexId id) const;

    std::map<VertexId, Symbol> labels_;
    std::set<Edge> edges_;
    std::map<VertexId, std::set<Edge>> out_;
    std::map<VertexId, std::set<Edge>> in_;
};

/// span(V', G): the subgraph induced by `vertex_subset`.
LabeledGraph span(const std::set<VertexId>& vertex_subset, const LabeledGraph& g);

/// Undirected reachability: true when a chain of edges (either orientation) links the two.
bool chain_exists(VertexId from, VertexId to, const LabeledGraph& g);

/// Partition `restriction` into classes of vertices joined by chains that stay inside `restriction`.
/// Classes are ordered by their smallest member.
std::vector<std::set<VertexId>> connected_components(const std::set<VertexId>& restriction,
                                                     const LabeledGraph& g);

/// Label- and edge-label-preserving isomorphism test.
bool isomorphic(const LabeledGraph& a, const LabeledGraph& b);

/// One witness bijection a -> b when the graphs are isomorphic.
std::optional<std::map<VertexId, VertexId>> find_isomorphism(const LabeledGraph& a,
                                                             const LabeledGraph& b);

// Exchange format: {"vertices": [{"id", "label"}], "edges": [{"from", "to", "label"}]}.
nlohmann::json graph_to_json(const LabeledGraph& g);
LabeledGraph graph_from_json(const nlohmann::json& doc);

} // namespace qcidgram
