#pragma once

#include <qcidgram/error.hpp>
#include <qcidgram/graph.hpp>
#include <qcidgram/taxonomy.hpp>

#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace qcidgram {

class GrammarError : public Error {
public:
    enum class Code {
        parse_error,
        duplicate_production,
        duplicate_vertex,
        unknown_vertex,
        invalid_region,
        invalid_label,
        left_right_edge,
        above_below_edge,
        duplicate_edge,
        unknown_edge_label,
        variant_outside_right,
        invalid_variant,
        dangling_stem_class,
    };

    GrammarError(Code code, std::string production, const std::string& message)
        : Error(production.empty() ? message : "production '" + production + "': " + message),
          code_(code), production_(std::move(production))
    {
    }

    Code code() const noexcept { return code_; }
    const std::string& production() const noexcept { return production_; }

private:
    Code code_;
    std::string production_;
};

std::string_view to_string(GrammarError::Code code) noexcept;

enum class Region { left, above, below, right };

std::string_view to_string(Region r) noexcept;
Region region_from_string(std::string_view text);

struct RegionSets {
    std::set<VertexId> left;   // V_L, removed
    std::set<VertexId> above;  // V_A, indeterminate embedding
    std::set<VertexId> below;  // V_B, determinate embedding
    std::set<VertexId> right;  // V_R, inserted
};

/// A four-region production. Pattern vertex ids are local to the production; the
/// names from the grammar file are kept for serialization and error messages.
class Production {
public:
    struct Vertex {
        std::string name;
        Symbol label;
        Region region;
        std::optional<VariantSpec> variant;
    };

    /// Validates region constraints; throws GrammarError.
    Production(std::string name, std::vector<Vertex> vertices,
               std::vector<std::tuple<std::string, std::string, EdgeLabel>> edges);

    const std::string& name() const noexcept { return name_; }
    const LabeledGraph& pattern() const noexcept { return pattern_; }

    Region region_of(VertexId v) const { return regions_.at(v); }
    const RegionSets& regions() const noexcept { return sets_; }
    const std::string& vertex_name(VertexId v) const { return names_.at(v); }
    VertexId vertex_by_name(const std::string& name) const;
    const std::map<VertexId, VariantSpec>& variants() const noexcept { return variants_; }
    bool is_variant(VertexId v) const { return variants_.contains(v); }

    /// V_L ∪ V_B: the domain of an anchor.
    std::set<VertexId> anchor_domain() const;
    /// V_A ∪ V_B.
    std::set<VertexId> embedding() const;
    /// V_R,new: right-region vertices without a variant annotation.
    std::set<VertexId> right_new() const;
    /// V_A/~ with chains restricted to V_A.
    const std::vector<std::set<VertexId>>& above_components() const noexcept { return components_; }

    std::size_t nonterminal_count() const;
    std::vector<Vertex> vertex_list() const;

    bool operator==(const Production& other) const;

private:
    std::string name_;
    LabeledGraph pattern_;
    std::map<VertexId, Region> regions_;
    std::map<VertexId, std::string> names_;
    std::map<VertexId, VariantSpec> variants_;
    RegionSets sets_;
    std::vector<std::set<VertexId>> components_;
};

RegionSets regions(const Production& p);

/// Expands `lhs -> rhs...` into a production with V_L = {lhs}, V_R = rhs and no embedding.
Production string_abbreviation(const Symbol& lhs, const std::vector<Symbol>& rhs);

struct Grammar {
    std::vector<Production> productions;
    std::set<EdgeLabel> edge_labels;
    LabeledGraph initial_graph;

    const Production& find(std::string_view name) const;
    bool operator==(const Grammar&) const = default;
};

/// Parses and validates a grammar document:
/// `{edge_labels, initial_graph, productions: [{name, vertices: [{id, label, region, variant?}],
/// edges: [{from, to, label}]}]}`.
Grammar parse_grammar(const nlohmann::json& doc);
Grammar parse_grammar(std::string_view text);
nlohmann::json serialize_grammar(const Grammar& g);
nlohmann::json production_to_json(const Production& p);
Production production_from_json(const nlohmann::json& doc);

} // namespace qcidgram
