#pragma once

#include <qcidgram/graph.hpp>
#include <qcidgram/taxonomy.hpp>

#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qcidgram {

class ModelError : public Error {
public:
    using Error::Error;
};

/// Contingent node tag: nodes of one group split a variable under mutually exclusive conditions.
struct ContingencyTag {
    std::string group;
    std::string condition;
    bool operator==(const ContingencyTag&) const = default;
};

/// Labels of the form "Base | condition" denote a contingent node of group "Base".
std::optional<ContingencyTag> parse_contingency(const Symbol& label);

struct QcidModel {
    LabeledGraph graph;
    std::map<VertexId, NodeKind> kinds;
    std::map<VertexId, ContingencyTag> contingency;
    std::set<VertexId> emphasized;  // rendering hint only

    std::vector<VertexId> of_kind(NodeKind kind) const;
};

/// Assigns node kinds from the taxonomy. Throws ModelError naming the first kindless vertex.
QcidModel classify_model(const LabeledGraph& g, const Taxonomy& t);

enum class CheckStatus { pass, fail, not_applicable };

std::string_view to_string(CheckStatus s) noexcept;

struct PropertyResult {
    std::string id;
    std::string title;
    CheckStatus status = CheckStatus::pass;
    bool proxy = false;
    std::vector<VertexId> witness_vertices;
    std::vector<Edge> witness_edges;
    std::string note;
};

struct PropertyReport {
    std::vector<PropertyResult> results;

    const PropertyResult& get(std::string_view id) const;
    /// True when no applicable row failed.
    bool all_pass() const;
    nlohmann::json to_json() const;
    std::string to_table(const QcidModel& m) const;
};

/// Rows, in order: 1 acyclic, 2 dominated-decision proxy, 3 unambiguity (not applicable to a
/// single model), 4 one utility, 5 utility has no successors, 6 every node reaches the utility,
/// 7 chance nodes reach the utility without passing a decision, then two notation checks:
/// "signs" (arc label conventions) and "contingency" (distinct conditions within a group).
PropertyReport check_properties(const QcidModel& m);

} // namespace qcidgram
