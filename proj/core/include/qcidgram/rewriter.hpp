#pragma once

#include <qcidgram/grammar.hpp>
#include <qcidgram/graph.hpp>
#include <qcidgram/matcher.hpp>
#include <qcidgram/taxonomy.hpp>

#include <map>
#include <set>
#include <vector>

namespace qcidgram {

class RewriteError : public Error {
public:
    using Error::Error;
};

class InapplicableError : public RewriteError {
public:
    using RewriteError::RewriteError;
};

/// Zero or several candidate stems for a variant vertex.
class StemAmbiguityError : public RewriteError {
public:
    StemAmbiguityError(VertexId vertex, std::vector<Symbol> candidates, const std::string& message)
        : RewriteError(message), vertex_(vertex), candidates_(std::move(candidates))
    {
    }

    VertexId vertex() const noexcept { return vertex_; }
    const std::vector<Symbol>& candidates() const noexcept { return candidates_; }

private:
    VertexId vertex_;
    std::vector<Symbol> candidates_;
};

/// Concrete label for every right-region vertex.
using LabelPlan = std::map<VertexId, Symbol>;

/// Session-scoped source of fresh host vertex ids.
class IdAllocator {
public:
    explicit IdAllocator(VertexId next = {}) : next_(next.value) {}

    VertexId allocate() { return VertexId{next_++}; }
    VertexId peek() const noexcept { return VertexId{next_}; }

private:
    std::uint32_t next_;
};

struct RewriteOutcome {
    LabeledGraph graph;
    std::map<VertexId, VertexId> inserted;  // right-region vertex -> host vertex
    std::set<VertexId> removed;
    std::set<VertexId> reused;              // variant vertices that matched an existing host node
    std::set<Edge> new_edges;
};

/// Distinct labels a variant vertex could take its stem from: images of the other
/// matched vertices (and placed new vertices) labeled with the stem class.
std::vector<Symbol> stem_candidates(const Production& p, VertexId variant_vertex, const Match& m,
                                    const LabeledGraph& host,
                                    const std::map<VertexId, Symbol>& assignments);

/// Resolves labels for V_R. `assignments` supplies the terms placed on V_R,new vertices
/// with nonterminal labels; `stem_choices` settles variant stems that would otherwise be ambiguous.
LabelPlan plan_labels(const Production& p, const Match& m, const LabeledGraph& host, const Taxonomy& t,
                      const std::map<VertexId, Symbol>& assignments,
                      const std::map<VertexId, Symbol>& stem_choices = {});

/// Applies `p` at `m`. Variant labels are registered in `t`; an existing host vertex with an
/// identical variant label is reused instead of duplicated.
RewriteOutcome apply(const Production& p, const Match& m, const LabeledGraph& host, Taxonomy& t,
                     const LabelPlan& plan, IdAllocator& ids);

} // namespace qcidgram
