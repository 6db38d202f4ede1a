#pragma once

#include <qcidgram/grammar.hpp>
#include <qcidgram/graph.hpp>
#include <qcidgram/matcher.hpp>
#include <qcidgram/rewriter.hpp>
#include <qcidgram/taxonomy.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qcidgram {

enum class ChoiceKind {
    anchor_selection,
    extension_confirmation,
    term_assignment,
    stem_selection,
    manual_classification,
};

std::string_view to_string(ChoiceKind kind) noexcept;
ChoiceKind choice_kind_from_string(std::string_view text);

struct ChoiceCandidate {
    std::string summary;
    std::vector<VertexId> highlight;  // host vertices to show for this option

    bool operator==(const ChoiceCandidate&) const = default;
};

/// A question put to the choice provider. The answer is an index into `candidates`.
///
/// Candidate conventions: extension confirmations offer {accept, reject}; manual
/// classification offers "decline" first, then the assignable classes.
struct ChoiceRequest {
    std::uint64_t id = 0;
    ChoiceKind kind = ChoiceKind::anchor_selection;
    std::vector<ChoiceCandidate> candidates;
    std::string production;
    std::size_t stage = 0;
    std::string term;

    bool operator==(const ChoiceRequest&) const = default;
};

nlohmann::json request_to_json(const ChoiceRequest& r);
ChoiceRequest request_from_json(const nlohmann::json& doc);

class DerivationError : public Error {
public:
    using Error::Error;
};

class DuplicateTermError : public DerivationError {
public:
    using DerivationError::DerivationError;
};

class UnclassifiableTermError : public DerivationError {
public:
    using DerivationError::DerivationError;
};

class ScriptExhaustedError : public DerivationError {
public:
    explicit ScriptExhaustedError(ChoiceRequest pending)
        : DerivationError("choice script exhausted at request " + std::to_string(pending.id) + " (" +
                          std::string(to_string(pending.kind)) + ")"),
          pending_(std::move(pending))
    {
    }

    const ChoiceRequest& pending() const noexcept { return pending_; }

private:
    ChoiceRequest pending_;
};

class TranscriptMismatchError : public DerivationError {
public:
    using DerivationError::DerivationError;
};

class ChoiceProvider {
public:
    virtual ~ChoiceProvider() = default;
    virtual std::size_t choose(const ChoiceRequest& request) = 0;
};

/// Answers from a fixed list, in order. Throws ScriptExhaustedError when it runs dry.
class ScriptedChoices : public ChoiceProvider {
public:
    explicit ScriptedChoices(std::vector<std::size_t> answers) : answers_(std::move(answers)) {}

    std::size_t choose(const ChoiceRequest& request) override;
    std::size_t consumed() const noexcept { return next_; }
    std::size_t remaining() const noexcept { return answers_.size() - next_; }

private:
    std::vector<std::size_t> answers_;
    std::size_t next_ = 0;
};

/// Always the first candidate: first anchor, accept every extension, decline classification.
class FirstCandidatePolicy : public ChoiceProvider {
public:
    std::size_t choose(const ChoiceRequest& request) override;
};

/// Prompts on a text stream and reads an index per request.
class InteractiveChoices : public ChoiceProvider {
public:
    InteractiveChoices(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
    std::size_t choose(const ChoiceRequest& request) override;

private:
    std::istream& in_;
    std::ostream& out_;
};

/// Replays `answers` first, then defers to `fallback`.
class ReplayThenFallback : public ChoiceProvider {
public:
    ReplayThenFallback(std::vector<std::size_t> answers, ChoiceProvider& fallback)
        : script_(std::move(answers)), fallback_(fallback)
    {
    }
    std::size_t choose(const ChoiceRequest& request) override;

private:
    ScriptedChoices script_;
    ChoiceProvider& fallback_;
};

struct ApplicationRecord {
    std::size_t stage = 0;
    std::string production;
    std::vector<Symbol> terms;
    Anchor anchor;
    std::vector<Extension> extensions;
    LabelPlan labels;
    std::map<VertexId, VertexId> inserted;
    std::set<VertexId> reused;

    bool operator==(const ApplicationRecord&) const = default;
};

struct ChoiceRecord {
    ChoiceRequest request;
    std::size_t answer = 0;

    bool operator==(const ChoiceRecord&) const = default;
};

struct Transcript {
    static constexpr int format_version = 1;

    std::vector<Symbol> terms;
    std::vector<ChoiceRecord> choices;
    std::vector<ApplicationRecord> applications;

    std::vector<std::size_t> answers() const;
    bool operator==(const Transcript&) const = default;
};

nlohmann::json transcript_to_json(const Transcript& t, const Grammar& g);

/// Reads a choice script: a bare array of indices, {"answers": [...]}, or a transcript
/// (its recorded answers are used). Throws DerivationError on anything else.
std::vector<std::size_t> answers_from_json(const nlohmann::json& doc);
Transcript transcript_from_json(const nlohmann::json& doc, const Grammar& g);

struct StageSnapshot {
    std::size_t stage = 0;
    LabeledGraph before;
    LabeledGraph after;
    std::vector<Symbol> placed;
};

struct StuckTerm {
    Symbol term;
    std::vector<std::string> productions;  // rules whose V_R,new could take this term
};

struct FailureReport {
    std::size_t stage = 0;
    std::vector<StuckTerm> stuck;

    std::string describe() const;
};

struct DerivationResult {
    bool success = false;
    LabeledGraph graph;
    Taxonomy taxonomy;  // session copy, including registered variants
    Transcript transcript;
    std::vector<StageSnapshot> stages;
    std::optional<FailureReport> failure;
};

/// State at a stage boundary.
struct DerivationState {
    LabeledGraph host;
    std::vector<Symbol> unplaced;
    std::size_t stage = 0;
};

/// One way to place input terms: production, anchor, and the V_R,new assignment.
struct Candidate {
    std::size_t production = 0;
    Anchor anchor;
    std::map<VertexId, Symbol> assignment;
    std::vector<Symbol> terms;
};

/// Every candidate application against the state's host, in canonical order
/// (production order, then anchor order, then assignment order).
std::vector<Candidate> stage_candidates(const DerivationState& state, const Grammar& grammar,
                                        const Taxonomy& t);

/// Called after every stage with the snapshot and the session taxonomy at that point.
using StageObserver = std::function<void(const StageSnapshot&, const Taxonomy&)>;

/// Runs stages until every term is placed (success) or a stage places nothing (failure).
DerivationResult derive(const Grammar& grammar, const Taxonomy& t, std::span<const Symbol> terms,
                        ChoiceProvider& choices, const StageObserver& observer = {});

/// Re-executes a transcript's recorded answers and checks every application matches.
LabeledGraph replay(const Transcript& transcript, const Grammar& grammar, const Taxonomy& t,
                    std::span<const Symbol> terms);

} // namespace qcidgram
