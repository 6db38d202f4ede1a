#include <qcidgram/derivation.hpp>

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace qcidgram {

std::string_view to_string(ChoiceKind kind) noexcept
{
    switch (kind) {
    case ChoiceKind::anchor_selection: return "anchor_selection";
    case ChoiceKind::extension_confirmation: return "extension_confirmation";
    case ChoiceKind::term_assignment: return "term_assignment";
    case ChoiceKind::stem_selection: return "stem_selection";
    case ChoiceKind::manual_classification: return "manual_classification";
    }
    return "anchor_selection";
}

ChoiceKind choice_kind_from_string(std::string_view text)
{
    for (auto k : {ChoiceKind::anchor_selection, ChoiceKind::extension_confirmation,
                   ChoiceKind::term_assignment, ChoiceKind::stem_selection,
                   ChoiceKind::manual_classification}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    throw DerivationError("unknown choice kind '" + std::string(text) + "'");
}

nlohmann::json request_to_json(const ChoiceRequest& r)
{
    auto candidates = nlohmann::json::array();
    for (const auto& c : r.candidates) {
        auto highlight = nlohmann::json::array();
        for (auto v : c.highlight) {
            highlight.push_back(v.value);
        }
        candidates.push_back({{"summary", c.summary}, {"highlight", std::move(highlight)}});
    }
    return {{"id", r.id},
            {"kind", to_string(r.kind)},
            {"candidates", std::move(candidates)},
            {"production", r.production},
            {"stage", r.stage},
            {"term", r.term}};
}

ChoiceRequest request_from_json(const nlohmann::json& doc)
{
    ChoiceRequest r;
    r.id = doc.at("id").get<std::uint64_t>();
    r.kind = choice_kind_from_string(doc.at("kind").get<std::string>());
    for (const auto& c : doc.at("candidates")) {
        ChoiceCandidate cand{c.at("summary").get<std::string>(), {}};
        for (const auto& v : c.at("highlight")) {
            cand.highlight.push_back(VertexId{v.get<std::uint32_t>()});
        }
        r.candidates.push_back(std::move(cand));
    }
    r.production = doc.value("production", std::string());
    r.stage = doc.value("stage", std::size_t{0});
    r.term = doc.value("term", std::string());
    return r;
}

// ---------------------------------------------------------------------------

std::size_t ScriptedChoices::choose(const ChoiceRequest& request)
{
    if (next_ >= answers_.size()) {
        throw ScriptExhaustedError(request);
    }
    return answers_[next_++];
}

std::size_t FirstCandidatePolicy::choose(const ChoiceRequest&) { return 0; }

std::size_t InteractiveChoices::choose(const ChoiceRequest& request)
{
    out_ << "[stage " << request.stage << "] " << to_string(request.kind);
    if (!request.term.empty()) {
        out_ << " for '" << request.term << "'";
    }
    if (!request.production.empty()) {
        out_ << " (rule " << request.production << ")";
    }
    out_ << '\n';
    for (std::size_t i = 0; i < request.candidates.size(); ++i) {
        out_ << "  " << i << ") " << request.candidates[i].summary << '\n';
    }
    std::string line;
    while (true) {
        out_ << "> " << std::flush;
        if (!std::getline(in_, line)) {
            throw ScriptExhaustedError(request);
        }
        std::istringstream parse(line);
        std::size_t index = 0;
        if (parse >> index && index < request.candidates.size()) {
            return index;
        }
        out_ << "enter a number between 0 and " << request.candidates.size() - 1 << '\n';
    }
}

std::size_t ReplayThenFallback::choose(const ChoiceRequest& request)
{
    if (script_.remaining() > 0) {
        return script_.choose(request);
    }
    return fallback_.choose(request);
}

std::vector<std::size_t> Transcript::answers() const
{
    std::vector<std::size_t> out;
    out.reserve(choices.size());
    for (const auto& c : choices) {
        out.push_back(c.answer);
    }
    return out;
}

std::vector<std::size_t> answers_from_json(const nlohmann::json& doc)
{
    try {
        if (doc.is_array()) {
            return doc.get<std::vector<std::size_t>>();
        }
        if (doc.is_object() && doc.contains("answers")) {
            return doc.at("answers").get<std::vector<std::size_t>>();
        }
        if (doc.is_object() && doc.contains("choices")) {
            std::vector<std::size_t> out;
            for (const auto& c : doc.at("choices")) {
                out.push_back(c.at("answer").get<std::size_t>());
            }
            return out;
        }
    } catch (const nlohmann::json::exception& ex) {
        throw DerivationError(std::string("malformed choice script: ") + ex.what());
    }
    throw DerivationError("choice script must be an array, {\"answers\": [...]}, or a transcript");
}

std::string FailureReport::describe() const
{
    std::ostringstream out;
    out << "derivation stuck at stage " << stage << "; unplaced terms:\n";
    for (const auto& s : stuck) {
        out << "  " << s.term.text() << ": ";
        if (s.productions.empty()) {
            out << "no production can introduce this term";
        } else {
            out << "candidate rules never anchored:";
            for (const auto& p : s.productions) {
                out << ' ' << p;
            }
        }
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------

namespace {

void assignments_for(const Production& p, const std::vector<VertexId>& slots, std::size_t depth,
                     const std::vector<Symbol>& unplaced, const Taxonomy& t,
                     std::map<VertexId, Symbol>& current, std::vector<std::map<VertexId, Symbol>>& out)
{
    if (depth == slots.size()) {
        out.push_back(current);
        return;
    }
    auto slot = slots[depth];
    const auto& pattern_label = p.pattern().label(slot);
    for (const auto& term : unplaced) {
        bool taken = std::any_of(current.begin(), current.end(),
                                 [&](const auto& kv) { return kv.second == term; });
        if (taken || !t.label_matches(term, pattern_label)) {
            continue;
        }
        current.emplace(slot, term);
        assignments_for(p, slots, depth + 1, unplaced, t, current, out);
        current.erase(slot);
    }
}

std::vector<VertexId> sorted_images(const std::map<VertexId, VertexId>& m)
{
    std::vector<VertexId> out;
    for (const auto& [_, hv] : m) {
        out.push_back(hv);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string describe_map(const Production& p, const std::map<VertexId, VertexId>& m,
                         const LabeledGraph& host)
{
    std::string out;
    for (const auto& [pv, hv] : m) {
        out += (out.empty() ? "" : ", ") + p.pattern().label(pv).text() + " = " + host.label(hv).text();
    }
    return out;
}

class Session {
public:
    Session(const Grammar& grammar, const Taxonomy& t, ChoiceProvider& choices,
            const StageObserver& observer)
        : grammar_(grammar), choices_(choices), observer_(observer)
    {
        result_.taxonomy = t;
    }

    DerivationResult run(std::span<const Symbol> terms)
    {
        std::set<Symbol> seen;
        for (const auto& term : terms) {
            if (term.is_nonterminal()) {
                throw DerivationError("input term '" + term.text() + "' is a nonterminal");
            }
            if (!seen.insert(term).second) {
                throw DuplicateTermError("input term '" + term.text() + "' appears more than once");
            }
        }
        result_.transcript.terms.assign(terms.begin(), terms.end());
        classify_unknown(terms);

        LabeledGraph host = grammar_.initial_graph;
        IdAllocator ids(host.next_free_id());
        std::vector<Symbol> unplaced(terms.begin(), terms.end());
        std::size_t stage = 0;
        while (!unplaced.empty()) {
            ++stage;
            auto snapshot = run_stage(stage, host, unplaced, ids);
            bool stuck = snapshot.placed.empty();
            if (observer_) {
                observer_(snapshot, result_.taxonomy);
            }
            result_.stages.push_back(std::move(snapshot));
            if (stuck) {
                result_.failure = failure_report(stage, unplaced);
                break;
            }
        }
        result_.success = unplaced.empty();
        result_.graph = std::move(host);
        return std::move(result_);
    }

private:
    struct Planned {
        std::size_t production;
        std::vector<Symbol> terms;
        Match match;
        LabelPlan labels;
    };

    std::size_t ask(ChoiceKind kind, std::vector<ChoiceCandidate> candidates, std::string production,
                    std::size_t stage, std::string term)
    {
        ChoiceRequest request{++last_request_, kind, std::move(candidates), std::move(production), stage,
                              std::move(term)};
        auto answer = choices_.choose(request);
        if (answer >= request.candidates.size()) {
            throw DerivationError("answer " + std::to_string(answer) + " to request " +
                                  std::to_string(request.id) + " is out of range");
        }
        result_.transcript.choices.push_back({std::move(request), answer});
        return answer;
    }

    void classify_unknown(std::span<const Symbol> terms)
    {
        std::set<Symbol> assignable;
        for (const auto& p : grammar_.productions) {
            for (auto v : p.right_new()) {
                const auto& label = p.pattern().label(v);
                if (label.is_nonterminal()) {
                    assignable.insert(label);
                }
            }
        }
        auto& tax = result_.taxonomy;
        for (const auto& term : terms) {
            if (tax.is_classified(term)) {
                continue;
            }
            std::vector<ChoiceCandidate> options{{"decline", {}}};
            std::vector<Symbol> classes(assignable.begin(), assignable.end());
            for (const auto& c : classes) {
                options.push_back({c.text(), {}});
            }
            auto answer = ask(ChoiceKind::manual_classification, std::move(options), "", 0, term.text());
            if (answer == 0) {
                throw UnclassifiableTermError("term '" + term.text() +
                                              "' is not in the vocabulary and was not classified");
            }
            tax.register_terminal(term, {classes[answer - 1]});
        }
    }

    StageSnapshot run_stage(std::size_t stage, LabeledGraph& host, std::vector<Symbol>& unplaced,
                            IdAllocator& ids)
    {
        auto& tax = result_.taxonomy;
        StageSnapshot snapshot{stage, host, {}, {}};
        const auto& before = snapshot.before;
        auto candidates = stage_candidates({before, unplaced, stage}, grammar_, tax);

        std::vector<Planned> planned;
        std::set<Symbol> used;
        for (const auto& term : unplaced) {
            if (used.contains(term)) {
                continue;
            }
            std::vector<const Candidate*> options;
            for (const auto& c : candidates) {
                bool mentions = std::find(c.terms.begin(), c.terms.end(), term) != c.terms.end();
                bool clash = std::any_of(c.terms.begin(), c.terms.end(),
                                         [&](const Symbol& s) { return used.contains(s); });
                if (mentions && !clash) {
                    options.push_back(&c);
                }
            }
            if (options.empty()) {
                continue;
            }
            auto chosen = choose_candidate(options, stage, term, before);
            const auto& p = grammar_.productions[chosen->production];

            Match match{chosen->anchor, {}};
            confirm_extensions(p, match, stage, term, before);
            auto labels = resolve_labels(p, match, chosen->assignment, stage, term, before);
            planned.push_back({chosen->production, chosen->terms, std::move(match), std::move(labels)});
            used.insert(chosen->terms.begin(), chosen->terms.end());
        }

        for (auto& plan : planned) {
            const auto& p = grammar_.productions[plan.production];
            auto matched = matched_host_vertices(plan.match.anchor, plan.match.confirmed);
            bool present = std::all_of(matched.begin(), matched.end(),
                                       [&](VertexId v) { return host.has_vertex(v); });
            if (!present || !applicable(p, plan.match.anchor, plan.match.confirmed, host)) {
                continue;  // an earlier application in this stage invalidated the match
            }
            auto outcome = apply(p, plan.match, host, tax, plan.labels, ids);
            host = std::move(outcome.graph);
            result_.transcript.applications.push_back({stage, p.name(), plan.terms, plan.match.anchor,
                                                       plan.match.confirmed, plan.labels,
                                                       outcome.inserted, outcome.reused});
            for (const auto& term : plan.terms) {
                unplaced.erase(std::find(unplaced.begin(), unplaced.end(), term));
                snapshot.placed.push_back(term);
            }
        }
        snapshot.after = host;
        return snapshot;
    }

    const Candidate* choose_candidate(const std::vector<const Candidate*>& options, std::size_t stage,
                                      const Symbol& term, const LabeledGraph& host)
    {
        // Group by (production, assignment); anchors vary within a group.
        std::vector<std::vector<const Candidate*>> groups;
        for (const auto* c : options) {
            auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
                return g.front()->production == c->production && g.front()->assignment == c->assignment;
            });
            if (it == groups.end()) {
                groups.push_back({c});
            } else {
                it->push_back(c);
            }
        }
        std::size_t g = 0;
        if (groups.size() > 1) {
            std::vector<ChoiceCandidate> items;
            for (const auto& group : groups) {
                const auto& p = grammar_.productions[group.front()->production];
                std::string summary = p.name() + ":";
                for (const auto& [pv, s] : group.front()->assignment) {
                    summary += " " + p.pattern().label(pv).text() + " = " + s.text();
                }
                items.push_back({summary, {}});
            }
            g = ask(ChoiceKind::term_assignment, std::move(items), "", stage, term.text());
        }
        const auto& group = groups[g];
        std::size_t a = 0;
        if (group.size() > 1) {
            const auto& p = grammar_.productions[group.front()->production];
            std::vector<ChoiceCandidate> items;
            for (const auto* c : group) {
                items.push_back({describe_map(p, c->anchor.vertex_map, host), sorted_images(c->anchor.vertex_map)});
            }
            a = ask(ChoiceKind::anchor_selection, std::move(items), p.name(), stage, term.text());
        }
        return group[a];
    }

    void confirm_extensions(const Production& p, Match& match, std::size_t stage, const Symbol& term,
                            const LabeledGraph& host)
    {
        auto& tax = result_.taxonomy;
        for (const auto& component : enumerate_extensions(p, match.anchor, host, tax)) {
            for (const auto& ext : component.extensions) {
                bool overlaps = false;
                for (const auto& prior : match.confirmed) {
                    if (prior.component == ext.component) {
                        continue;
                    }
                    for (const auto& [_, hv] : prior.vertex_map) {
                        for (const auto& [__, hw] : ext.vertex_map) {
                            overlaps = overlaps || hv == hw;
                        }
                    }
                }
                if (overlaps) {
                    continue;
                }
                auto highlight = sorted_images(ext.vertex_map);
                auto what = describe_map(p, ext.vertex_map, host);
                auto answer = ask(ChoiceKind::extension_confirmation,
                                  {{"accept: " + what, highlight}, {"reject: " + what, highlight}},
                                  p.name(), stage, term.text());
                if (answer == 0) {
                    match.confirmed.push_back(ext);
                }
            }
        }
    }

    LabelPlan resolve_labels(const Production& p, const Match& match,
                             const std::map<VertexId, Symbol>& assignment, std::size_t stage,
                             const Symbol& term, const LabeledGraph& host)
    {
        std::map<VertexId, Symbol> stem_choices;
        while (true) {
            try {
                return plan_labels(p, match, host, result_.taxonomy, assignment, stem_choices);
            } catch (const StemAmbiguityError& ex) {
                if (ex.candidates().size() < 2 || stem_choices.contains(ex.vertex())) {
                    throw;
                }
                std::vector<ChoiceCandidate> items;
                for (const auto& s : ex.candidates()) {
                    items.push_back({s.text(), {}});
                }
                auto answer = ask(ChoiceKind::stem_selection, std::move(items), p.name(), stage, term.text());
                stem_choices.emplace(ex.vertex(), ex.candidates()[answer]);
            }
        }
    }

    FailureReport failure_report(std::size_t stage, const std::vector<Symbol>& unplaced) const
    {
        FailureReport report{stage, {}};
        for (const auto& term : unplaced) {
            StuckTerm stuck{term, {}};
            for (const auto& p : grammar_.productions) {
                for (auto v : p.right_new()) {
                    if (result_.taxonomy.label_matches(term, p.pattern().label(v))) {
                        stuck.productions.push_back(p.name());
                        break;
                    }
                }
            }
            report.stuck.push_back(std::move(stuck));
        }
        return report;
    }

    const Grammar& grammar_;
    ChoiceProvider& choices_;
    const StageObserver& observer_;
    DerivationResult result_;
    std::uint64_t last_request_ = 0;
};

} // namespace

std::vector<Candidate> stage_candidates(const DerivationState& state, const Grammar& grammar,
                                        const Taxonomy& t)
{
    std::vector<Candidate> out;
    if (state.unplaced.empty()) {
        return out;
    }
    for (std::size_t i = 0; i < grammar.productions.size(); ++i) {
        const auto& p = grammar.productions[i];
        auto slots_set = p.right_new();
        if (slots_set.empty()) {
            continue;
        }
        std::vector<VertexId> slots(slots_set.begin(), slots_set.end());
        std::vector<std::map<VertexId, Symbol>> assignments;
        std::map<VertexId, Symbol> current;
        assignments_for(p, slots, 0, state.unplaced, t, current, assignments);
        if (assignments.empty()) {
            continue;
        }
        for (const auto& anchor : find_anchors(p, state.host, t)) {
            for (const auto& assignment : assignments) {
                Candidate c{i, anchor, assignment, {}};
                for (auto v : slots) {
                    c.terms.push_back(assignment.at(v));
                }
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

DerivationResult derive(const Grammar& grammar, const Taxonomy& t, std::span<const Symbol> terms,
                        ChoiceProvider& choices, const StageObserver& observer)
{
    return Session(grammar, t, choices, observer).run(terms);
}

namespace {

// Feeds recorded answers back and insists each request looks like the one recorded.
class CheckedReplay : public ChoiceProvider {
public:
    explicit CheckedReplay(const std::vector<ChoiceRecord>& records) : records_(records) {}

    std::size_t choose(const ChoiceRequest& request) override
    {
        if (next_ >= records_.size()) {
            throw TranscriptMismatchError("replay needs more answers than the transcript holds (request " +
                                          std::to_string(request.id) + ")");
        }
        const auto& rec = records_[next_++];
        if (rec.request.kind != request.kind || rec.request.candidates != request.candidates ||
            rec.request.production != request.production || rec.request.term != request.term) {
            throw TranscriptMismatchError("request " + std::to_string(request.id) +
                                          " differs from the recorded " +
                                          std::string(to_string(rec.request.kind)) + " request");
        }
        return rec.answer;
    }

    bool exhausted() const noexcept { return next_ == records_.size(); }

private:
    const std::vector<ChoiceRecord>& records_;
    std::size_t next_ = 0;
};

} // namespace

LabeledGraph replay(const Transcript& transcript, const Grammar& grammar, const Taxonomy& t,
                    std::span<const Symbol> terms)
{
    if (!std::equal(transcript.terms.begin(), transcript.terms.end(), terms.begin(), terms.end())) {
        throw TranscriptMismatchError("transcript term list differs from the replay input");
    }
    CheckedReplay provider(transcript.choices);
    DerivationResult result;
    try {
        result = derive(grammar, t, terms, provider);
    } catch (const TranscriptMismatchError&) {
        throw;
    } catch (const Error& ex) {
        throw TranscriptMismatchError(std::string("replay diverged: ") + ex.what());
    }
    if (!provider.exhausted()) {
        throw TranscriptMismatchError("replay finished with unused recorded answers");
    }
    if (result.transcript.applications != transcript.applications) {
        throw TranscriptMismatchError("replayed applications differ from the transcript");
    }
    return result.graph;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json named_map(const Production& p, const std::map<VertexId, VertexId>& m)
{
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [pv, hv] : m) {
        out[p.vertex_name(pv)] = hv.value;
    }
    return out;
}

std::map<VertexId, VertexId> unnamed_map(const Production& p, const nlohmann::json& doc)
{
    std::map<VertexId, VertexId> out;
    for (const auto& [name, hv] : doc.items()) {
        out.emplace(p.vertex_by_name(name), VertexId{hv.get<std::uint32_t>()});
    }
    return out;
}

} // namespace

nlohmann::json transcript_to_json(const Transcript& t, const Grammar& g)
{
    auto terms = nlohmann::json::array();
    for (const auto& s : t.terms) {
        terms.push_back(s.text());
    }
    auto choices = nlohmann::json::array();
    for (const auto& c : t.choices) {
        choices.push_back({{"request", request_to_json(c.request)}, {"answer", c.answer}});
    }
    auto applications = nlohmann::json::array();
    for (const auto& a : t.applications) {
        const auto& p = g.find(a.production);
        auto app_terms = nlohmann::json::array();
        for (const auto& s : a.terms) {
            app_terms.push_back(s.text());
        }
        auto extensions = nlohmann::json::array();
        for (const auto& e : a.extensions) {
            extensions.push_back({{"component", e.component}, {"map", named_map(p, e.vertex_map)}});
        }
        nlohmann::json labels = nlohmann::json::object();
        for (const auto& [pv, s] : a.labels) {
            labels[p.vertex_name(pv)] = s.text();
        }
        auto reused = nlohmann::json::array();
        for (auto pv : a.reused) {
            reused.push_back(p.vertex_name(pv));
        }
        applications.push_back({{"stage", a.stage},
                                {"production", a.production},
                                {"terms", std::move(app_terms)},
                                {"anchor", named_map(p, a.anchor.vertex_map)},
                                {"extensions", std::move(extensions)},
                                {"labels", std::move(labels)},
                                {"inserted", named_map(p, a.inserted)},
                                {"reused", std::move(reused)}});
    }
    return {{"version", Transcript::format_version},
            {"terms", std::move(terms)},
            {"choices", std::move(choices)},
            {"applications", std::move(applications)}};
}

Transcript transcript_from_json(const nlohmann::json& doc, const Grammar& g)
{
    Transcript t;
    try {
        if (doc.at("version").get<int>() != Transcript::format_version) {
            throw TranscriptMismatchError("unsupported transcript version " + doc.at("version").dump());
        }
        for (const auto& s : doc.at("terms")) {
            t.terms.emplace_back(s.get<std::string>());
        }
        for (const auto& c : doc.at("choices")) {
            t.choices.push_back({request_from_json(c.at("request")), c.at("answer").get<std::size_t>()});
        }
        for (const auto& a : doc.at("applications")) {
            ApplicationRecord rec;
            rec.stage = a.at("stage").get<std::size_t>();
            rec.production = a.at("production").get<std::string>();
            const auto& p = g.find(rec.production);
            for (const auto& s : a.at("terms")) {
                rec.terms.emplace_back(s.get<std::string>());
            }
            rec.anchor = {rec.production, unnamed_map(p, a.at("anchor"))};
            for (const auto& e : a.at("extensions")) {
                rec.extensions.push_back(
                    {rec.anchor, e.at("component").get<std::size_t>(), unnamed_map(p, e.at("map"))});
            }
            for (const auto& [name, s] : a.at("labels").items()) {
                rec.labels.emplace(p.vertex_by_name(name), Symbol(s.get<std::string>()));
            }
            rec.inserted = unnamed_map(p, a.at("inserted"));
            for (const auto& name : a.at("reused")) {
                rec.reused.insert(p.vertex_by_name(name.get<std::string>()));
            }
            t.applications.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw TranscriptMismatchError(std::string("malformed transcript: ") + ex.what());
    } catch (const GrammarError& ex) {
        throw TranscriptMismatchError(std::string("transcript does not fit the grammar: ") + ex.what());
    }
    return t;
}

} // namespace qcidgram
