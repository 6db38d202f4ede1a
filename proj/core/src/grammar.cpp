#include <qcidgram/grammar.hpp>

namespace qcidgram {

using Code = GrammarError::Code;

std::string_view to_string(GrammarError::Code code) noexcept
{
    switch (code) {
    case Code::parse_error: return "parse_error";
    case Code::duplicate_production: return "duplicate_production";
    case Code::duplicate_vertex: return "duplicate_vertex";
    case Code::unknown_vertex: return "unknown_vertex";
    case Code::invalid_region: return "invalid_region";
    case Code::invalid_label: return "invalid_label";
    case Code::left_right_edge: return "left_right_edge";
    case Code::above_below_edge: return "above_below_edge";
    case Code::duplicate_edge: return "duplicate_edge";
    case Code::unknown_edge_label: return "unknown_edge_label";
    case Code::variant_outside_right: return "variant_outside_right";
    case Code::invalid_variant: return "invalid_variant";
    case Code::dangling_stem_class: return "dangling_stem_class";
    }
    return "parse_error";
}

std::string_view to_string(Region r) noexcept
{
    switch (r) {
    case Region::left: return "left";
    case Region::above: return "above";
    case Region::below: return "below";
    case Region::right: return "right";
    }
    return "left";
}

Region region_from_string(std::string_view text)
{
    for (auto r : {Region::left, Region::above, Region::below, Region::right}) {
        if (to_string(r) == text) {
            return r;
        }
    }
    throw GrammarError(Code::invalid_region, "", "unknown region '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------

Production::Production(std::string name, std::vector<Vertex> vertices,
                       std::vector<std::tuple<std::string, std::string, EdgeLabel>> edges)
    : name_(std::move(name))
{
    if (name_.empty()) {
        throw GrammarError(Code::parse_error, "", "production name is empty");
    }
    std::map<std::string, VertexId> by_name;
    std::uint32_t next = 0;
    for (auto& v : vertices) {
        VertexId id{next++};
        if (!by_name.emplace(v.name, id).second) {
            throw GrammarError(Code::duplicate_vertex, name_, "duplicate vertex id '" + v.name + "'");
        }
        if (v.variant) {
            if (v.region != Region::right) {
                throw GrammarError(Code::variant_outside_right, name_,
                                   "vertex '" + v.name + "' carries a variant but lies in the " +
                                       std::string(to_string(v.region)) + " region");
            }
            if (!v.label.is_nonterminal()) {
                throw GrammarError(Code::invalid_variant, name_,
                                   "variant vertex '" + v.name + "' needs a nonterminal label");
            }
            try {
                v.variant->validate();
            } catch (const TaxonomyError& ex) {
                throw GrammarError(Code::invalid_variant, name_,
                                   "vertex '" + v.name + "': " + ex.what());
            }
            variants_.emplace(id, *v.variant);
        }
        pattern_.add_vertex(id, v.label);
        regions_.emplace(id, v.region);
        names_.emplace(id, v.name);
        switch (v.region) {
        case Region::left: sets_.left.insert(id); break;
        case Region::above: sets_.above.insert(id); break;
        case Region::below: sets_.below.insert(id); break;
        case Region::right: sets_.right.insert(id); break;
        }
    }

    // A stem comes from another non-variant vertex carrying the stem class as its label.
    for (const auto& [id, spec] : variants_) {
        bool found = false;
        for (const auto& [other, label] : pattern_.vertices()) {
            if (other != id && !variants_.contains(other) && label == spec.stem_class) {
                found = true;
            }
        }
        if (!found) {
            throw GrammarError(Code::dangling_stem_class, name_,
                               "variant vertex '" + names_.at(id) + "' names stem class '" +
                                   spec.stem_class.text() + "' but no other vertex carries it");
        }
    }

    for (const auto& [from, to, label] : edges) {
        auto f = by_name.find(from);
        auto t = by_name.find(to);
        if (f == by_name.end() || t == by_name.end()) {
            throw GrammarError(Code::unknown_vertex, name_,
                               "edge " + from + " -> " + to + " references an unknown vertex");
        }
        auto rf = regions_.at(f->second);
        auto rt = regions_.at(t->second);
        auto between = [&](Region a, Region b) {
            return (rf == a && rt == b) || (rf == b && rt == a);
        };
        if (between(Region::left, Region::right)) {
            throw GrammarError(Code::left_right_edge, name_,
                               "edge " + from + " -> " + to + " from left to right region forbidden");
        }
        if (between(Region::above, Region::below)) {
            throw GrammarError(Code::above_below_edge, name_,
                               "edge " + from + " -> " + to + " between above and below regions forbidden");
        }
        if (!pattern_.insert_edge({f->second, t->second, label})) {
            throw GrammarError(Code::duplicate_edge, name_, "duplicate edge " + from + " -> " + to);
        }
    }
    components_ = connected_components(sets_.above, pattern_);
}

VertexId Production::vertex_by_name(const std::string& name) const
{
    for (const auto& [id, n] : names_) {
        if (n == name) {
            return id;
        }
    }
    throw GrammarError(Code::unknown_vertex, name_, "no vertex named '" + name + "'");
}

std::set<VertexId> Production::anchor_domain() const
{
    auto out = sets_.left;
    out.insert(sets_.below.begin(), sets_.below.end());
    return out;
}

std::set<VertexId> Production::embedding() const
{
    auto out = sets_.above;
    out.insert(sets_.below.begin(), sets_.below.end());
    return out;
}

std::set<VertexId> Production::right_new() const
{
    std::set<VertexId> out;
    for (auto v : sets_.right) {
        if (!variants_.contains(v)) {
            out.insert(v);
        }
    }
    return out;
}

std::size_t Production::nonterminal_count() const
{
    std::size_t n = 0;
    for (const auto& [_, label] : pattern_.vertices()) {
        n += label.is_nonterminal() ? 1 : 0;
    }
    return n;
}

std::vector<Production::Vertex> Production::vertex_list() const
{
    std::vector<Vertex> out;
    for (const auto& [id, label] : pattern_.vertices()) {
        std::optional<VariantSpec> variant;
        if (auto it = variants_.find(id); it != variants_.end()) {
            variant = it->second;
        }
        out.push_back({names_.at(id), label, regions_.at(id), variant});
    }
    return out;
}

bool Production::operator==(const Production& other) const
{
    return name_ == other.name_ && pattern_ == other.pattern_ && regions_ == other.regions_ &&
           names_ == other.names_ && variants_ == other.variants_;
}

RegionSets regions(const Production& p) { return p.regions(); }

Production string_abbreviation(const Symbol& lhs, const std::vector<Symbol>& rhs)
{
    std::vector<Production::Vertex> vertices{{"lhs", lhs, Region::left, std::nullopt}};
    std::string name = lhs.text() + " ->";
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        vertices.push_back({"rhs" + std::to_string(i), rhs[i], Region::right, std::nullopt});
        name += " " + rhs[i].text();
    }
    return Production(name, std::move(vertices), {});
}

const Production& Grammar::find(std::string_view name) const
{
    for (const auto& p : productions) {
        if (p.name() == name) {
            return p;
        }
    }
    throw GrammarError(Code::parse_error, std::string(name), "no such production");
}

// ---------------------------------------------------------------------------

Production production_from_json(const nlohmann::json& doc)
{
    std::string name;
    try {
        name = doc.at("name").get<std::string>();
        std::vector<Production::Vertex> vertices;
        for (const auto& v : doc.at("vertices")) {
            std::optional<VariantSpec> variant;
            if (v.contains("variant") && !v.at("variant").is_null()) {
                try {
                    variant = variant_from_json(v.at("variant"));
                } catch (const TaxonomyError& ex) {
                    throw GrammarError(Code::invalid_variant, name, ex.what());
                }
            }
            Region region;
            try {
                region = region_from_string(v.at("region").get<std::string>());
            } catch (const GrammarError& ex) {
                throw GrammarError(Code::invalid_region, name, ex.what());
            }
            vertices.push_back({v.at("id").get<std::string>(), Symbol(v.at("label").get<std::string>()),
                                region, std::move(variant)});
        }
        std::vector<std::tuple<std::string, std::string, EdgeLabel>> edges;
        if (doc.contains("edges")) {
            for (const auto& e : doc.at("edges")) {
                EdgeLabel label;
                try {
                    label = edge_label_from_string(e.value("label", std::string("plain")));
                } catch (const GraphError& ex) {
                    throw GrammarError(Code::unknown_edge_label, name, ex.what());
                }
                edges.emplace_back(e.at("from").get<std::string>(), e.at("to").get<std::string>(), label);
            }
        }
        return Production(name, std::move(vertices), std::move(edges));
    } catch (const nlohmann::json::exception& ex) {
        throw GrammarError(Code::parse_error, name, std::string("malformed production: ") + ex.what());
    } catch (const GraphError& ex) {
        throw GrammarError(Code::invalid_label, name, ex.what());
    }
}

nlohmann::json production_to_json(const Production& p)
{
    auto vertices = nlohmann::json::array();
    for (const auto& v : p.vertex_list()) {
        nlohmann::json entry{{"id", v.name}, {"label", v.label.text()}, {"region", to_string(v.region)}};
        if (v.variant) {
            entry["variant"] = variant_to_json(*v.variant);
        }
        vertices.push_back(std::move(entry));
    }
    auto edges = nlohmann::json::array();
    for (const auto& e : p.pattern().edges()) {
        edges.push_back({{"from", p.vertex_name(e.from)},
                         {"to", p.vertex_name(e.to)},
                         {"label", to_string(e.label)}});
    }
    return {{"name", p.name()}, {"vertices", std::move(vertices)}, {"edges", std::move(edges)}};
}

Grammar parse_grammar(const nlohmann::json& doc)
{
    Grammar g;
    try {
        if (doc.contains("edge_labels")) {
            for (const auto& l : doc.at("edge_labels")) {
                try {
                    g.edge_labels.insert(edge_label_from_string(l.get<std::string>()));
                } catch (const GraphError& ex) {
                    throw GrammarError(Code::unknown_edge_label, "", ex.what());
                }
            }
        } else {
            g.edge_labels = {EdgeLabel::plus, EdgeLabel::minus, EdgeLabel::unknown, EdgeLabel::info,
                             EdgeLabel::plain};
        }
        if (doc.contains("initial_graph")) {
            try {
                g.initial_graph = graph_from_json(doc.at("initial_graph"));
            } catch (const GraphError& ex) {
                throw GrammarError(Code::parse_error, "", std::string("initial graph: ") + ex.what());
            }
        }
        std::set<std::string> names;
        for (const auto& entry : doc.at("productions")) {
            auto p = production_from_json(entry);
            if (!names.insert(p.name()).second) {
                throw GrammarError(Code::duplicate_production, p.name(), "duplicate production name");
            }
            for (const auto& e : p.pattern().edges()) {
                if (!g.edge_labels.contains(e.label)) {
                    throw GrammarError(Code::unknown_edge_label, p.name(),
                                       "edge label '" + std::string(to_string(e.label)) +
                                           "' is not in the grammar's alphabet");
                }
            }
            g.productions.push_back(std::move(p));
        }
        for (const auto& e : g.initial_graph.edges()) {
            if (!g.edge_labels.contains(e.label)) {
                throw GrammarError(Code::unknown_edge_label, "",
                                   "initial graph uses edge label '" + std::string(to_string(e.label)) +
                                       "' outside the alphabet");
            }
        }
    } catch (const nlohmann::json::exception& ex) {
        throw GrammarError(Code::parse_error, "", std::string("malformed grammar: ") + ex.what());
    }
    return g;
}

Grammar parse_grammar(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw GrammarError(Code::parse_error, "", std::string("grammar parse error: ") + ex.what());
    }
    return parse_grammar(doc);
}

nlohmann::json serialize_grammar(const Grammar& g)
{
    auto labels = nlohmann::json::array();
    for (auto l : g.edge_labels) {
        labels.push_back(to_string(l));
    }
    auto productions = nlohmann::json::array();
    for (const auto& p : g.productions) {
        productions.push_back(production_to_json(p));
    }
    return {{"edge_labels", std::move(labels)},
            {"initial_graph", graph_to_json(g.initial_graph)},
            {"productions", std::move(productions)}};
}

} // namespace qcidgram
