#include <qcidgram/taxonomy.hpp>

#include <cctype>

namespace qcidgram {

using Code = TaxonomyError::Code;

std::string_view to_string(NodeKind kind) noexcept
{
    switch (kind) {
    case NodeKind::decision: return "decision";
    case NodeKind::chance: return "chance";
    case NodeKind::utility: return "utility";
    }
    return "chance";
}

NodeKind node_kind_from_string(std::string_view text)
{
    if (text == "decision") {
        return NodeKind::decision;
    }
    if (text == "chance") {
        return NodeKind::chance;
    }
    if (text == "utility") {
        return NodeKind::utility;
    }
    throw TaxonomyError(Code::parse_error, std::string(text),
                        "unknown node kind '" + std::string(text) + "'");
}

void VariantSpec::validate() const
{
    if (affix_text.empty()) {
        throw TaxonomyError(Code::invalid_variant, stem_class.text(), "variant affix text is empty");
    }
    if (!stem_class.is_nonterminal()) {
        throw TaxonomyError(Code::invalid_variant, stem_class.text(),
                            "variant stem class '" + stem_class.text() + "' is not a nonterminal");
    }
}

nlohmann::json variant_to_json(const VariantSpec& spec)
{
    return {{"affix_kind", spec.affix_kind == AffixKind::prefix ? "prefix" : "suffix"},
            {"affix_text", spec.affix_text},
            {"stem_class", spec.stem_class.text()}};
}

VariantSpec variant_from_json(const nlohmann::json& doc)
{
    VariantSpec spec;
    try {
        auto kind = doc.at("affix_kind").get<std::string>();
        if (kind == "prefix") {
            spec.affix_kind = AffixKind::prefix;
        } else if (kind == "suffix") {
            spec.affix_kind = AffixKind::suffix;
        } else {
            throw TaxonomyError(Code::invalid_variant, kind, "affix_kind must be prefix or suffix");
        }
        spec.affix_text = doc.at("affix_text").get<std::string>();
        spec.stem_class = Symbol(doc.at("stem_class").get<std::string>());
    } catch (const nlohmann::json::exception& ex) {
        throw TaxonomyError(Code::invalid_variant, "", std::string("malformed variant: ") + ex.what());
    } catch (const GraphError& ex) {
        throw TaxonomyError(Code::invalid_variant, "", std::string("malformed variant: ") + ex.what());
    }
    spec.validate();
    return spec;
}

Symbol variant_label(const VariantSpec& spec, const Symbol& stem)
{
    spec.validate();
    if (stem.is_nonterminal()) {
        throw TaxonomyError(Code::invalid_variant, stem.text(),
                            "variant stem '" + stem.text() + "' must be a terminal");
    }
    if (spec.affix_kind == AffixKind::suffix) {
        return Symbol(stem.text() + spec.affix_text);
    }
    std::string body = stem.text();
    bool acronym = body.size() > 1 && std::isupper(static_cast<unsigned char>(body[1]));
    if (!acronym) {
        body[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(body[0])));
    }
    return Symbol(spec.affix_text + body);
}

// ---------------------------------------------------------------------------

Taxonomy::Taxonomy() : tree_(std::make_shared<Tree>()) {}

Taxonomy Taxonomy::parse(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw TaxonomyError(Code::parse_error, "", std::string("taxonomy parse error: ") + ex.what());
    }
    return from_json(doc);
}

Taxonomy Taxonomy::from_json(const nlohmann::json& doc)
{
    auto tree = std::make_shared<Tree>();
    try {
        for (const auto& entry : doc.at("classes")) {
            TaxonomyClass cls{Symbol(entry.at("name").get<std::string>()), {}, {}, {}, false};
            if (!cls.name.is_nonterminal()) {
                throw TaxonomyError(Code::parse_error, cls.name.text(),
                                    "class name '" + cls.name.text() + "' must be in angle brackets");
            }
            if (entry.contains("parent") && !entry.at("parent").is_null()) {
                cls.parent = Symbol(entry.at("parent").get<std::string>());
            }
            if (entry.contains("kind") && !entry.at("kind").is_null()) {
                cls.kind = node_kind_from_string(entry.at("kind").get<std::string>());
            }
            if (entry.contains("variant") && !entry.at("variant").is_null()) {
                cls.variant = variant_from_json(entry.at("variant"));
            }
            cls.emphasis = entry.value("emphasis", false);
            auto name = cls.name;
            if (!tree->classes.emplace(name, std::move(cls)).second) {
                throw TaxonomyError(Code::duplicate_class, name.text(),
                                    "duplicate class '" + name.text() + "'");
            }
        }
    } catch (const nlohmann::json::exception& ex) {
        throw TaxonomyError(Code::parse_error, "", std::string("malformed taxonomy: ") + ex.what());
    } catch (const GraphError& ex) {
        throw TaxonomyError(Code::parse_error, "", std::string("malformed taxonomy: ") + ex.what());
    }

    for (const auto& [name, cls] : tree->classes) {
        if (!cls.parent) {
            if (tree->root) {
                throw TaxonomyError(Code::multiple_roots, name.text(),
                                    "classes '" + tree->root->text() + "' and '" + name.text() +
                                        "' both lack a parent");
            }
            tree->root = name;
            continue;
        }
        if (!tree->classes.contains(*cls.parent)) {
            throw TaxonomyError(Code::unknown_class, name.text(),
                                "class '" + name.text() + "' has unknown parent '" +
                                    cls.parent->text() + "'");
        }
        tree->children[*cls.parent].push_back(name);
    }
    // Every class must reach the root without revisiting itself.
    for (const auto& [name, cls] : tree->classes) {
        std::set<Symbol> seen{name};
        auto cur = cls.parent;
        while (cur) {
            if (!seen.insert(*cur).second) {
                throw TaxonomyError(Code::cyclic_parent, name.text(),
                                    "parent links of class '" + name.text() + "' form a cycle");
            }
            cur = tree->classes.at(*cur).parent;
        }
    }
    if (!tree->classes.empty() && !tree->root) {
        throw TaxonomyError(Code::cyclic_parent, tree->classes.begin()->first.text(),
                            "taxonomy has no root class");
    }
    for (const auto& [name, cls] : tree->classes) {
        if (cls.variant && !tree->classes.contains(cls.variant->stem_class)) {
            throw TaxonomyError(Code::unknown_class, name.text(),
                                "variant of class '" + name.text() + "' names unknown stem class '" +
                                    cls.variant->stem_class.text() + "'");
        }
    }

    Taxonomy t;
    t.tree_ = std::move(tree);
    if (doc.contains("terminals")) {
        t.merge_vocabulary(doc);
    }
    return t;
}

void Taxonomy::merge_vocabulary(const nlohmann::json& doc)
{
    try {
        for (const auto& entry : doc.at("terminals")) {
            Symbol term(entry.at("term").get<std::string>());
            std::set<Symbol> classes;
            for (const auto& c : entry.at("classes")) {
                classes.insert(Symbol(c.get<std::string>()));
            }
            register_terminal(term, classes);
        }
    } catch (const nlohmann::json::exception& ex) {
        throw TaxonomyError(Code::parse_error, "", std::string("malformed vocabulary: ") + ex.what());
    } catch (const GraphError& ex) {
        throw TaxonomyError(Code::parse_error, "", std::string("malformed vocabulary: ") + ex.what());
    }
}

void Taxonomy::require_class(const Symbol& name) const
{
    if (!has_class(name)) {
        std::string valid;
        for (const auto& [n, _] : tree_->classes) {
            valid += (valid.empty() ? "" : ", ") + n.text();
        }
        throw TaxonomyError(Code::unknown_class, name.text(),
                            "unknown class '" + name.text() + "' (valid classes: " + valid + ")");
    }
}

bool Taxonomy::has_class(const Symbol& name) const { return tree_->classes.contains(name); }

const TaxonomyClass& Taxonomy::get_class(const Symbol& name) const
{
    require_class(name);
    return tree_->classes.at(name);
}

const Symbol& Taxonomy::root() const
{
    if (!tree_->root) {
        throw TaxonomyError(Code::unknown_class, "", "empty taxonomy has no root");
    }
    return *tree_->root;
}

std::vector<Symbol> Taxonomy::class_names() const
{
    std::vector<Symbol> out;
    for (const auto& [name, _] : tree_->classes) {
        out.push_back(name);
    }
    return out;
}

std::vector<Symbol> Taxonomy::children(const Symbol& name) const
{
    require_class(name);
    auto it = tree_->children.find(name);
    return it == tree_->children.end() ? std::vector<Symbol>{} : it->second;
}

bool Taxonomy::is_subclass(const Symbol& cls, const Symbol& ancestor) const
{
    if (!has_class(cls)) {
        return false;
    }
    std::optional<Symbol> cur = cls;
    while (cur) {
        if (*cur == ancestor) {
            return true;
        }
        cur = tree_->classes.at(*cur).parent;
    }
    return false;
}

bool Taxonomy::label_matches(const Symbol& host_label, const Symbol& pattern_label) const
{
    if (pattern_label.is_terminal()) {
        return host_label == pattern_label;
    }
    require_class(pattern_label);
    if (host_label.is_nonterminal()) {
        return is_subclass(host_label, pattern_label);
    }
    auto it = terminals_.find(host_label);
    if (it == terminals_.end()) {
        return false;
    }
    for (const auto& cls : it->second) {
        if (is_subclass(cls, pattern_label)) {
            return true;
        }
    }
    return false;
}

bool Taxonomy::is_classified(const Symbol& term) const { return terminals_.contains(term); }

const std::set<Symbol>& Taxonomy::classes_of(const Symbol& term) const
{
    static const std::set<Symbol> none;
    auto it = terminals_.find(term);
    return it == terminals_.end() ? none : it->second;
}

void Taxonomy::register_terminal(const Symbol& term, const std::set<Symbol>& classes)
{
    if (term.is_nonterminal()) {
        throw TaxonomyError(Code::parse_error, term.text(),
                            "cannot register nonterminal '" + term.text() + "' as a term");
    }
    for (const auto& cls : classes) {
        require_class(cls);
    }
    terminals_[term].insert(classes.begin(), classes.end());
}

Symbol Taxonomy::synthesize_variant(const VariantSpec& spec, const Symbol& stem,
                                    const Symbol& variant_class)
{
    auto label = variant_label(spec, stem);
    register_terminal(label, {variant_class});
    return label;
}

std::optional<NodeKind> Taxonomy::class_kind(const Symbol& cls) const
{
    require_class(cls);
    std::optional<Symbol> cur = cls;
    while (cur) {
        const auto& c = tree_->classes.at(*cur);
        if (c.kind) {
            return c.kind;
        }
        cur = c.parent;
    }
    return std::nullopt;
}

NodeKind Taxonomy::kind_of(const Symbol& label) const
{
    if (label.is_nonterminal()) {
        auto kind = class_kind(label);
        if (!kind) {
            throw TaxonomyError(Code::missing_kind, label.text(),
                                "no ancestor of '" + label.text() + "' declares a node kind");
        }
        return *kind;
    }
    const auto& classes = classes_of(label);
    if (classes.empty()) {
        throw TaxonomyError(Code::unclassified_term, label.text(),
                            "term '" + label.text() + "' is not classified");
    }
    std::optional<NodeKind> found;
    for (const auto& cls : classes) {
        auto kind = class_kind(cls);
        if (!kind) {
            continue;
        }
        if (found && *found != *kind) {
            throw TaxonomyError(Code::conflicting_kind, label.text(),
                                "term '" + label.text() + "' belongs to classes of different kinds");
        }
        found = kind;
    }
    if (!found) {
        throw TaxonomyError(Code::missing_kind, label.text(),
                            "no class of '" + label.text() + "' declares a node kind");
    }
    return *found;
}

bool Taxonomy::emphasized(const Symbol& label) const
{
    auto check = [&](const Symbol& cls) {
        std::optional<Symbol> cur = cls;
        while (cur) {
            const auto& c = tree_->classes.at(*cur);
            if (c.emphasis) {
                return true;
            }
            cur = c.parent;
        }
        return false;
    };
    if (label.is_nonterminal()) {
        return has_class(label) && check(label);
    }
    for (const auto& cls : classes_of(label)) {
        if (check(cls)) {
            return true;
        }
    }
    return false;
}

nlohmann::json Taxonomy::to_json() const
{
    auto classes = nlohmann::json::array();
    for (const auto& [name, cls] : tree_->classes) {
        nlohmann::json entry{{"name", name.text()}};
        if (cls.parent) {
            entry["parent"] = cls.parent->text();
        }
        if (cls.kind) {
            entry["kind"] = to_string(*cls.kind);
        }
        if (cls.variant) {
            entry["variant"] = variant_to_json(*cls.variant);
        }
        if (cls.emphasis) {
            entry["emphasis"] = true;
        }
        classes.push_back(std::move(entry));
    }
    auto terminals = nlohmann::json::array();
    for (const auto& [term, classes_of_term] : terminals_) {
        auto names = nlohmann::json::array();
        for (const auto& c : classes_of_term) {
            names.push_back(c.text());
        }
        terminals.push_back({{"term", term.text()}, {"classes", std::move(names)}});
    }
    return {{"classes", std::move(classes)}, {"terminals", std::move(terminals)}};
}

} // namespace qcidgram
