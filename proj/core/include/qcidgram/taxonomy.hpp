#pragma once

#include <qcidgram/error.hpp>
#include <qcidgram/graph.hpp>

#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qcidgram {

enum class NodeKind { decision, chance, utility };

std::string_view to_string(NodeKind kind) noexcept;
NodeKind node_kind_from_string(std::string_view text);

class TaxonomyError : public Error {
public:
    enum class Code {
        parse_error,
        duplicate_class,
        cyclic_parent,
        unknown_class,
        multiple_roots,
        invalid_variant,
        unclassified_term,
        missing_kind,
        conflicting_kind,
    };

    TaxonomyError(Code code, std::string subject, const std::string& message)
        : Error(message), code_(code), subject_(std::move(subject))
    {
    }

    Code code() const noexcept { return code_; }
    /// Class or term the error is about.
    const std::string& subject() const noexcept { return subject_; }

private:
    Code code_;
    std::string subject_;
};

enum class AffixKind { prefix, suffix };

/// How a variant label is built from a stem: "Future " + "Appendicitis" -> "Future appendicitis".
struct VariantSpec {
    AffixKind affix_kind = AffixKind::prefix;
    std::string affix_text;
    Symbol stem_class{"<?>"};

    /// Throws TaxonomyError(invalid_variant) on an empty affix or a terminal stem class.
    void validate() const;
    bool operator==(const VariantSpec&) const = default;
};

nlohmann::json variant_to_json(const VariantSpec& spec);
VariantSpec variant_from_json(const nlohmann::json& doc);

/// Pure label synthesis. A prefix lower-cases the stem's first letter unless the
/// stem opens with an acronym ("EKG").
Symbol variant_label(const VariantSpec& spec, const Symbol& stem);

struct TaxonomyClass {
    Symbol name;
    std::optional<Symbol> parent;
    std::optional<NodeKind> kind;
    std::optional<VariantSpec> variant;
    // Rendering hint only (dark fill for disease-like chance nodes).
    bool emphasis = false;
};

/// Classification tree over nonterminal classes plus a vocabulary of terminal terms.
///
/// The class tree is immutable and shared between copies; the vocabulary is a value,
/// so a derivation session can register variants and manually classified terms on
/// its own copy without touching anyone else's.
class Taxonomy {
public:
    Taxonomy();

    /// Parse and validate a taxonomy document
    /// (`classes: [{name, parent?, kind?, variant?}]`, optional `terminals: [{term, classes}]`).
    static Taxonomy from_json(const nlohmann::json& doc);
    static Taxonomy parse(std::string_view text);

    /// Adds every `terminals` entry from a vocabulary document.
    void merge_vocabulary(const nlohmann::json& doc);

    bool has_class(const Symbol& name) const;
    const TaxonomyClass& get_class(const Symbol& name) const;
    const Symbol& root() const;
    std::vector<Symbol> class_names() const;
    std::vector<Symbol> children(const Symbol& name) const;

    /// Reflexive: a class is a subclass of itself.
    bool is_subclass(const Symbol& cls, const Symbol& ancestor) const;

    bool label_matches(const Symbol& host_label, const Symbol& pattern_label) const;

    bool is_classified(const Symbol& term) const;
    const std::set<Symbol>& classes_of(const Symbol& term) const;
    const std::map<Symbol, std::set<Symbol>>& vocabulary() const noexcept { return terminals_; }

    /// Union semantics: registering a known term again adds classes.
    void register_terminal(const Symbol& term, const std::set<Symbol>& classes);

    /// Builds the variant label and files it under `variant_class`.
    Symbol synthesize_variant(const VariantSpec& spec, const Symbol& stem, const Symbol& variant_class);

    /// Nearest-ancestor kind of a class, or of the classes a terminal belongs to.
    NodeKind kind_of(const Symbol& label) const;
    std::optional<NodeKind> class_kind(const Symbol& cls) const;
    bool emphasized(const Symbol& label) const;

    nlohmann::json to_json() const;

private:
    struct Tree {
        std::map<Symbol, TaxonomyClass> classes;
        std::map<Symbol, std::vector<Symbol>> children;
        std::optional<Symbol> root;
    };

    void require_class(const Symbol& name) const;

    std::shared_ptr<const Tree> tree_;
    std::map<Symbol, std::set<Symbol>> terminals_;
};

} // namespace qcidgram
