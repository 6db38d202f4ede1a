#pragma once

#include <qcidgram/grammar.hpp>
#include <qcidgram/taxonomy.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace qcidgram {

class BundleError : public Error {
public:
    BundleError(std::filesystem::path file, const std::string& reason)
        : Error(file.string() + ": " + reason), file_(std::move(file))
    {
    }

    const std::filesystem::path& file() const noexcept { return file_; }

private:
    std::filesystem::path file_;
};

inline constexpr std::size_t max_nonterminals_per_rule = 7;

/// A grammar pack directory: grammar.json, taxonomy.json, vocabulary.json, examples/.
struct Bundle {
    std::filesystem::path root;
    Grammar grammar;
    Taxonomy taxonomy;  // includes the vocabulary
    std::vector<std::filesystem::path> examples;
};

std::string read_file(const std::filesystem::path& path);

/// Loads and cross-validates a bundle: every nonterminal used by a rule is a taxonomy
/// class, rules stay within the nonterminal budget, variant classes fill in unannotated
/// right-region vertices, and initial-graph labels are classified.
Bundle load_bundle(const std::filesystem::path& root);

/// Cross-checks a grammar against a taxonomy; returns the grammar with taxonomy variant
/// markers applied to right-region vertices that carry none.
Grammar bind_grammar(const Grammar& grammar, const Taxonomy& taxonomy);

} // namespace qcidgram
