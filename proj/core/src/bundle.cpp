#include <qcidgram/bundle.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace qcidgram {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw BundleError(path, "cannot open file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Grammar bind_grammar(const Grammar& grammar, const Taxonomy& taxonomy)
{
    using Code = GrammarError::Code;
    Grammar out;
    out.edge_labels = grammar.edge_labels;
    out.initial_graph = grammar.initial_graph;
    for (const auto& p : grammar.productions) {
        auto vertices = p.vertex_list();
        for (auto& v : vertices) {
            if (v.label.is_nonterminal() && !taxonomy.has_class(v.label)) {
                throw GrammarError(Code::invalid_label, p.name(),
                                   "vertex '" + v.name + "' uses class " + v.label.text() +
                                       " which the taxonomy does not define");
            }
            if (v.region == Region::right && !v.variant && v.label.is_nonterminal()) {
                v.variant = taxonomy.get_class(v.label).variant;
            }
            if (v.variant && !taxonomy.has_class(v.variant->stem_class)) {
                throw GrammarError(Code::dangling_stem_class, p.name(),
                                   "vertex '" + v.name + "' names stem class " +
                                       v.variant->stem_class.text() + " which the taxonomy does not define");
            }
        }
        std::vector<std::tuple<std::string, std::string, EdgeLabel>> edges;
        for (const auto& e : p.pattern().edges()) {
            edges.emplace_back(p.vertex_name(e.from), p.vertex_name(e.to), e.label);
        }
        out.productions.emplace_back(p.name(), std::move(vertices), std::move(edges));
    }
    for (const auto& [v, label] : out.initial_graph.vertices()) {
        if (label.is_nonterminal() || !taxonomy.is_classified(label)) {
            throw GrammarError(Code::invalid_label, "",
                               "initial graph vertex '" + label.text() + "' is not a classified term");
        }
    }
    return out;
}

Bundle load_bundle(const fs::path& root)
{
    if (!fs::is_directory(root)) {
        throw BundleError(root, "bundle directory does not exist");
    }
    auto parse_json = [](const fs::path& file) {
        if (!fs::exists(file)) {
            throw BundleError(file, "missing bundle file");
        }
        try {
            return nlohmann::json::parse(read_file(file));
        } catch (const nlohmann::json::parse_error& ex) {
            throw BundleError(file, ex.what());
        }
    };
    const auto grammar_file = root / "grammar.json";
    const auto taxonomy_file = root / "taxonomy.json";
    const auto vocabulary_file = root / "vocabulary.json";
    auto grammar_doc = parse_json(grammar_file);
    auto taxonomy_doc = parse_json(taxonomy_file);
    auto vocabulary_doc = parse_json(vocabulary_file);

    Bundle b;
    b.root = root;
    try {
        b.taxonomy = Taxonomy::from_json(taxonomy_doc);
    } catch (const Error& ex) {
        throw BundleError(taxonomy_file, ex.what());
    }
    try {
        b.taxonomy.merge_vocabulary(vocabulary_doc);
    } catch (const Error& ex) {
        throw BundleError(vocabulary_file, ex.what());
    }
    try {
        b.grammar = bind_grammar(parse_grammar(grammar_doc), b.taxonomy);
    } catch (const Error& ex) {
        throw BundleError(grammar_file, ex.what());
    }
    for (const auto& p : b.grammar.productions) {
        if (p.nonterminal_count() > max_nonterminals_per_rule) {
            throw BundleError(grammar_file, "production '" + p.name() + "' uses " +
                                                std::to_string(p.nonterminal_count()) +
                                                " nonterminals (limit " +
                                                std::to_string(max_nonterminals_per_rule) + ")");
        }
    }
    if (fs::is_directory(root / "examples")) {
        for (const auto& entry : fs::directory_iterator(root / "examples")) {
            b.examples.push_back(entry.path());
        }
        std::sort(b.examples.begin(), b.examples.end());
    }
    return b;
}

} // namespace qcidgram
