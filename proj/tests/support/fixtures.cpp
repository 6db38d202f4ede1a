#include "fixtures.hpp"

#include <nlohmann/json.hpp>

namespace fixtures {

const qcidgram::Bundle& medical()
{
    static const qcidgram::Bundle bundle = qcidgram::load_bundle(pack_dir);
    return bundle;
}

qcidgram::LabeledGraph appendicitis_expected()
{
    return qcidgram::graph_from_json(
        nlohmann::json::parse(qcidgram::read_file(pack_dir + "/examples/appendicitis.expected.json")));
}

qcidgram::Taxonomy appendicitis_taxonomy()
{
    auto t = medical().taxonomy;
    qcidgram::Symbol future("<future disease>");
    t.synthesize_variant(*t.get_class(future).variant, qcidgram::Symbol("Appendicitis"), future);
    return t;
}

std::vector<qcidgram::Symbol> symbols(const std::vector<std::string>& texts)
{
    std::vector<qcidgram::Symbol> out;
    for (const auto& t : texts) {
        out.emplace_back(t);
    }
    return out;
}

std::vector<qcidgram::Symbol> example_terms(const std::string& file)
{
    auto doc = nlohmann::json::parse(qcidgram::read_file(pack_dir + "/examples/" + file));
    return symbols(doc.at("terms").get<std::vector<std::string>>());
}

} // namespace fixtures
