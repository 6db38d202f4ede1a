#include <benchmark/benchmark.h>

#include <qcidgram/bundle.hpp>
#include <qcidgram/derivation.hpp>
#include <qcidgram/export.hpp>
#include <qcidgram/qcid.hpp>

#include <filesystem>

using namespace qcidgram;

namespace {

const Bundle& pack()
{
    static const Bundle b = load_bundle(QCIDGRAM_PACK_DIR);
    return b;
}

std::vector<Symbol> terms_of(const std::string& file)
{
    auto doc = nlohmann::json::parse(read_file(pack().root / "examples" / file));
    std::vector<Symbol> out;
    for (const auto& t : doc.at("terms")) {
        out.emplace_back(t.get<std::string>());
    }
    return out;
}

std::vector<std::size_t> scale_answers()
{
    return answers_from_json(nlohmann::json::parse(read_file(pack().root / "examples" / "scale.script.json")));
}

DerivationResult scale_result()
{
    auto terms = terms_of("scale.terms.json");
    ScriptedChoices script(scale_answers());
    return derive(pack().grammar, pack().taxonomy, terms, script);
}

} // namespace

static void BM_derive_appendicitis(benchmark::State& state)
{
    auto terms = terms_of("appendicitis.terms.json");
    for (auto _ : state) {
        FirstCandidatePolicy policy;
        auto r = derive(pack().grammar, pack().taxonomy, terms, policy);
        benchmark::DoNotOptimize(r.graph);
    }
}
BENCHMARK(BM_derive_appendicitis)->Unit(benchmark::kMicrosecond);

static void BM_derive_scale_scripted(benchmark::State& state)
{
    auto terms = terms_of("scale.terms.json");
    auto answers = scale_answers();
    for (auto _ : state) {
        ScriptedChoices script(answers);
        auto r = derive(pack().grammar, pack().taxonomy, terms, script);
        benchmark::DoNotOptimize(r.graph);
    }
}
BENCHMARK(BM_derive_scale_scripted)->Unit(benchmark::kMillisecond);

static void BM_find_anchors_all_rules(benchmark::State& state)
{
    auto r = scale_result();
    std::size_t found = 0;
    for (auto _ : state) {
        for (const auto& p : pack().grammar.productions) {
            found += find_anchors(p, r.graph, r.taxonomy).size();
        }
    }
    benchmark::DoNotOptimize(found);
    state.counters["vertices"] = static_cast<double>(r.graph.vertex_count());
}
BENCHMARK(BM_find_anchors_all_rules)->Unit(benchmark::kMicrosecond);

static void BM_check_properties(benchmark::State& state)
{
    auto r = scale_result();
    auto m = classify_model(r.graph, r.taxonomy);
    for (auto _ : state) {
        auto report = check_properties(m);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_check_properties)->Unit(benchmark::kMicrosecond);

static void BM_layout_and_export(benchmark::State& state)
{
    auto r = scale_result();
    auto m = classify_model(r.graph, r.taxonomy);
    for (auto _ : state) {
        auto coords = layout(m);
        auto doc = to_diagram(m, coords);
        auto dot = to_dot(m, &coords);
        benchmark::DoNotOptimize(doc);
        benchmark::DoNotOptimize(dot);
    }
}
BENCHMARK(BM_layout_and_export)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
