#include "fixtures.hpp"
#include "oracles.hpp"

#include <qcidgram/matcher.hpp>

#include <doctest.h>

#include <random>

using namespace qcidgram;

namespace {

VertexId V(std::uint32_t v) { return VertexId{v}; }

LabeledGraph appendicitis_host()
{
    LabeledGraph g;
    g.add_vertex(V(0), Symbol("Value to patient"));
    g.add_vertex(V(1), Symbol("Appendicitis"));
    g.add_edge({V(1), V(0), EdgeLabel::minus});
    return g;
}

std::vector<std::map<VertexId, VertexId>> anchor_maps(const std::vector<Anchor>& anchors)
{
    std::vector<std::map<VertexId, VertexId>> out;
    for (const auto& a : anchors) {
        out.push_back(a.vertex_map);
    }
    return out;
}

} // namespace

TEST_CASE("the ablative rule anchors once on the one-disease host")
{
    const auto& b = fixtures::medical();
    const auto& p = b.grammar.find("ablative treatment");
    auto anchors = find_anchors(p, appendicitis_host(), b.taxonomy);
    REQUIRE(anchors.size() == 1);
    CHECK(anchors[0].vertex_map.at(p.vertex_by_name("u")) == V(0));
    CHECK(anchors[0].vertex_map.at(p.vertex_by_name("d")) == V(1));
}

TEST_CASE("the anchor needs the disease-to-utility arc")
{
    const auto& b = fixtures::medical();
    auto host = appendicitis_host();
    host.remove_edge({V(1), V(0), EdgeLabel::minus});
    CHECK(find_anchors(b.grammar.find("ablative treatment"), host, b.taxonomy).empty());
}

TEST_CASE("a rule with nothing to anchor has exactly one empty anchor")
{
    auto p = oracle::make_production("insert", {"r:<a>:right"}, {});
    auto t = oracle::toy_taxonomy();
    std::mt19937 rng(3);
    auto anchors = find_anchors(p, oracle::random_host(rng, 5, 0.3), t);
    REQUIRE(anchors.size() == 1);
    CHECK(anchors[0].vertex_map.empty());
    CHECK(find_anchors(p, LabeledGraph{}, t).size() == 1);
}

TEST_CASE("two disease nodes give two anchors")
{
    const auto& b = fixtures::medical();
    const auto& p = b.grammar.find("ablative treatment");
    auto host = appendicitis_host();
    host.add_vertex(V(2), Symbol("Pneumonia"));
    host.add_edge({V(2), V(0), EdgeLabel::minus});
    host.add_vertex(V(3), Symbol("Fever"));
    host.add_edge({V(3), V(0), EdgeLabel::minus});
    auto anchors = find_anchors(p, host, b.taxonomy);
    CHECK(anchors.size() == 2);
    CHECK(anchor_maps(anchors) == oracle::all_maps(p.pattern(), p.anchor_domain(), host, b.taxonomy));
}

TEST_CASE("extensions")
{
    const auto& b = fixtures::medical();
    auto host = appendicitis_host();
    host.add_vertex(V(2), Symbol("Abdominal CT"));
    host.add_vertex(V(3), Symbol("Chest radiograph"));

    SUBCASE("no above region means no components")
    {
        const auto& p = b.grammar.find("ablative treatment");
        auto a = find_anchors(p, host, b.taxonomy).at(0);
        CHECK(enumerate_extensions(p, a, host, b.taxonomy).empty());
    }

    SUBCASE("one above test vertex with two matching hosts")
    {
        auto p = oracle::make_production("testing", {"d:<present disease>:below", "x:<test>:above",
                                                     "r:<outcome>:right"},
                                         {"d>r:plus", "x>r:plus"});
        auto anchors = find_anchors(p, host, b.taxonomy);
        REQUIRE(anchors.size() == 1);
        auto comps = enumerate_extensions(p, anchors[0], host, b.taxonomy);
        REQUIRE(comps.size() == 1);
        CHECK(comps[0].extensions.size() == 2);
        std::vector<std::map<VertexId, VertexId>> ours;
        for (const auto& e : comps[0].extensions) {
            ours.push_back(e.vertex_map);
        }
        CHECK(ours == oracle::all_maps(p.pattern(), comps[0].members, host, b.taxonomy, anchors[0].vertex_map));
    }

    SUBCASE("a component with no match is present and empty")
    {
        auto p = oracle::make_production("testing", {"d:<present disease>:below", "x:<lab test>:above"}, {});
        auto anchors = find_anchors(p, host, b.taxonomy);
        REQUIRE(anchors.size() == 1);
        auto comps = enumerate_extensions(p, anchors[0], host, b.taxonomy);
        REQUIRE(comps.size() == 1);
        CHECK(comps[0].extensions.empty());
    }
}

TEST_CASE("extensions never reuse anchored host vertices")
{
    const auto& b = fixtures::medical();
    const auto& p = b.grammar.find("disease complication");
    auto host = appendicitis_host();
    host.add_vertex(V(2), Symbol("Pneumonia"));
    host.add_edge({V(2), V(0), EdgeLabel::minus});
    for (const auto& a : find_anchors(p, host, b.taxonomy)) {
        auto comps = enumerate_extensions(p, a, host, b.taxonomy);
        REQUIRE(comps.size() == 1);
        REQUIRE(comps[0].extensions.size() == 1);
        auto image = comps[0].extensions[0].vertex_map.begin()->second;
        CHECK(image != a.vertex_map.at(p.vertex_by_name("d")));
    }
}

TEST_CASE("Old edges")
{
    auto t = oracle::toy_taxonomy();
    LabeledGraph host;
    host.add_vertex(V(0), Symbol("x1"));
    host.add_vertex(V(1), Symbol("z1"));
    host.add_vertex(V(2), Symbol("y1"));
    host.add_edge({V(0), V(1), EdgeLabel::plus});

    SUBCASE("nothing to delete")
    {
        auto p = oracle::make_production("ins", {"b:<b>:below", "r:<a>:right"}, {"r>b:plus"});
        auto a = find_anchors(p, host, t).at(0);
        CHECK(anchor_old_edges(a, p).empty());
        CHECK(applicable(p, a, {}, host));
    }

    SUBCASE("a left vertex linked to a below vertex")
    {
        auto p = oracle::make_production("del", {"l:<a1>:left", "b:<b>:below"}, {"l>b:plus"});
        auto anchors = find_anchors(p, host, t);
        REQUIRE(anchors.size() == 1);
        CHECK(anchor_old_edges(anchors[0], p) == std::set<Edge>{{V(0), V(1), EdgeLabel::plus}});
        CHECK(applicable(p, anchors[0], {}, host));

        auto stray = host;
        stray.add_edge({V(2), V(0), EdgeLabel::minus});
        auto again = find_anchors(p, stray, t);
        REQUIRE(again.size() == 1);
        CHECK_FALSE(applicable(p, again[0], {}, stray));
        CHECK_FALSE(oracle::dangling_free(p, again[0].vertex_map, {}, stray));
    }

    SUBCASE("orientation matters for above-region edges")
    {
        auto p = oracle::make_production("del", {"l:<a1>:left", "a:<a2>:above"}, {"a>l:plus"});
        auto reversed = host;
        reversed.add_edge({V(0), V(2), EdgeLabel::plus});
        auto anchors = find_anchors(p, reversed, t);
        REQUIRE(anchors.size() == 1);
        Extension forced{anchors[0], 0, {{p.vertex_by_name("a"), V(2)}}};
        auto old = old_edges(forced, p);
        CHECK(old == std::set<Edge>{{V(2), V(0), EdgeLabel::plus}});
        CHECK_FALSE(old.contains({V(0), V(2), EdgeLabel::plus}));
        CHECK(enumerate_extensions(p, anchors[0], reversed, t).at(0).extensions.empty());
    }

    SUBCASE("confirmed extensions cover the edges they explain")
    {
        auto p = oracle::make_production("del", {"l:<a1>:left", "a:<a2>:above"}, {"l>a:plus"});
        auto h = host;
        h.remove_edge({V(0), V(1), EdgeLabel::plus});
        h.add_edge({V(0), V(2), EdgeLabel::plus});
        auto anchors = find_anchors(p, h, t);
        REQUIRE(anchors.size() == 1);
        auto comps = enumerate_extensions(p, anchors[0], h, t);
        REQUIRE(comps.at(0).extensions.size() == 1);
        CHECK_FALSE(applicable(p, anchors[0], {}, h));
        CHECK(applicable(p, anchors[0], comps[0].extensions, h));
    }
}

TEST_CASE("overlapping confirmations across components are rejected")
{
    auto t = oracle::toy_taxonomy();
    auto p = oracle::make_production("two", {"a:<a>:above", "c:<a>:above"}, {});
    LabeledGraph host;
    host.add_vertex(V(0), Symbol("x1"));
    auto a = find_anchors(p, host, t).at(0);
    auto comps = enumerate_extensions(p, a, host, t);
    REQUIRE(comps.size() == 2);
    std::vector<Extension> both{comps[0].extensions.at(0), comps[1].extensions.at(0)};
    CHECK_THROWS_AS(check_confirmation(both), MatchError);
}

TEST_CASE("anchors and extensions agree with brute force on random instances")
{
    auto t = oracle::toy_taxonomy();
    std::mt19937 rng(31);
    for (int round = 0; round < 300; ++round) {
        auto p = oracle::random_production(rng, {5, false, 0.3}, "p");
        auto host = oracle::random_host(rng, 6, 0.35);
        auto anchors = find_anchors(p, host, t);
        REQUIRE(anchor_maps(anchors) == oracle::all_maps(p.pattern(), p.anchor_domain(), host, t));
        for (const auto& a : anchors) {
            CHECK(valid_map(p, a.vertex_map, host, t));
            for (const auto& ce : enumerate_extensions(p, a, host, t)) {
                std::vector<std::map<VertexId, VertexId>> ours;
                for (const auto& e : ce.extensions) {
                    ours.push_back(e.vertex_map);
                }
                CHECK(ours == oracle::all_maps(p.pattern(), ce.members, host, t, a.vertex_map));
            }
        }
    }
}
