#include "fixtures.hpp"

#include <qcidgram/export.hpp>
#include <qcidgram/service.hpp>

#include <doctest.h>
#include <httplib.h>

#include <thread>

using namespace qcidgram;
using nlohmann::json;

namespace {

SessionStore make_store() { return SessionStore(fixtures::medical()); }

json body(const ServiceResponse& r) { return json::parse(r.body); }

LabeledGraph diagram_graph(const json& diagram) { return model_from_diagram(diagram).graph; }

const std::string two_disease = R"({"terms": ["Appendicitis", "Pneumonia", "Antibiotic therapy"], "mode": "interactive"})";

} // namespace

TEST_CASE("a policy session completes immediately")
{
    auto store = make_store();
    auto r = store.create(R"({"terms": ["Appendicitis", "Appendectomy"], "mode": "policy"})");
    REQUIRE(r.status == 201);
    auto s = body(r);
    CHECK(s.at("status") == "completed");
    CHECK(s.at("pending").is_null());
    CHECK(isomorphic(diagram_graph(s.at("diagram")), fixtures::appendicitis_expected()));
    CHECK(s.at("stages").size() == 2);
    CHECK(s.at("stages")[0].at("diagram").at("nodes").size() == 2);
    CHECK(s.at("applications").size() == 2);
    CHECK(s.contains("report"));
    CHECK(s.contains("transcript"));
}

TEST_CASE("an ambiguous anchor waits for a choice")
{
    auto store = make_store();
    auto s = body(store.create(two_disease));
    auto id = s.at("id").get<std::string>();
    REQUIRE(s.at("status") == "awaiting_choice");
    const auto& pending = s.at("pending");
    CHECK(pending.at("kind") == "anchor_selection");
    CHECK(pending.at("candidates").size() == 2);
    CHECK_FALSE(pending.at("candidates")[0].at("highlight").empty());
    CHECK(s.at("stages").size() == 1);
    CHECK(s.at("diagram").at("nodes").size() == 3);

    SUBCASE("stale or invalid answers leave the state untouched")
    {
        auto before = store.get(id).body;
        auto stale = store.choose(id, json{{"request_id", pending.at("id").get<int>() + 5}, {"answer", 0}}.dump());
        CHECK(stale.status == 409);
        auto range = store.choose(id, json{{"request_id", pending.at("id")}, {"answer", 9}}.dump());
        CHECK(range.status == 400);
        CHECK(store.choose(id, "{]").status == 400);
        CHECK(store.get(id).body == before);
    }

    SUBCASE("answering completes the session like a scripted run")
    {
        auto done = store.choose(id, json{{"request_id", pending.at("id")}, {"answer", 1}}.dump());
        REQUIRE(done.status == 200);
        auto final_state = body(done);
        CHECK(final_state.at("status") == "completed");
        CHECK(final_state.at("answers") == json::array({1}));

        ScriptedChoices script({1});
        const auto& b = fixtures::medical();
        auto direct = derive(b.grammar, b.taxonomy, fixtures::symbols({"Appendicitis", "Pneumonia", "Antibiotic therapy"}),
                             script);
        CHECK(isomorphic(diagram_graph(final_state.at("diagram")), direct.graph));

        auto again = store.choose(id, json{{"request_id", pending.at("id")}, {"answer", 0}}.dump());
        CHECK(again.status == 409);
    }
}

TEST_CASE("script sessions resume where the script ends")
{
    auto store = make_store();
    auto s = body(store.create(R"({"terms": ["Appendicitis", "Pneumonia", "Perforation"], "mode": "script", "script": [0]})"));
    CHECK(s.at("status") == "awaiting_choice");
    CHECK(s.at("pending").at("kind") == "extension_confirmation");
    auto done = body(store.choose(s.at("id"), json{{"request_id", s.at("pending").at("id")}, {"answer", 1}}.dump()));
    CHECK(done.at("status") == "completed");
}

TEST_CASE("failed and erroneous sessions")
{
    auto store = make_store();
    auto failed = body(store.create(R"({"terms": ["Appendectomy"], "mode": "policy"})"));
    CHECK(failed.at("status") == "failed");
    CHECK(failed.at("error").get<std::string>().find("Appendectomy") != std::string::npos);

    auto declined = body(store.create(R"({"terms": ["Zebra fever"], "mode": "policy"})"));
    CHECK(declined.at("status") == "error");

    CHECK(store.create(R"({"terms": ["Fever", "Fever"]})").status == 400);
    CHECK(store.create(R"({"terms": ["<finding>"]})").status == 400);
    CHECK(store.create(R"({"terms": ["Fever"], "mode": "psychic"})").status == 400);
    CHECK(store.create(R"({"mode": "policy"})").status == 400);
    CHECK(store.create("not json").status == 400);
}

TEST_CASE("diagrams, deletion and unknown sessions")
{
    auto store = make_store();
    auto id = body(store.create(R"({"terms": ["Appendicitis", "Appendectomy"], "mode": "policy"})")).at("id").get<std::string>();

    auto structured = store.diagram(id, false);
    CHECK(structured.status == 200);
    CHECK(structured.content_type == "application/json");
    CHECK(body(structured).at("nodes").size() == 4);

    auto dot = store.diagram(id, true);
    CHECK(dot.status == 200);
    CHECK(dot.content_type == "text/vnd.graphviz");
    CHECK(dot.body.rfind("digraph qcid {", 0) == 0);

    CHECK(store.remove(id).status == 204);
    CHECK(store.size() == 0);
    CHECK(store.get(id).status == 404);
    CHECK(store.choose(id, "{}").status == 404);
    CHECK(store.diagram(id, false).status == 404);
    CHECK(store.remove(id).status == 404);
}

TEST_CASE("concurrent sessions stay isolated")
{
    auto store = make_store();
    std::vector<std::thread> workers;
    std::vector<int> ok(8, 0);
    for (int w = 0; w < 8; ++w) {
        workers.emplace_back([&, w] {
            auto s = json::parse(store.create(two_disease).body);
            auto id = s.at("id").get<std::string>();
            auto answer = w % 2;
            auto done = json::parse(
                store.choose(id, json{{"request_id", s.at("pending").at("id")}, {"answer", answer}}.dump()).body);
            ok[w] = done.at("status") == "completed" && done.at("answers") == json::array({answer});
        });
    }
    for (auto& t : workers) {
        t.join();
    }
    CHECK(std::count(ok.begin(), ok.end(), 1) == 8);
    CHECK(store.size() == 8);
}

TEST_CASE("the HTTP front end")
{
    auto store = make_store();
    HttpService service(store);
    int port = service.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread server([&] { service.listen(); });

    httplib::Client client("127.0.0.1", port);
    auto created = client.Post("/sessions", two_disease, "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    auto s = json::parse(created->body);
    auto id = s.at("id").get<std::string>();

    auto state = client.Get("/sessions/" + id);
    REQUIRE(state);
    CHECK(json::parse(state->body).at("status") == "awaiting_choice");

    auto stale = client.Post("/sessions/" + id + "/choices", json{{"request_id", 999}, {"answer", 0}}.dump(),
                             "application/json");
    REQUIRE(stale);
    CHECK(stale->status == 409);

    auto answered = client.Post("/sessions/" + id + "/choices",
                                json{{"request_id", s.at("pending").at("id")}, {"answer", 0}}.dump(), "application/json");
    REQUIRE(answered);
    CHECK(json::parse(answered->body).at("status") == "completed");

    auto dot = client.Get("/sessions/" + id + "/diagram", {{"Accept", "text/vnd.graphviz"}});
    REQUIRE(dot);
    CHECK(dot->get_header_value("Content-Type") == "text/vnd.graphviz");
    auto dot_query = client.Get("/sessions/" + id + "/diagram?format=dot");
    REQUIRE(dot_query);
    CHECK(dot_query->body == dot->body);
    auto structured = client.Get("/sessions/" + id + "/diagram");
    REQUIRE(structured);
    CHECK(json::parse(structured->body).at("nodes").size() == 4);

    auto missing = client.Get("/sessions/nope");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    auto deleted = client.Delete("/sessions/" + id);
    REQUIRE(deleted);
    CHECK(deleted->status == 204);
    auto gone = client.Get("/sessions/" + id);
    REQUIRE(gone);
    CHECK(gone->status == 404);

    service.stop();
    server.join();
}

TEST_CASE("binding a port in use fails")
{
    auto store = make_store();
    HttpService first(store);
    int port = first.bind("127.0.0.1", 0);
    HttpService second(store);
    CHECK_THROWS_AS(second.bind("127.0.0.1", port), Error);
}
