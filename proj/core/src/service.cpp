#include <qcidgram/service.hpp>

#include <qcidgram/export.hpp>
#include <qcidgram/qcid.hpp>

#include <httplib.h>

#include <set>

namespace qcidgram {

std::string_view to_string(SessionMode m) noexcept
{
    switch (m) {
    case SessionMode::interactive: return "interactive";
    case SessionMode::policy: return "policy";
    case SessionMode::script: return "script";
    }
    return "interactive";
}

struct SessionStore::Session {
    std::mutex mutex;
    std::string id;
    std::vector<Symbol> terms;
    SessionMode mode = SessionMode::interactive;
    std::vector<std::size_t> script;
    std::vector<std::size_t> answers;

    std::string status;
    std::optional<ChoiceRequest> pending;
    std::string error;
    nlohmann::json stages = nlohmann::json::array();
    nlohmann::json diagram;
    std::string dot;
    nlohmann::json report;
    nlohmann::json transcript;
    nlohmann::json applications = nlohmann::json::array();

    nlohmann::json state() const
    {
        nlohmann::json terms_json = nlohmann::json::array();
        for (const auto& t : terms) {
            terms_json.push_back(t.text());
        }
        nlohmann::json out{{"id", id},
                           {"mode", to_string(mode)},
                           {"status", status},
                           {"terms", std::move(terms_json)},
                           {"stage", stages.size()},
                           {"stages", stages},
                           {"diagram", diagram},
                           {"answers", answers},
                           {"applications", applications},
                           {"pending", pending ? request_to_json(*pending) : nlohmann::json()}};
        if (!error.empty()) {
            out["error"] = error;
        }
        if (!report.is_null()) {
            out["report"] = report;
        }
        if (!transcript.is_null()) {
            out["transcript"] = transcript;
        }
        return out;
    }
};

namespace {

ServiceResponse json_response(int status, const nlohmann::json& body)
{
    return {status, body.dump(), "application/json"};
}

ServiceResponse error_response(int status, const std::string& message)
{
    return json_response(status, {{"error", message}});
}

struct Rendered {
    nlohmann::json diagram;
    std::string dot;
    QcidModel model;
};

std::optional<Rendered> render(const LabeledGraph& g, const Taxonomy& t)
{
    try {
        Rendered r;
        r.model = classify_model(g, t);
        auto coords = layout(r.model);
        r.diagram = to_diagram(r.model, coords);
        r.dot = to_dot(r.model, &coords);
        return r;
    } catch (const Error&) {
        return std::nullopt;
    }
}

} // namespace

SessionStore::SessionStore(Bundle bundle) : bundle_(std::move(bundle)) {}

std::size_t SessionStore::size() const
{
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

std::shared_ptr<SessionStore::Session> SessionStore::find(const std::string& id) const
{
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

void SessionStore::advance(Session& s) const
{
    s.pending.reset();
    s.error.clear();
    s.stages = nlohmann::json::array();
    s.applications = nlohmann::json::array();
    s.report = nullptr;
    s.transcript = nullptr;

    LabeledGraph latest = bundle_.grammar.initial_graph;
    Taxonomy latest_taxonomy = bundle_.taxonomy;
    auto observer = [&](const StageSnapshot& snap, const Taxonomy& t) {
        nlohmann::json placed = nlohmann::json::array();
        for (const auto& term : snap.placed) {
            placed.push_back(term.text());
        }
        auto r = render(snap.after, t);
        s.stages.push_back({{"stage", snap.stage},
                            {"placed", std::move(placed)},
                            {"diagram", r ? r->diagram : nlohmann::json()}});
        latest = snap.after;
        latest_taxonomy = t;
    };

    std::vector<std::size_t> answers;
    if (s.mode == SessionMode::script) {
        answers = s.script;
    }
    answers.insert(answers.end(), s.answers.begin(), s.answers.end());
    ScriptedChoices scripted(answers);
    FirstCandidatePolicy policy;
    ReplayThenFallback replayed(answers, policy);
    ChoiceProvider& provider =
        s.mode == SessionMode::policy ? static_cast<ChoiceProvider&>(replayed) : scripted;

    try {
        auto result = derive(bundle_.grammar, bundle_.taxonomy, s.terms, provider, observer);
        latest = result.graph;
        latest_taxonomy = result.taxonomy;
        for (const auto& app : result.transcript.applications) {
            nlohmann::json terms = nlohmann::json::array();
            for (const auto& term : app.terms) {
                terms.push_back(term.text());
            }
            s.applications.push_back(
                {{"stage", app.stage}, {"production", app.production}, {"terms", std::move(terms)}});
        }
        s.transcript = transcript_to_json(result.transcript, bundle_.grammar);
        if (result.success) {
            s.status = "completed";
        } else {
            s.status = "failed";
            s.error = result.failure ? result.failure->describe() : "derivation failed";
        }
    } catch (const ScriptExhaustedError& ex) {
        s.status = "awaiting_choice";
        s.pending = ex.pending();
    } catch (const Error& ex) {
        s.status = "error";
        s.error = ex.what();
    }

    if (auto r = render(latest, latest_taxonomy)) {
        s.diagram = std::move(r->diagram);
        s.dot = std::move(r->dot);
        if (s.status == "completed" || s.status == "failed") {
            s.report = check_properties(r->model).to_json();
        }
    } else {
        s.diagram = nullptr;
        s.dot.clear();
    }
}

ServiceResponse SessionStore::create(const std::string& body)
{
    auto s = std::make_shared<Session>();
    try {
        auto doc = nlohmann::json::parse(body);
        std::set<std::string> seen;
        for (const auto& term : doc.at("terms")) {
            auto text = term.get<std::string>();
            if (text.empty()) {
                return error_response(400, "empty term");
            }
            Symbol sym(text);
            if (sym.is_nonterminal()) {
                return error_response(400, "term '" + text + "' is a nonterminal");
            }
            if (!seen.insert(text).second) {
                return error_response(400, "term '" + text + "' appears more than once");
            }
            s->terms.push_back(std::move(sym));
        }
        auto mode = doc.value("mode", std::string("interactive"));
        if (mode == "interactive") {
            s->mode = SessionMode::interactive;
        } else if (mode == "policy") {
            s->mode = SessionMode::policy;
        } else if (mode == "script") {
            s->mode = SessionMode::script;
            s->script = doc.value("script", std::vector<std::size_t>{});
        } else {
            return error_response(400, "unknown mode '" + mode + "'");
        }
    } catch (const nlohmann::json::exception& ex) {
        return error_response(400, std::string("malformed request: ") + ex.what());
    }

    {
        std::lock_guard lock(mutex_);
        s->id = "s" + std::to_string(next_id_++);
        sessions_.emplace(s->id, s);
    }
    std::lock_guard lock(s->mutex);
    advance(*s);
    return json_response(201, s->state());
}

ServiceResponse SessionStore::get(const std::string& id) const
{
    auto s = find(id);
    if (!s) {
        return error_response(404, "unknown session '" + id + "'");
    }
    std::lock_guard lock(s->mutex);
    return json_response(200, s->state());
}

ServiceResponse SessionStore::choose(const std::string& id, const std::string& body)
{
    auto s = find(id);
    if (!s) {
        return error_response(404, "unknown session '" + id + "'");
    }
    std::uint64_t request_id = 0;
    std::size_t answer = 0;
    try {
        auto doc = nlohmann::json::parse(body);
        request_id = doc.at("request_id").get<std::uint64_t>();
        answer = doc.at("answer").get<std::size_t>();
    } catch (const nlohmann::json::exception& ex) {
        return error_response(400, std::string("malformed request: ") + ex.what());
    }
    std::lock_guard lock(s->mutex);
    if (!s->pending) {
        return error_response(409, "session '" + id + "' has no pending choice");
    }
    if (s->pending->id != request_id) {
        return error_response(409, "request " + std::to_string(request_id) + " is stale; pending request is " +
                                       std::to_string(s->pending->id));
    }
    if (answer >= s->pending->candidates.size()) {
        return error_response(400, "answer " + std::to_string(answer) + " out of range");
    }
    s->answers.push_back(answer);
    advance(*s);
    return json_response(200, s->state());
}

ServiceResponse SessionStore::diagram(const std::string& id, bool dot) const
{
    auto s = find(id);
    if (!s) {
        return error_response(404, "unknown session '" + id + "'");
    }
    std::lock_guard lock(s->mutex);
    if (s->diagram.is_null()) {
        return error_response(409, "session '" + id + "' has no renderable diagram");
    }
    if (dot) {
        return {200, s->dot, "text/vnd.graphviz"};
    }
    return json_response(200, s->diagram);
}

ServiceResponse SessionStore::remove(const std::string& id)
{
    std::lock_guard lock(mutex_);
    if (sessions_.erase(id) == 0) {
        return error_response(404, "unknown session '" + id + "'");
    }
    return {204, "", "application/json"};
}

// ---------------------------------------------------------------------------

struct HttpService::Impl {
    SessionStore& store;
    httplib::Server server;
    bool bound = false;

    explicit Impl(SessionStore& s) : store(s)
    {
        server.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
        });
        auto send = [](httplib::Response& res, const ServiceResponse& r) {
            res.status = r.status;
            if (r.status != 204) {
                res.set_content(r.body, r.content_type);
            }
        };
        server.Post("/sessions", [this, send](const httplib::Request& req, httplib::Response& res) {
            send(res, store.create(req.body));
        });
        server.Get(R"(/sessions/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
            send(res, store.get(req.matches[1]));
        });
        server.Post(R"(/sessions/([^/]+)/choices)",
                    [this, send](const httplib::Request& req, httplib::Response& res) {
                        send(res, store.choose(req.matches[1], req.body));
                    });
        server.Get(R"(/sessions/([^/]+)/diagram)",
                   [this, send](const httplib::Request& req, httplib::Response& res) {
                       bool dot = req.get_param_value("format") == "dot" ||
                                  req.get_header_value("Accept").find("text/vnd.graphviz") != std::string::npos;
                       send(res, store.diagram(req.matches[1], dot));
                   });
        server.Delete(R"(/sessions/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
            send(res, store.remove(req.matches[1]));
        });
    }
};

HttpService::HttpService(SessionStore& store) : impl_(std::make_unique<Impl>(store)) {}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port)
{
    int bound = 0;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (impl_->server.bind_to_port(host, port)) {
        bound = port;
    }
    if (bound <= 0) {
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->bound = true;
    return bound;
}

void HttpService::listen()
{
    if (!impl_->bound) {
        throw Error("listen() called before bind()");
    }
    impl_->server.listen_after_bind();
}

void HttpService::stop()
{
    if (impl_) {
        impl_->server.stop();
    }
}

} // namespace qcidgram
