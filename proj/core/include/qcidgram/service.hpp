#pragma once

#include <qcidgram/bundle.hpp>
#include <qcidgram/derivation.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace qcidgram {

struct ServiceResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

enum class SessionMode { interactive, policy, script };

std::string_view to_string(SessionMode m) noexcept;

/// In-memory derivation sessions. Each session keeps the answers given so far and
/// re-runs the (deterministic) derivation to reach its current state, so a pending
/// request is simply where the answer list runs out.
///
/// All methods are safe to call concurrently; calls on one session are serialized.
class SessionStore {
public:
    explicit SessionStore(Bundle bundle);

    /// Body: {"terms": [...], "mode": "interactive" | "policy" | "script", "script": [...]}.
    ServiceResponse create(const std::string& body);
    ServiceResponse get(const std::string& id) const;
    /// Body: {"request_id": n, "answer": k}.
    ServiceResponse choose(const std::string& id, const std::string& body);
    ServiceResponse diagram(const std::string& id, bool dot) const;
    ServiceResponse remove(const std::string& id);

    std::size_t size() const;
    const Bundle& bundle() const noexcept { return bundle_; }

private:
    struct Session;

    std::shared_ptr<Session> find(const std::string& id) const;
    void advance(Session& s) const;

    Bundle bundle_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

/// HTTP front for a SessionStore. Routes:
///   POST /sessions, GET /sessions/{id}, POST /sessions/{id}/choices,
///   GET /sessions/{id}/diagram (DOT when Accept is text/vnd.graphviz or ?format=dot),
///   DELETE /sessions/{id}.
class HttpService {
public:
    explicit HttpService(SessionStore& store);
    ~HttpService();
    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// Binds to host:port (port 0 picks a free port) and returns the bound port.
    /// Throws Error when the port cannot be bound.
    int bind(const std::string& host, int port);
    /// Serves until stop() is called. Requires a prior bind().
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace qcidgram
