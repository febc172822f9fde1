#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "kgdash/clickstream.hpp"
#include "kgdash/comments.hpp"
#include "kgdash/model.hpp"

namespace kgdash {

struct ApiRequest {
    std::string method = "GET";
    std::string path;  // already percent-decoded
    std::multimap<std::string, std::string> query;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    nlohmann::json body;

    /// Pretty-printed body followed by a newline; this is what goes on the wire.
    std::string text() const;
};

using SessionHandle = Published<SessionSet>;

/// Transport-independent request router for the dashboard API. Every
/// response, errors included, is a JSON document; errors carry `code` and
/// `message`. The snapshot is only ever read; comments are the sole mutable
/// state.
class Api {
public:
    using Clock = std::function<Timestamp()>;

    Api(CurationConfig config, std::shared_ptr<SnapshotHandle> snapshot, std::shared_ptr<SessionHandle> visits,
        std::shared_ptr<CommentStore> comments, Clock clock = utc_now);

    ApiResponse handle(const ApiRequest& request) const;

    const CurationConfig& config() const noexcept { return config_; }

private:
    ApiResponse route(const ApiRequest& request) const;

    CurationConfig config_;
    std::shared_ptr<SnapshotHandle> snapshot_;
    std::shared_ptr<SessionHandle> visits_;
    std::shared_ptr<CommentStore> comments_;
    Clock clock_;
};

/// HTTP/1.1 front end for an Api.
class HttpServer {
public:
    explicit HttpServer(const Api& api, std::optional<std::string> cors_origin = std::nullopt);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds the listening socket; port 0 picks a free port. Returns the bound
    /// port. Throws Error(bind_failure).
    int bind(const std::string& host, int port);
    /// Serves until stop(). Requires a successful bind().
    void run();
    /// Blocks until run() is accepting connections.
    void wait_until_ready() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace kgdash
