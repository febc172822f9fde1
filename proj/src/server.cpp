#include <httplib.h>

#include "kgdash/api.hpp"
#include "kgdash/error.hpp"

namespace kgdash {

struct HttpServer::Impl {
    Impl(const Api& a, std::optional<std::string> cors) : api(a), cors_origin(std::move(cors)) {}

    const Api& api;
    std::optional<std::string> cors_origin;
    httplib::Server server;
    bool bound = false;

    void serve(const httplib::Request& req, httplib::Response& res) {
        ApiRequest request;
        request.method = req.method;
        request.path = req.path;
        for (const auto& [k, v] : req.params) request.query.emplace(k, v);
        request.body = req.body;
        ApiResponse response = api.handle(request);
        res.status = response.status;
        res.set_content(response.text(), "application/json; charset=utf-8");
    }
};

HttpServer::HttpServer(const Api& api, std::optional<std::string> cors_origin)
    : impl_(std::make_unique<Impl>(api, std::move(cors_origin))) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) { impl_->serve(req, res); };
    auto& svr = impl_->server;
    svr.Get(".*", handler);
    svr.Post(".*", handler);
    svr.Patch(".*", handler);
    svr.Put(".*", handler);
    svr.Delete(".*", handler);
    svr.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    // httplib also sets SO_REUSEPORT, which would let a second instance share the port.
    svr.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    if (impl_->cors_origin) {
        svr.set_default_headers({{"Access-Control-Allow-Origin", *impl_->cors_origin},
                                 {"Access-Control-Allow-Methods", "GET, POST, PATCH, OPTIONS"},
                                 {"Access-Control-Allow-Headers", "Content-Type"}});
    }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound <= 0) {
        throw Error(Errc::bind_failure, "cannot bind " + host + ":" + std::to_string(port), std::to_string(port));
    }
    impl_->bound = true;
    return bound;
}

void HttpServer::run() {
    if (!impl_->bound) throw Error(Errc::bind_failure, "run() before bind()");
    impl_->server.listen_after_bind();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace kgdash
