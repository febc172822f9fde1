#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include <json.hpp>

#include "kgdash/api.hpp"
#include "kgdash/clickstream.hpp"
#include "kgdash/comments.hpp"
#include "kgdash/ingest.hpp"
#include "oracles.hpp"

namespace fixture {

namespace fs = std::filesystem;

inline constexpr const char* kSalt = "fixture-salt";
/// Fixed clock for comment timestamps in scenario and golden tests.
inline const kgdash::Timestamp kNow = kgdash::Timestamp{std::chrono::seconds{1718000000}};

fs::path source_dir();
fs::path path(const std::string& name);  // tests/fixtures/<name>
fs::path golden_dir();

std::string read_file(const fs::path& p);
void write_file(const fs::path& p, const std::string& text);

oracle::Graph graph();
kgdash::Snapshot snapshot();
kgdash::SessionSet sessions();
const nlohmann::json& answers();

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

/// The fixture behind an Api, with a comment journal at `journal`.
struct Service {
    explicit Service(const fs::path& journal);
    std::shared_ptr<kgdash::SnapshotHandle> snapshot;
    std::shared_ptr<kgdash::SessionHandle> visits;
    std::shared_ptr<kgdash::CommentStore> comments;
    kgdash::Api api;

    kgdash::ApiResponse get(const std::string& target) const;
    kgdash::ApiResponse send(const std::string& method, const std::string& target, const std::string& body) const;
};

/// Runs an HttpServer for `api` on an ephemeral loopback port.
class LiveServer {
public:
    explicit LiveServer(const kgdash::Api& api);
    ~LiveServer();
    int port() const { return port_; }

private:
    kgdash::HttpServer server_;
    int port_ = 0;
    std::thread thread_;
};

/// Splits "path?a=1&b=2" into an ApiRequest (no percent-decoding needed for
/// the fixed targets used in tests).
kgdash::ApiRequest request(const std::string& method, const std::string& target, const std::string& body = {});

}  // namespace fixture
