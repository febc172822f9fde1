#include "fixture.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "generators.hpp"

namespace fixture {

using namespace kgdash;

fs::path source_dir() { return fs::path(KGDASH_SOURCE_DIR); }
fs::path path(const std::string& name) { return source_dir() / "tests" / "fixtures" / name; }
fs::path golden_dir() { return source_dir() / "tests" / "golden"; }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

oracle::Graph graph() {
    std::ifstream in(path("kg.json"), std::ios::binary);
    auto parsed = parse_json_dump(in);
    return {std::move(parsed.entities), std::move(parsed.statements)};
}

Snapshot snapshot() {
    auto g = graph();
    return build_snapshot(std::move(g.entities), std::move(g.statements), gen::kBuiltAt);
}

SessionSet sessions() {
    std::ifstream in(path("clickstream.csv"), std::ios::binary);
    return ingest_clickstream(in, ClickstreamFormat::csv, kSalt);
}

const nlohmann::json& answers() {
    static const nlohmann::json a = nlohmann::json::parse(read_file(path("answers.json")));
    return a;
}

TempDir::TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    for (;;) {
        path_ = fs::temp_directory_path() / ("kgdash-test-" + std::to_string(rng()));
        if (fs::create_directory(path_)) break;
    }
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

Service::Service(const fs::path& journal)
    : snapshot(std::make_shared<SnapshotHandle>(std::make_shared<const Snapshot>(fixture::snapshot()))),
      visits(std::make_shared<SessionHandle>(std::make_shared<const SessionSet>(fixture::sessions()))),
      comments(std::make_shared<CommentStore>(journal)),
      api(CurationConfig{}, snapshot, visits, comments, [] { return kNow; }) {}

ApiResponse Service::get(const std::string& target) const { return api.handle(request("GET", target)); }

ApiResponse Service::send(const std::string& method, const std::string& target, const std::string& body) const {
    return api.handle(request(method, target, body));
}

ApiRequest request(const std::string& method, const std::string& target, const std::string& body) {
    ApiRequest r;
    r.method = method;
    r.body = body;
    auto q = target.find('?');
    r.path = target.substr(0, q);
    if (q == std::string::npos) return r;
    std::string rest = target.substr(q + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        auto amp = rest.find('&', pos);
        std::string pair = rest.substr(pos, amp == std::string::npos ? std::string::npos : amp - pos);
        if (!pair.empty()) {
            auto eq = pair.find('=');
            r.query.emplace(pair.substr(0, eq), eq == std::string::npos ? "" : pair.substr(eq + 1));
        }
        if (amp == std::string::npos) break;
        pos = amp + 1;
    }
    return r;
}

LiveServer::LiveServer(const Api& api) : server_(api) {
    port_ = server_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_.run(); });
    server_.wait_until_ready();
}

LiveServer::~LiveServer() {
    server_.stop();
    thread_.join();
}

}  // namespace fixture
