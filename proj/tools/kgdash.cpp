// kgdash: ingest knowledge-graph sources, serve the curation API, and print
// offline quality reports.
//
// Exit codes: 0 success, 1 data or config error, 2 usage error.

#include <pthread.h>
#include <signal.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "kgdash/api.hpp"
#include "kgdash/clickstream.hpp"
#include "kgdash/comments.hpp"
#include "kgdash/config.hpp"
#include "kgdash/error.hpp"
#include "kgdash/ingest.hpp"
#include "kgdash/report.hpp"

namespace {

namespace fs = std::filesystem;
using namespace kgdash;

constexpr int kOk = 0;
constexpr int kDataError = 1;
constexpr int kUsageError = 2;

struct SourceFlags {
    std::string ntriples;
    std::string json_dump;
    std::string endpoint;
    std::string cache;
    std::string queries;
    std::string token;

    int count() const { return !ntriples.empty() + !json_dump.empty() + !endpoint.empty(); }

    void add_to(CLI::App* cmd) {
        cmd->add_option("--ntriples", ntriples, "N-Triples dump to load");
        cmd->add_option("--json-dump", json_dump, "JSON dump to load");
        cmd->add_option("--endpoint", endpoint, "Query endpoint URL");
        cmd->add_option("--cache", cache, "Cache file for endpoint results");
        cmd->add_option("--queries", queries, "Query library directory for --endpoint");
        cmd->add_option("--token", token, "Bearer token for --endpoint");
    }

    // Flags override whatever source the config names.
    void apply(AppConfig& cfg) const {
        if (count() == 0) return;
        cfg.ntriples.reset();
        cfg.json_dump.reset();
        cfg.endpoint.reset();
        if (!ntriples.empty()) cfg.ntriples = ntriples;
        if (!json_dump.empty()) cfg.json_dump = json_dump;
        if (!endpoint.empty()) {
            EndpointConfig ep;
            ep.url = endpoint;
            if (!token.empty()) ep.token = token;
            if (cache.empty()) throw Error(Errc::config_error, "--endpoint requires --cache");
            ep.cache_path = cache;
            ep.queries_dir = queries.empty() ? fs::path("queries") : fs::path(queries);
            cfg.endpoint = std::move(ep);
        }
    }
};

AppConfig config_or_default(const std::string& path) {
    std::string chosen = path;
    if (chosen.empty()) {
        if (const char* env = std::getenv("KGDASH_CONFIG")) chosen = env;
    }
    return chosen.empty() ? AppConfig{} : load_config(chosen);
}

ParsedGraph load_graph(const AppConfig& cfg) {
    IngestSource src = cfg.kg_source();
    QuerySet queries;
    if (src.kind == IngestSource::Kind::remote_endpoint) queries = load_query_library(cfg.endpoint->queries_dir);
    FetchResult result = load_source(src, queries);
    if (result.warning) std::cerr << "warning: " << *result.warning << "\n";
    return std::move(result.graph);
}

int cmd_ingest(const AppConfig& cfg, const std::string& out_path) {
    ParsedGraph graph = load_graph(cfg);
    Snapshot snapshot = build_snapshot(std::move(graph.entities), std::move(graph.statements));
    fs::path tmp = out_path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::io_error, "cannot write " + tmp.string(), tmp.string());
        write_json_dump(out, snapshot);
        if (!out.flush()) throw Error(Errc::io_error, "short write to " + tmp.string(), tmp.string());
    }
    fs::rename(tmp, out_path);
    std::cout << "entities: " << snapshot.entities().size() << "\n"
              << "statements: " << snapshot.statements().size() << "\n";
    return kOk;
}

int cmd_report(const AppConfig& cfg, const std::string& format) {
    ParsedGraph graph = load_graph(cfg);
    Snapshot snapshot = build_snapshot(std::move(graph.entities), std::move(graph.statements));
    auto report = build_report(snapshot, cfg.curation);
    if (format == "json") {
        std::cout << report.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << "\n";
    } else {
        std::cout << render_markdown(report);
    }
    return kOk;
}

int cmd_serve(const AppConfig& cfg) {
    // Termination signals are consumed by a dedicated thread; every other
    // thread (including the HTTP workers) inherits the blocked mask.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    auto snapshot = std::make_shared<SnapshotHandle>();
    {
        ParsedGraph graph = load_graph(cfg);
        snapshot->publish(
            std::make_shared<const Snapshot>(build_snapshot(std::move(graph.entities), std::move(graph.statements))));
    }
    auto visits = std::make_shared<SessionHandle>(std::make_shared<const SessionSet>());
    if (cfg.clickstream) {
        if (cfg.salt.empty()) throw Error(Errc::config_error, "a clickstream needs a salt (config salt or KGDASH_SALT)");
        std::ifstream in(*cfg.clickstream, std::ios::binary);
        if (!in) throw Error(Errc::io_error, "cannot open " + cfg.clickstream->string(), cfg.clickstream->string());
        visits->publish(std::make_shared<const SessionSet>(ingest_clickstream(in, cfg.salt)));
    }
    auto comments = std::make_shared<CommentStore>(cfg.journal);

    Api api(cfg.curation, snapshot, visits, comments);
    HttpServer server(api, cfg.cors_origin);
    auto [host, port] = parse_listen(cfg.listen);
    int bound = server.bind(host, port);
    std::cerr << "kgdash listening on " << host << ":" << bound << "\n";

    std::thread waiter([&server, signals] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.run();
    // run() can also return without a signal; wake the waiter either way.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    std::cerr << "kgdash stopped; " << comments->size() << " comments in " << cfg.journal.string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-graph curation dashboard backend"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (default: $KGDASH_CONFIG)");

    SourceFlags source;
    std::string out_path;
    auto* ingest = app.add_subcommand("ingest", "Load a source, validate it, and write a canonical JSON dump");
    source.add_to(ingest);
    ingest->add_option("--out", out_path, "Output JSON dump")->required();

    SourceFlags serve_source;
    std::string listen, clickstream;
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API until SIGINT/SIGTERM");
    serve_source.add_to(serve);
    serve->add_option("--listen", listen, "host:port to listen on");
    serve->add_option("--clickstream", clickstream, "Clickstream export (CSV or JSON lines)");

    SourceFlags report_source;
    std::string snapshot_path, format = "markdown";
    auto* report = app.add_subcommand("report", "Print the KPI report for a snapshot");
    report_source.add_to(report);
    report->add_option("snapshot", snapshot_path, "Snapshot JSON dump (shorthand for --json-dump)");
    report->add_option("--format", format, "json or markdown")->check(CLI::IsMember({"json", "markdown"}));

    for (auto* cmd : {ingest, serve, report}) cmd->add_option("--config", config_path, "JSON config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        AppConfig cfg = config_or_default(config_path);
        if (ingest->parsed()) {
            bool configured = cfg.ntriples || cfg.json_dump || cfg.endpoint;
            if (source.count() > 1 || (source.count() == 0 && !configured)) {
                std::cerr << "ingest: give exactly one of --ntriples, --json-dump, --endpoint\n";
                return kUsageError;
            }
            source.apply(cfg);
            return cmd_ingest(cfg, out_path);
        }
        if (serve->parsed()) {
            serve_source.apply(cfg);
            if (!listen.empty()) cfg.listen = listen;
            if (!clickstream.empty()) cfg.clickstream = clickstream;
            return cmd_serve(cfg);
        }
        if (!snapshot_path.empty()) report_source.json_dump = snapshot_path;
        if (report_source.count() > 1) {
            std::cerr << "report: give at most one snapshot source\n";
            return kUsageError;
        }
        report_source.apply(cfg);
        return cmd_report(cfg, format);
    } catch (const Error& e) {
        std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    }
}
