#include <doctest.h>

#include <regex>
#include <set>
#include <sstream>

#include <httplib.h>

#include "fixture.hpp"
#include "generators.hpp"
#include "kgdash/error.hpp"
#include "kgdash/ingest.hpp"
#include "kgdash/metrics.hpp"

using namespace kgdash;

namespace {

ParsedGraph nt(const std::string& text) {
    std::istringstream in(text);
    return parse_ntriples(in);
}

ParsedGraph dump(const std::string& text) {
    std::istringstream in(text);
    return parse_json_dump(in);
}

Error error_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected an error");
    return Error(Errc::io_error, "");
}

// Classifies each line with regular expressions only and derives the counts
// the parser must produce.
struct LineCensus {
    std::size_t statements = 0;
    std::size_t literals = 0;
    std::set<std::string> nodes;
    std::set<std::string> predicates;
    std::set<std::string> classes;
};

LineCensus classify(const std::string& text) {
    static const std::regex skip(R"(^\s*(#.*)?$)");
    static const std::regex triple(
        R"(^\s*(<[^>]*>|_:\S+)\s+<([^>]*)>\s+(<[^>]*>|_:\S+|"(?:[^"\\]|\\.)*"(?:@\S+|\^\^<[^>]*>)?)\s*\.\s*(#.*)?$)");
    static const std::regex annotation(R"(.*[#/](label|description|comment)$)");
    static const std::regex type(R"(.*#type$)");
    static const std::regex meta(R"(.*#(Class|Property)>$)");
    auto id = [](const std::string& term) {
        if (term.rfind("_:", 0) == 0) return term;
        std::string iri = term.substr(1, term.size() - 2);
        return iri.substr(iri.find_last_of("/#") + 1);
    };
    LineCensus c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::smatch m;
        if (std::regex_match(line, skip)) continue;
        REQUIRE_MESSAGE(std::regex_match(line, m, triple), line);
        std::string s = m[1], p = m[2], o = m[3];
        c.nodes.insert(id(s));
        if (std::regex_match(p, annotation)) continue;
        if (std::regex_match(p, type)) {
            if (std::regex_match(o, meta)) {
                (o.find("Class") != std::string::npos ? c.classes : c.predicates).insert(id(s));
            } else {
                c.nodes.insert(id(o));
                c.classes.insert(id(o));
            }
            continue;
        }
        ++c.statements;
        c.nodes.insert(id("<" + p + ">"));
        c.predicates.insert(id("<" + p + ">"));
        if (o[0] == '"') ++c.literals;
        else c.nodes.insert(id(o));
    }
    return c;
}

}  // namespace

TEST_CASE("n-triples basics") {
    CHECK(nt("").entities.empty());
    CHECK(nt("").statements.empty());

    auto g = nt("<R1> <http://www.w3.org/2000/01/rdf-schema#label> \"Paper A\" .\n<R1> <P30> <R5> .\n");
    REQUIRE(g.statements.size() == 1);
    CHECK(g.statements[0].id == EntityId("S1"));
    CHECK(g.statements[0].subject == EntityId("R1"));
    CHECK(g.statements[0].predicate == EntityId("P30"));
    CHECK(g.statements[0].object == EntityId("R5"));
    auto snap = build_snapshot(g.entities, g.statements);
    CHECK(snap.find(EntityId("R1"))->label == "Paper A");
    CHECK(snap.find(EntityId("P30"))->kind == EntityKind::predicate);
}

TEST_CASE("n-triples annotation vocabulary") {
    auto g = nt(
        "<http://x/R1> <http://www.w3.org/2000/01/rdf-schema#comment> \"from comment\" .\n"
        "<http://x/R1> <http://purl.org/dc/terms/description> \"from dcterms\" .\n"
        "<http://x/R2> <http://www.w3.org/2000/01/rdf-schema#comment> \"only comment\" .\n"
        "<http://x/R1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://x/C1> .\n"
        "<http://x/C1> <http://www.w3.org/2000/01/rdf-schema#label> \"Cls\"@en .\n"
        "<http://x/R1> <http://x/P1> \"tab\\there\\u00e9\" .\n");
    auto s = build_snapshot(g.entities, g.statements);
    CHECK(s.find(EntityId("R1"))->description == "from dcterms");
    CHECK(s.find(EntityId("R2"))->description == "only comment");
    CHECK(s.find(EntityId("C1"))->kind == EntityKind::klass);
    CHECK(s.find(EntityId("R1"))->classes == std::vector{EntityId("C1")});
    const Entity* lit = s.find(EntityId("lit:1"));
    REQUIRE(lit);
    CHECK(lit->kind == EntityKind::literal);
    CHECK(lit->label == "tab\there\xc3\xa9");
}

TEST_CASE("n-triples errors carry the line number") {
    auto e = error_of([] { nt("# ok\n<R1> <P1> <R2> .\n<R1> <P1> <R2>\n"); });
    CHECK(e.code() == Errc::malformed_line);
    CHECK(e.context() == "3");
    CHECK(error_of([] { nt("<R1> <P1> \"unterminated .\n"); }).code() == Errc::malformed_line);
    CHECK(error_of([] { nt("<R1> \"lit\" <R2> .\n"); }).code() == Errc::malformed_line);
    CHECK(error_of([] { nt("<R1> <P1> <R2> . extra\n"); }).code() == Errc::malformed_line);

    auto collision = error_of([] { nt("<http://a/R1> <P1> <R2> .\n<http://b/R1> <P1> <R2> .\n"); });
    CHECK(collision.code() == Errc::id_collision);
    CHECK(collision.context() == "2");
}

TEST_CASE("n-triples 50-line fixture matches the line classifier") {
    std::string text = fixture::read_file(fixture::path("sample.nt"));
    CHECK(std::count(text.begin(), text.end(), '\n') == 50);
    auto census = classify(text);
    auto g = nt(text);
    CHECK(g.statements.size() == census.statements);
    CHECK(g.entities.size() == census.nodes.size() + census.literals);

    auto s = build_snapshot(g.entities, g.statements);
    std::size_t predicates = 0, classes = 0, literals = 0;
    for (const auto& e : s.entities()) {
        predicates += e.kind == EntityKind::predicate;
        classes += e.kind == EntityKind::klass;
        literals += e.kind == EntityKind::literal;
    }
    CHECK(predicates == census.predicates.size());
    CHECK(classes == census.classes.size());
    CHECK(literals == census.literals);
}

TEST_CASE("json dump parsing") {
    auto empty = dump(R"({"entities":[],"statements":[]})");
    CHECK(empty.entities.empty());
    CHECK(empty.statements.empty());

    auto missing = error_of([] { dump(R"({"entities":[{"kind":"resource"}],"statements":[]})"); });
    CHECK(missing.code() == Errc::schema_violation);
    CHECK(missing.context() == "/entities/0/id");

    CHECK(error_of([] { dump(R"({"entities":[{"id":"R1","kind":"thing"}],"statements":[]})"); }).context() ==
          "/entities/0/kind");
    CHECK(error_of([] { dump(R"({"entities":[],"statements":[{"id":"S1","subject":"R1","predicate":"P1"}]})"); })
              .context() == "/statements/0/object");
    CHECK(error_of([] { dump(R"({"entities":[{"id":"R1","kind":"resource","created_at":"yesterday"}],"statements":[]})"); })
              .context() == "/entities/0/created_at");
    CHECK(error_of([] { dump(R"({"entities":[]})"); }).code() == Errc::schema_violation);
    CHECK(error_of([] { dump("not json"); }).code() == Errc::schema_violation);

    auto extra = dump(R"({"version":3,"entities":[{"id":"R1","kind":"resource","x":{"y":[1,2]},"label":"a",
        "classes":[]}],"statements":[],"meta":{"k":"v"}})");
    REQUIRE(extra.entities.size() == 1);
    CHECK(extra.entities[0].label == "a");
}

TEST_CASE("property: dump round trip is a fixed point") {
    gen::Rng rng(21);
    for (int round = 0; round < 200; ++round) {
        auto gc = gen::random_graph(rng, 150, 300);
        auto first = gen::snapshot_of(gc.graph);
        std::ostringstream out1;
        write_json_dump(out1, first);
        auto parsed = dump(out1.str());
        auto second = build_snapshot(std::move(parsed.entities), std::move(parsed.statements), gen::kBuiltAt);
        std::ostringstream out2;
        write_json_dump(out2, second);
        CHECK(out1.str() == out2.str());
        CHECK(std::ranges::equal(first.entities(), second.entities()));
        CHECK(std::ranges::equal(first.statements(), second.statements()));
        CHECK(metrics_summary(first, gc.config) == metrics_summary(second, gc.config));
        CHECK(statement_count_per_paper(first, gc.config) == statement_count_per_paper(second, gc.config));
    }
}

TEST_CASE("query library and read-only guard") {
    fixture::TempDir dir;
    fixture::write_file(dir / "all-entities.rq", "SELECT * WHERE { ?s ?p ?o }");
    fixture::write_file(dir / "all-statements.sparql", "SELECT ?s WHERE { ?s ?p ?o }");
    fixture::write_file(dir / "notes.md", "ignored");
    auto q = load_query_library(dir.path());
    CHECK(q.size() == 2);
    CHECK(q.count("all-entities"));

    CHECK(is_read_only_query("SELECT * WHERE { ?s <http://x/insert> \"DELETE me\" } # DROP"));
    CHECK(is_read_only_query("PREFIX ex: <http://x/> SELECT ?delete WHERE { ?delete ex:load ?o }"));
    CHECK_FALSE(is_read_only_query("INSERT DATA { <a> <b> <c> }"));
    CHECK_FALSE(is_read_only_query("select * {} ; drop all"));
}

namespace {

// In-process stand-in for the remote query endpoint, serving the fixture dump.
class MockEndpoint {
public:
    MockEndpoint() {
        auto doc = nlohmann::json::parse(fixture::read_file(fixture::path("kg.json")));
        server_.Post("/sparql", [doc, this](const httplib::Request& req, httplib::Response& res) {
            ++hits;
            last_auth = req.get_header_value("Authorization");
            if (req.body.find("entities") != std::string::npos) {
                res.set_content(doc["entities"].dump(), "application/json");
            } else if (req.body.find("statements") != std::string::npos) {
                res.set_content(nlohmann::json{{"statements", doc["statements"]}}.dump(), "application/json");
            } else {
                res.status = 400;
                res.set_content("unknown query", "text/plain");
            }
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~MockEndpoint() { stop(); }
    void stop() {
        if (thread_.joinable()) {
            server_.stop();
            thread_.join();
        }
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/sparql"; }

    int hits = 0;
    std::string last_auth;

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

const QuerySet kQueries{{"all-entities", "SELECT * WHERE { ?entities ?p ?o }"},
                        {"all-statements", "SELECT * WHERE { ?statements ?p ?o }"}};

}  // namespace

TEST_CASE("remote endpoint") {
    fixture::TempDir dir;
    MockEndpoint mock;
    IngestSource src{IngestSource::Kind::remote_endpoint, mock.url(), dir / "cache.json", "secret", 2};

    SUBCASE("mock endpoint yields the same graph as the dump") {
        auto fetched = fetch_remote(src, kQueries);
        CHECK_FALSE(fetched.from_cache);
        CHECK_FALSE(fetched.warning);
        CHECK(mock.hits == 2);
        CHECK(mock.last_auth == "Bearer secret");
        auto a = build_snapshot(fetched.graph.entities, fetched.graph.statements, gen::kBuiltAt);
        auto b = fixture::snapshot();
        std::ostringstream da, db;
        write_json_dump(da, a);
        write_json_dump(db, b);
        CHECK(da.str() == db.str());
        CHECK(std::filesystem::exists(dir / "cache.json"));
    }
    SUBCASE("endpoint down with a cache serves the cache with a warning") {
        fetch_remote(src, kQueries);
        mock.stop();
        auto stale = fetch_remote(src, kQueries);
        CHECK(stale.from_cache);
        REQUIRE(stale.warning);
        CHECK(stale.graph.entities.size() == fixture::graph().entities.size());
    }
    SUBCASE("endpoint down without a cache") {
        mock.stop();
        CHECK(error_of([&] { fetch_remote(src, kQueries); }).code() == Errc::endpoint_unreachable);
    }
    SUBCASE("update queries are never sent") {
        QuerySet bad = kQueries;
        bad["all-statements"] = "DELETE WHERE { ?s ?p ?o }";
        CHECK(error_of([&] { fetch_remote(src, bad); }).code() == Errc::query_rejected);
        CHECK(mock.hits == 0);
    }
    SUBCASE("endpoint rejection") {
        QuerySet odd = kQueries;
        odd["all-entities"] = "SELECT * WHERE { ?x ?y ?z }";
        auto e = error_of([&] { fetch_remote(src, odd); });
        CHECK(e.code() == Errc::query_rejected);
        CHECK(e.context() == "all-entities");
    }
    SUBCASE("a remote source without a cache path is invalid") {
        src.cache_path.reset();
        CHECK(error_of([&] { src.validate(); }).code() == Errc::config_error);
    }
    SUBCASE("unwritable cache") {
        src.cache_path = dir / "missing-dir" / "cache.json";
        CHECK(error_of([&] { fetch_remote(src, kQueries); }).code() == Errc::cache_write_failed);
    }
}
