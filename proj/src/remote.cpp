#include <cctype>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "kgdash/error.hpp"
#include "kgdash/ingest.hpp"

namespace kgdash {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct EndpointUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

EndpointUrl split_url(const std::string& url) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos) {
        throw Error(Errc::config_error, "endpoint URL needs a scheme: " + url, url);
    }
    auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

// Pulls the array named `key` out of a query response; bare arrays are
// accepted too.
json extract_rows(const json& body, std::string_view key) {
    if (body.is_array()) return body;
    if (body.is_object()) {
        auto it = body.find(key);
        if (it != body.end() && it->is_array()) return *it;
    }
    return nullptr;
}

FetchResult from_cache(const fs::path& cache, std::string warning) {
    std::ifstream in(cache, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot read cache " + cache.string(), cache.string());
    return FetchResult{parse_json_dump(in), true, std::move(warning)};
}

void write_cache(const fs::path& cache, const json& entities, const json& statements) {
    fs::path tmp = cache;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::cache_write_failed, "cannot write cache " + tmp.string(), cache.string());
        auto dump = [](const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); };
        out << "{\"entities\":" << dump(entities) << ",\"statements\":" << dump(statements) << "}\n";
        out.flush();
        if (!out) throw Error(Errc::cache_write_failed, "short write to " + tmp.string(), cache.string());
    }
    std::error_code ec;
    fs::rename(tmp, cache, ec);
    if (ec) throw Error(Errc::cache_write_failed, "cannot replace " + cache.string() + ": " + ec.message(),
                        cache.string());
}

}  // namespace

QuerySet load_query_library(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error(Errc::config_error, "query library not found: " + dir.string());
    QuerySet queries;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        if (ext != ".rq" && ext != ".sparql" && ext != ".txt") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream text;
        text << in.rdbuf();
        queries[entry.path().stem().string()] = text.str();
    }
    return queries;
}

bool is_read_only_query(std::string_view query) {
    static constexpr std::string_view kUpdateKeywords[] = {"INSERT", "DELETE", "LOAD", "CLEAR", "DROP",
                                                           "CREATE", "ADD",    "MOVE", "COPY"};
    std::size_t i = 0;
    while (i < query.size()) {
        char c = query[i];
        if (c == '#') {
            while (i < query.size() && query[i] != '\n') ++i;
        } else if (c == '<') {
            // IRI, or a less-than operator; either way no keyword hides in it.
            auto close = query.find_first_of(">\n ", i + 1);
            i = (close == std::string_view::npos || query[close] != '>') ? i + 1 : close + 1;
        } else if (c == '"' || c == '\'') {
            ++i;
            while (i < query.size() && query[i] != c) i += (query[i] == '\\') ? 2 : 1;
            ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < query.size() && (std::isalnum(static_cast<unsigned char>(query[i])) || query[i] == '_')) ++i;
            // `?var` / `$var` / `prefix:local` are not keywords.
            bool is_variable = start > 0 && (query[start - 1] == '?' || query[start - 1] == '$' ||
                                             query[start - 1] == ':');
            bool is_prefixed = i < query.size() && query[i] == ':';
            if (is_variable || is_prefixed) continue;
            std::string word(query.substr(start, i - start));
            for (auto& ch : word) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            for (auto kw : kUpdateKeywords) {
                if (word == kw) return false;
            }
        } else {
            ++i;
        }
    }
    return true;
}

void IngestSource::validate() const {
    if (location.empty()) throw Error(Errc::config_error, "ingest source has no location");
    if (kind == Kind::remote_endpoint && !cache_path) {
        throw Error(Errc::config_error, "a remote endpoint source requires a cache path", location);
    }
}

FetchResult fetch_remote(const IngestSource& source, const QuerySet& queries) {
    source.validate();
    const fs::path& cache = *source.cache_path;
    for (auto name : {kEntitiesQuery, kStatementsQuery}) {
        auto it = queries.find(name);
        if (it == queries.end()) {
            throw Error(Errc::config_error, "query library lacks '" + std::string(name) + "'", std::string(name));
        }
        if (!is_read_only_query(it->second)) {
            throw Error(Errc::query_rejected, "query '" + std::string(name) + "' is not read-only",
                        std::string(name));
        }
    }

    auto url = split_url(source.location);
    httplib::Client client(url.origin);
    client.set_connection_timeout(source.timeout_seconds, 0);
    client.set_read_timeout(source.timeout_seconds, 0);
    httplib::Headers headers{{"Accept", "application/json"}};
    if (source.auth_token) headers.emplace("Authorization", "Bearer " + *source.auth_token);

    json rows[2];
    std::size_t slot = 0;
    for (auto name : {kEntitiesQuery, kStatementsQuery}) {
        const std::string& text = queries.find(name)->second;
        auto res = client.Post(url.path, headers, text, "application/sparql-query");
        if (!res) {
            std::string reason = httplib::to_string(res.error());
            std::error_code ec;
            if (fs::exists(cache, ec)) {
                return from_cache(cache, "endpoint " + source.location + " unreachable (" + reason +
                                             "); serving cached snapshot from " + cache.string());
            }
            throw Error(Errc::endpoint_unreachable, "endpoint " + source.location + " unreachable: " + reason,
                        source.location);
        }
        if (res->status < 200 || res->status >= 300) {
            throw Error(Errc::query_rejected,
                        "query '" + std::string(name) + "' rejected (" + std::to_string(res->status) + "): " +
                            res->body,
                        std::string(name));
        }
        json body = json::parse(res->body, nullptr, false);
        json extracted = body.is_discarded() ? json(nullptr)
                                             : extract_rows(body, name == kEntitiesQuery ? "entities" : "statements");
        if (extracted.is_null()) {
            throw Error(Errc::query_rejected, "query '" + std::string(name) + "' returned an unexpected payload",
                        std::string(name));
        }
        rows[slot++] = std::move(extracted);
    }

    write_cache(cache, rows[0], rows[1]);
    std::ifstream in(cache, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot reopen cache " + cache.string(), cache.string());
    return FetchResult{parse_json_dump(in), false, std::nullopt};
}

FetchResult load_source(const IngestSource& source, const QuerySet& queries) {
    source.validate();
    if (source.kind == IngestSource::Kind::remote_endpoint) return fetch_remote(source, queries);
    std::ifstream in(source.location, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open " + source.location, source.location);
    if (source.kind == IngestSource::Kind::ntriples_file) return FetchResult{parse_ntriples(in), false, {}};
    return FetchResult{parse_json_dump(in), false, {}};
}

}  // namespace kgdash
