#include "kgdash/config.hpp"

#include <cstdlib>
#include <fstream>

#include "kgdash/error.hpp"

namespace kgdash {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& reason) {
    throw Error(Errc::config_error, "config: " + key + " " + reason, key);
}

std::optional<std::string> opt_string(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) bad(where + key, "must be a string");
    return it->get<std::string>();
}

std::optional<fs::path> opt_path(const json& obj, const std::string& key, const fs::path& base) {
    auto s = opt_string(obj, key, "");
    if (!s) return std::nullopt;
    fs::path p(*s);
    return p.is_absolute() ? p : base / p;
}

EntityId id_field(const json& obj, const std::string& key, const EntityId& fallback) {
    auto s = opt_string(obj, key, "schema.");
    if (!s) return fallback;
    if (!EntityId::is_valid(*s)) bad("schema." + key, "must be an id without whitespace");
    return EntityId(*s);
}

}  // namespace

IngestSource AppConfig::kg_source() const {
    int configured = (ntriples ? 1 : 0) + (json_dump ? 1 : 0) + (endpoint ? 1 : 0);
    if (configured != 1) {
        throw Error(Errc::config_error, "exactly one of ntriples, json_dump, endpoint must be configured");
    }
    IngestSource src;
    if (ntriples) {
        src.kind = IngestSource::Kind::ntriples_file;
        src.location = ntriples->string();
    } else if (json_dump) {
        src.kind = IngestSource::Kind::json_dump_file;
        src.location = json_dump->string();
    } else {
        src.kind = IngestSource::Kind::remote_endpoint;
        src.location = endpoint->url;
        src.cache_path = endpoint->cache_path;
        src.auth_token = endpoint->token;
    }
    return src;
}

AppConfig parse_config(const json& doc, const fs::path& base_dir) {
    if (!doc.is_object()) bad("document", "must be a JSON object");
    AppConfig cfg;
    cfg.ntriples = opt_path(doc, "ntriples", base_dir);
    cfg.json_dump = opt_path(doc, "json_dump", base_dir);
    cfg.clickstream = opt_path(doc, "clickstream", base_dir);
    if (auto j = opt_path(doc, "journal", base_dir)) cfg.journal = *j;
    if (auto l = opt_string(doc, "listen", "")) cfg.listen = *l;
    cfg.cors_origin = opt_string(doc, "cors_origin", "");
    if (auto s = opt_string(doc, "salt", "")) cfg.salt = *s;
    if (cfg.salt.empty()) {
        if (const char* env = std::getenv("KGDASH_SALT")) cfg.salt = env;
    }

    if (auto it = doc.find("endpoint"); it != doc.end() && !it->is_null()) {
        if (!it->is_object()) bad("endpoint", "must be an object");
        EndpointConfig ep;
        auto url = opt_string(*it, "url", "endpoint.");
        if (!url) bad("endpoint.url", "is required");
        ep.url = *url;
        ep.token = opt_string(*it, "token", "endpoint.");
        if (auto env = opt_string(*it, "token_env", "endpoint.")) {
            if (const char* value = std::getenv(env->c_str())) ep.token = value;
        }
        auto cache = opt_path(*it, "cache", base_dir);
        if (!cache) bad("endpoint.cache", "is required for offline reproducibility");
        ep.cache_path = *cache;
        ep.queries_dir = opt_path(*it, "queries", base_dir).value_or(base_dir / "queries");
        cfg.endpoint = std::move(ep);
    }

    if (auto it = doc.find("schema"); it != doc.end() && !it->is_null()) {
        if (!it->is_object()) bad("schema", "must be an object");
        auto& c = cfg.curation;
        c.paper_class = id_field(*it, "paper_class", c.paper_class);
        c.comparison_class = id_field(*it, "comparison_class", c.comparison_class);
        c.contribution_class = id_field(*it, "contribution_class", c.contribution_class);
        c.template_class = id_field(*it, "template_class", c.template_class);
        c.research_field_predicate = id_field(*it, "research_field_predicate", c.research_field_predicate);
        if (auto d = it->find("traversal_depth_limit"); d != it->end() && !d->is_null()) {
            if (!d->is_number_integer()) bad("schema.traversal_depth_limit", "must be an integer");
            c.traversal_depth_limit = d->get<int>();
        }
    }
    if (auto t = opt_string(doc, "entity_url_template", "")) cfg.curation.entity_url_template = *t;
    cfg.curation.validate();
    parse_listen(cfg.listen);
    return cfg;
}

AppConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::config_error, "cannot open config " + path.string(), path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw Error(Errc::config_error, "config is not valid JSON: " + path.string());
    return parse_config(doc, fs::absolute(path).parent_path());
}

std::pair<std::string, int> parse_listen(const std::string& listen) {
    auto colon = listen.rfind(':');
    if (colon == std::string::npos || colon + 1 == listen.size()) bad("listen", "must be host:port");
    std::string host = listen.substr(0, colon);
    int port = 0;
    try {
        std::size_t used = 0;
        port = std::stoi(listen.substr(colon + 1), &used);
        if (used != listen.size() - colon - 1) throw std::invalid_argument("port");
    } catch (const std::exception&) {
        bad("listen", "port must be a number");
    }
    if (port < 0 || port > 65535) bad("listen", "port out of range");
    if (host.empty()) host = "0.0.0.0";
    return {host, port};
}

}  // namespace kgdash
