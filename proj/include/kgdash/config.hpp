#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "kgdash/ingest.hpp"
#include "kgdash/model.hpp"

namespace kgdash {

struct EndpointConfig {
    std::string url;
    std::optional<std::string> token;
    std::filesystem::path cache_path;
    std::filesystem::path queries_dir;
};

/// One reproducible run definition. Relative paths are resolved against the
/// config file's directory.
struct AppConfig {
    std::optional<std::filesystem::path> ntriples;
    std::optional<std::filesystem::path> json_dump;
    std::optional<EndpointConfig> endpoint;
    std::optional<std::filesystem::path> clickstream;
    std::filesystem::path journal{"comments.jsonl"};
    std::string listen{"127.0.0.1:8080"};
    std::optional<std::string> cors_origin;
    std::string salt;
    CurationConfig curation;

    /// The configured knowledge-graph source; exactly one must be set.
    IngestSource kg_source() const;
};

/// Throws Error(config_error) on malformed or inconsistent settings.
AppConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
AppConfig load_config(const std::filesystem::path& path);

/// Splits `host:port`; throws Error(config_error).
std::pair<std::string, int> parse_listen(const std::string& listen);

}  // namespace kgdash
