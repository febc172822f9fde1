#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgdash/model.hpp"

namespace kgdash {

/// Raw, unvalidated graph content as read from a source. Feed it to
/// build_snapshot to get a queryable snapshot.
struct ParsedGraph {
    std::vector<Entity> entities;
    std::vector<Statement> statements;
};

/// Parses UTF-8 N-Triples, one triple per line.
///
/// `rdfs:label` sets Entity::label, `dcterms:description` (preferred) or
/// `rdfs:comment` sets Entity::description, `rdf:type` adds a class
/// membership; every other triple becomes a Statement `S<n>` numbered in input
/// order. IRIs map to ids by their final `/` or `#` segment. Literal objects
/// become literal entities `lit:<n>`, numbered by occurrence.
///
/// Throws Error(malformed_line) or Error(id_collision); context is the 1-based
/// line number.
ParsedGraph parse_ntriples(std::istream& in);

/// Parses the canonical JSON dump
/// `{"entities":[...],"statements":[...]}` without materialising the whole
/// document. Unknown fields are ignored. Throws Error(schema_violation) with
/// the JSON pointer of the offending value as context.
ParsedGraph parse_json_dump(std::istream& in);

/// Writes the canonical JSON dump, one entity or statement per line, in
/// ascending id order.
void write_json_dump(std::ostream& out, const Snapshot& snapshot);
void write_json_dump(std::ostream& out, const ParsedGraph& graph);

/// Named query texts, one per KPI data need (`all-entities`, `all-statements`).
using QuerySet = std::map<std::string, std::string, std::less<>>;

inline constexpr std::string_view kEntitiesQuery = "all-entities";
inline constexpr std::string_view kStatementsQuery = "all-statements";

/// Loads every `*.rq` / `*.sparql` / `*.txt` file in `dir`; the stem is the
/// query name.
QuerySet load_query_library(const std::filesystem::path& dir);

/// True when the text contains no SPARQL Update keyword outside of IRIs,
/// string literals and comments.
bool is_read_only_query(std::string_view query);

struct IngestSource {
    enum class Kind { ntriples_file, json_dump_file, remote_endpoint };

    Kind kind = Kind::json_dump_file;
    std::string location;  // file path or endpoint URL
    std::optional<std::filesystem::path> cache_path;
    std::optional<std::string> auth_token;
    int timeout_seconds = 10;

    /// remote_endpoint requires a cache_path.
    void validate() const;
};

struct FetchResult {
    ParsedGraph graph;
    bool from_cache = false;
    /// Set when the endpoint failed and the cached dump was served instead.
    std::optional<std::string> warning;
};

/// POSTs every query to the endpoint, writes the merged results to the cache
/// as a JSON dump and parses that dump. Falls back to the cache, with a
/// staleness warning, when the endpoint cannot be reached. Only read queries
/// are ever sent.
FetchResult fetch_remote(const IngestSource& source, const QuerySet& queries);

/// Reads a file source, or fetches a remote one.
FetchResult load_source(const IngestSource& source, const QuerySet& queries = {});

}  // namespace kgdash
