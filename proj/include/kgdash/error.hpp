#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kgdash {

enum class Errc {
    // kg-model
    invalid_id,
    dangling_reference,
    duplicate_id,
    kind_mismatch,
    // ingest
    malformed_line,
    id_collision,
    schema_violation,
    endpoint_unreachable,
    query_rejected,
    cache_write_failed,
    // metrics
    not_a_comparison,
    // clickstream
    malformed_row,
    bad_timestamp,
    invalid_range,
    invalid_arg,
    // comments
    unknown_target,
    empty_text,
    empty_author,
    unknown_comment,
    journal_corrupt,
    // service / cli plumbing
    config_error,
    io_error,
    bind_failure,
};

/// Stable snake_case name of an error code, used on the wire and in diagnostics.
std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library. `context()` carries the offending
/// item (an id, a line number, a JSON pointer) when there is one.
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message, std::string context = {});

    Errc code() const noexcept { return code_; }
    const std::string& context() const noexcept { return context_; }

private:
    Errc code_;
    std::string context_;
};

}  // namespace kgdash
