#include "kgdash/error.hpp"

namespace kgdash {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_id: return "invalid_id";
        case Errc::dangling_reference: return "dangling_reference";
        case Errc::duplicate_id: return "duplicate_id";
        case Errc::kind_mismatch: return "kind_mismatch";
        case Errc::malformed_line: return "malformed_line";
        case Errc::id_collision: return "id_collision";
        case Errc::schema_violation: return "schema_violation";
        case Errc::endpoint_unreachable: return "endpoint_unreachable";
        case Errc::query_rejected: return "query_rejected";
        case Errc::cache_write_failed: return "cache_write_failed";
        case Errc::not_a_comparison: return "not_a_comparison";
        case Errc::malformed_row: return "malformed_row";
        case Errc::bad_timestamp: return "bad_timestamp";
        case Errc::invalid_range: return "invalid_range";
        case Errc::invalid_arg: return "invalid_arg";
        case Errc::unknown_target: return "unknown_target";
        case Errc::empty_text: return "empty_text";
        case Errc::empty_author: return "empty_author";
        case Errc::unknown_comment: return "unknown_comment";
        case Errc::journal_corrupt: return "journal_corrupt";
        case Errc::config_error: return "config_error";
        case Errc::io_error: return "io_error";
        case Errc::bind_failure: return "bind_failure";
    }
    return "unknown";
}

Error::Error(Errc code, std::string message, std::string context)
    : std::runtime_error(std::move(message)), code_(code), context_(std::move(context)) {}

}  // namespace kgdash
