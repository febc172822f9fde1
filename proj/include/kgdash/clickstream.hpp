#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgdash/time.hpp"

namespace kgdash {

struct PageView {
    std::string page;  // canonical path: starts with '/', no query or fragment
    Timestamp at{};

    friend bool operator==(const PageView&, const PageView&) = default;
};

/// One anonymised visit.
struct Session {
    std::string key;               // salted one-way hash of the source visit id
    std::vector<PageView> views;   // time-ordered, as recorded (refreshes included)
    std::vector<std::string> pages;  // `views` with adjacent repeats collapsed

    friend bool operator==(const Session&, const Session&) = default;
};

struct DateRange {
    Date from{};
    Date to{};

    friend bool operator==(const DateRange&, const DateRange&) = default;
};

class SessionSet {
public:
    SessionSet() = default;
    /// Sorts sessions by key and derives `pages` and the covered date range.
    explicit SessionSet(std::vector<Session> sessions);

    const std::vector<Session>& sessions() const noexcept { return sessions_; }
    /// Dates actually covered by the views; empty when there are none.
    const std::optional<DateRange>& date_range() const noexcept { return range_; }
    std::size_t view_count() const noexcept { return views_; }
    bool empty() const noexcept { return sessions_.empty(); }

    friend bool operator==(const SessionSet&, const SessionSet&) = default;

private:
    std::vector<Session> sessions_;
    std::optional<DateRange> range_;
    std::size_t views_ = 0;
};

struct TransitionGraph {
    std::set<std::string> nodes;
    std::map<std::pair<std::string, std::string>, std::uint64_t> edges;

    friend bool operator==(const TransitionGraph&, const TransitionGraph&) = default;
};

struct Transition {
    std::string from;
    std::string to;
    std::uint64_t count = 0;

    friend bool operator==(const Transition&, const Transition&) = default;
};

struct NextStep {
    std::string page;
    std::uint64_t count = 0;

    friend bool operator==(const NextStep&, const NextStep&) = default;
};

struct PathResult {
    std::vector<std::string> path;
    std::uint64_t occurrences = 0;

    friend bool operator==(const PathResult&, const PathResult&) = default;
};

enum class ClickstreamFormat { csv, jsonl };

/// Strips scheme, host, query string and fragment; guarantees a leading '/'.
/// Returns nullopt for an empty path.
std::optional<std::string> canonicalize_url(std::string_view url);

/// Hex SHA-256 of salt and visit id.
std::string session_key(std::string_view salt, std::string_view visit_id);

/// Reads `visit_id,url,timestamp` rows (CSV with header, or JSON lines).
/// Throws Error(malformed_row) or Error(bad_timestamp) with the 1-based row
/// number as context; the CSV header is row 0.
SessionSet ingest_clickstream(std::istream& in, ClickstreamFormat format, std::string_view salt);

/// Picks the format from the first non-blank character.
SessionSet ingest_clickstream(std::istream& in, std::string_view salt);

/// Keeps views whose UTC date lies in [from, to]. Throws Error(invalid_range)
/// when from > to.
SessionSet filter_by_date(const SessionSet& sessions, Date from, Date to);

TransitionGraph build_transition_graph(const SessionSet& sessions);

/// Highest count; ties go to the lexicographically smallest (from, to).
std::optional<Transition> top_transition(const TransitionGraph& graph);

/// Out-edges of `node`, count descending then page ascending.
std::vector<NextStep> next_step_distribution(const TransitionGraph& graph, std::string_view node);

/// Top `top_k` contiguous page sequences of exactly `min_len` pages, counting
/// overlapping occurrences. Throws Error(invalid_arg) for min_len < 2 or
/// top_k < 1.
std::vector<PathResult> frequent_paths(const SessionSet& sessions, long long min_len, long long top_k);

}  // namespace kgdash
