#include "kgdash/clickstream.hpp"

#include <algorithm>
#include <istream>
#include <unordered_map>

#include <json.hpp>
#include <openssl/evp.h>

#include "kgdash/error.hpp"

namespace kgdash {

namespace {

struct RawView {
    Timestamp at;
    std::size_t row;
    std::string page;
};

[[noreturn]] void malformed(std::size_t row, const std::string& reason) {
    throw Error(Errc::malformed_row, "row " + std::to_string(row) + ": " + reason, std::to_string(row));
}

std::string_view trim_ascii(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// RFC 4180 fields on a single physical line.
std::vector<std::string> split_csv(std::string_view line, std::size_t row) {
    std::vector<std::string> fields;
    std::string field;
    std::size_t i = 0;
    while (true) {
        field.clear();
        if (i < line.size() && line[i] == '"') {
            ++i;
            while (true) {
                if (i >= line.size()) malformed(row, "unterminated quoted field");
                if (line[i] == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        field += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                field += line[i++];
            }
            if (i < line.size() && line[i] != ',') malformed(row, "text after closing quote");
        } else {
            while (i < line.size() && line[i] != ',') field += line[i++];
        }
        fields.push_back(field);
        if (i >= line.size()) break;
        ++i;  // ','
    }
    return fields;
}

class SessionBuilder {
public:
    explicit SessionBuilder(std::string_view salt) : salt_(salt) {}

    void add(std::size_t row, std::string_view visit_id, std::string_view url, std::string_view timestamp) {
        if (trim_ascii(visit_id).empty()) malformed(row, "empty visit_id");
        auto page = canonicalize_url(url);
        if (!page) malformed(row, "empty url");
        auto at = parse_timestamp(trim_ascii(timestamp));
        if (!at) {
            throw Error(Errc::bad_timestamp, "row " + std::to_string(row) + ": bad timestamp '" +
                                                 std::string(timestamp) + "'",
                        std::to_string(row));
        }
        visits_[std::string(trim_ascii(visit_id))].push_back(RawView{*at, row, std::move(*page)});
    }

    SessionSet finish() {
        std::vector<Session> sessions;
        sessions.reserve(visits_.size());
        for (auto& [visit_id, views] : visits_) {
            std::stable_sort(views.begin(), views.end(),
                             [](const RawView& a, const RawView& b) { return a.at < b.at; });
            Session s;
            s.key = session_key(salt_, visit_id);
            s.views.reserve(views.size());
            for (auto& v : views) s.views.push_back(PageView{std::move(v.page), v.at});
            sessions.push_back(std::move(s));
        }
        visits_.clear();
        return SessionSet(std::move(sessions));
    }

private:
    std::string_view salt_;
    std::unordered_map<std::string, std::vector<RawView>> visits_;
};

SessionSet ingest_csv(std::istream& in, std::string_view salt) {
    std::string line;
    std::size_t row = 0;
    bool have_header = false;
    std::size_t visit_col = 0, url_col = 0, ts_col = 0, width = 0;
    SessionBuilder builder(salt);
    while (std::getline(in, line)) {
        if (trim_ascii(line).empty()) {
            if (have_header) ++row;
            continue;
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header) {
            auto header = split_csv(line, 0);
            width = header.size();
            bool found[3] = {false, false, false};
            for (std::size_t i = 0; i < header.size(); ++i) {
                auto name = trim_ascii(header[i]);
                if (name == "visit_id") visit_col = i, found[0] = true;
                if (name == "url") url_col = i, found[1] = true;
                if (name == "timestamp") ts_col = i, found[2] = true;
            }
            if (!found[0] || !found[1] || !found[2]) malformed(0, "header must name visit_id, url and timestamp");
            have_header = true;
            continue;
        }
        ++row;
        auto fields = split_csv(line, row);
        if (fields.size() != width) {
            malformed(row, "expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()));
        }
        builder.add(row, fields[visit_col], fields[url_col], fields[ts_col]);
    }
    return builder.finish();
}

SessionSet ingest_jsonl(std::istream& in, std::string_view salt) {
    using nlohmann::json;
    std::string line;
    std::size_t row = 0;
    SessionBuilder builder(salt);
    while (std::getline(in, line)) {
        ++row;
        if (trim_ascii(line).empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) malformed(row, "not a JSON object");
        auto field = [&](const char* name) -> std::string {
            auto it = obj.find(name);
            if (it == obj.end()) malformed(row, std::string("missing ") + name);
            if (it->is_string()) return it->get<std::string>();
            // analytics exports often carry numeric visit ids
            if (it->is_number_integer()) return it->dump();
            malformed(row, std::string(name) + " must be a string");
        };
        builder.add(row, field("visit_id"), field("url"), field("timestamp"));
    }
    return builder.finish();
}

}  // namespace

std::optional<std::string> canonicalize_url(std::string_view url) {
    url = trim_ascii(url);
    if (url.empty()) return std::nullopt;
    if (auto hash = url.find('#'); hash != std::string_view::npos) url = url.substr(0, hash);
    if (auto query = url.find('?'); query != std::string_view::npos) url = url.substr(0, query);

    std::string_view path = url;
    if (auto scheme = url.find("://"); scheme != std::string_view::npos) {
        auto slash = url.find('/', scheme + 3);
        path = slash == std::string_view::npos ? std::string_view{} : url.substr(slash);
    } else if (url.starts_with("//")) {
        auto slash = url.find('/', 2);
        path = slash == std::string_view::npos ? std::string_view{} : url.substr(slash);
    }
    if (path.empty() || path.front() != '/') return "/" + std::string(path);
    return std::string(path);
}

std::string session_key(std::string_view salt, std::string_view visit_id) {
    // Length-prefixing the salt keeps (salt, id) pairs unambiguous.
    std::string material = std::to_string(salt.size()) + ":" + std::string(salt) + std::string(visit_id);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(material.data(), material.size(), digest, &len, EVP_sha256(), nullptr);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

SessionSet::SessionSet(std::vector<Session> sessions) : sessions_(std::move(sessions)) {
    std::sort(sessions_.begin(), sessions_.end(), [](const Session& a, const Session& b) { return a.key < b.key; });
    for (auto& s : sessions_) {
        s.pages.clear();
        for (const auto& v : s.views) {
            if (s.pages.empty() || s.pages.back() != v.page) s.pages.push_back(v.page);
            Date d = date_of(v.at);
            if (!range_) {
                range_ = DateRange{d, d};
            } else {
                range_->from = std::min(range_->from, d);
                range_->to = std::max(range_->to, d);
            }
        }
        views_ += s.views.size();
    }
}

SessionSet ingest_clickstream(std::istream& in, ClickstreamFormat format, std::string_view salt) {
    return format == ClickstreamFormat::csv ? ingest_csv(in, salt) : ingest_jsonl(in, salt);
}

SessionSet ingest_clickstream(std::istream& in, std::string_view salt) {
    // Skip leading whitespace to find the first meaningful character.
    while (in && std::isspace(in.peek())) in.get();
    return ingest_clickstream(in, in.peek() == '{' ? ClickstreamFormat::jsonl : ClickstreamFormat::csv, salt);
}

SessionSet filter_by_date(const SessionSet& sessions, Date from, Date to) {
    if (from > to) {
        throw Error(Errc::invalid_range, "date range starts after it ends: " + format_date(from) + " > " +
                                             format_date(to));
    }
    std::vector<Session> kept;
    for (const auto& s : sessions.sessions()) {
        Session f;
        for (const auto& v : s.views) {
            Date d = date_of(v.at);
            if (d >= from && d <= to) f.views.push_back(v);
        }
        if (f.views.empty()) continue;
        f.key = s.key;
        kept.push_back(std::move(f));
    }
    return SessionSet(std::move(kept));
}

TransitionGraph build_transition_graph(const SessionSet& sessions) {
    std::unordered_map<std::string_view, std::uint32_t> ids;
    std::vector<std::string_view> names;
    std::unordered_map<std::uint64_t, std::uint64_t> counts;
    for (const auto& s : sessions.sessions()) {
        std::uint32_t prev = 0;
        bool has_prev = false;
        for (const auto& page : s.pages) {
            auto [it, inserted] = ids.try_emplace(page, static_cast<std::uint32_t>(names.size()));
            if (inserted) names.push_back(page);
            std::uint32_t cur = it->second;
            if (has_prev) ++counts[(std::uint64_t{prev} << 32) | cur];
            prev = cur;
            has_prev = true;
        }
    }

    TransitionGraph graph;
    for (auto name : names) graph.nodes.emplace(name);
    for (const auto& [key, count] : counts) {
        auto from = names[key >> 32];
        auto to = names[key & 0xFFFFFFFFu];
        graph.edges.emplace(std::make_pair(std::string(from), std::string(to)), count);
    }
    return graph;
}

std::optional<Transition> top_transition(const TransitionGraph& graph) {
    std::optional<Transition> best;
    for (const auto& [edge, count] : graph.edges) {
        if (!best || count > best->count) best = Transition{edge.first, edge.second, count};
    }
    return best;
}

std::vector<NextStep> next_step_distribution(const TransitionGraph& graph, std::string_view node) {
    std::vector<NextStep> out;
    std::string from(node);
    for (auto it = graph.edges.lower_bound({from, std::string()}); it != graph.edges.end() && it->first.first == from;
         ++it) {
        out.push_back(NextStep{it->first.second, it->second});
    }
    std::stable_sort(out.begin(), out.end(), [](const NextStep& a, const NextStep& b) { return a.count > b.count; });
    return out;
}

std::vector<PathResult> frequent_paths(const SessionSet& sessions, long long min_len, long long top_k) {
    if (min_len < 2) throw Error(Errc::invalid_arg, "min_len must be at least 2", "min_len");
    if (top_k < 1) throw Error(Errc::invalid_arg, "top_k must be at least 1", "top_k");
    const auto len = static_cast<std::size_t>(min_len);

    // Ranks follow string order, so comparing rank vectors compares paths.
    std::vector<std::string_view> names;
    for (const auto& s : sessions.sessions()) {
        if (s.pages.size() < len) continue;
        for (const auto& p : s.pages) names.push_back(p);
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    std::unordered_map<std::string_view, std::uint32_t> rank;
    rank.reserve(names.size());
    for (std::uint32_t i = 0; i < names.size(); ++i) rank.emplace(names[i], i);

    struct WindowHash {
        std::size_t operator()(const std::vector<std::uint32_t>& w) const noexcept {
            std::uint64_t h = 1469598103934665603ull;
            for (auto v : w) h = (h ^ v) * 1099511628211ull;
            return static_cast<std::size_t>(h);
        }
    };
    std::unordered_map<std::vector<std::uint32_t>, std::uint64_t, WindowHash> counts;
    std::vector<std::uint32_t> window(len);
    for (const auto& s : sessions.sessions()) {
        if (s.pages.size() < len) continue;
        std::vector<std::uint32_t> ranks;
        ranks.reserve(s.pages.size());
        for (const auto& p : s.pages) ranks.push_back(rank.at(p));
        for (std::size_t start = 0; start + len <= ranks.size(); ++start) {
            std::copy_n(ranks.begin() + static_cast<std::ptrdiff_t>(start), len, window.begin());
            ++counts[window];
        }
    }

    using Entry = std::pair<const std::vector<std::uint32_t>*, std::uint64_t>;
    std::vector<Entry> entries;
    entries.reserve(counts.size());
    for (const auto& [w, c] : counts) entries.emplace_back(&w, c);
    auto better = [](const Entry& a, const Entry& b) {
        if (a.second != b.second) return a.second > b.second;
        return *a.first < *b.first;
    };
    std::size_t keep = std::min<std::size_t>(entries.size(), static_cast<std::size_t>(top_k));
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(keep), entries.end(), better);

    std::vector<PathResult> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        PathResult r;
        for (auto id : *entries[i].first) r.path.emplace_back(names[id]);
        r.occurrences = entries[i].second;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace kgdash
