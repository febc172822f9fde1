#include "kgdash/api.hpp"

#include <charconv>

#include "kgdash/error.hpp"
#include "kgdash/json_io.hpp"
#include "kgdash/metrics.hpp"

namespace kgdash {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Caller-side failures raised by the router itself.
struct HttpFailure {
    int status;
    std::string code;
    std::string message;
};

ApiResponse error_response(int status, std::string_view code, std::string message) {
    return ApiResponse{status, json{{"code", code}, {"message", std::move(message)}}};
}

int status_for(Errc code) {
    switch (code) {
        case Errc::not_a_comparison:
        case Errc::unknown_comment: return 404;
        case Errc::invalid_arg:
        case Errc::invalid_range:
        case Errc::invalid_id:
        case Errc::unknown_target:
        case Errc::empty_text:
        case Errc::empty_author: return 422;
        default: return 500;
    }
}

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/') ++i;
        std::size_t start = i;
        while (i < path.size() && path[i] != '/') ++i;
        if (i > start) parts.emplace_back(path.substr(start, i - start));
    }
    return parts;
}

class Query {
public:
    explicit Query(const std::multimap<std::string, std::string>& params) : params_(params) {}

    std::optional<std::string> get(const std::string& name) const {
        auto it = params_.find(name);
        if (it == params_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<long long> integer(const std::string& name) const {
        auto text = get(name);
        if (!text) return std::nullopt;
        long long value = 0;
        auto [end, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
        if (ec != std::errc{} || end != text->data() + text->size()) {
            throw Error(Errc::invalid_arg, name + " must be an integer", name);
        }
        return value;
    }

    std::optional<Date> date(const std::string& name) const {
        auto text = get(name);
        if (!text || text->empty()) return std::nullopt;
        auto d = parse_date(*text);
        if (!d) throw Error(Errc::invalid_arg, name + " must be a YYYY-MM-DD date", name);
        return d;
    }

    std::optional<EntityId> id(const std::string& name) const {
        auto text = get(name);
        if (!text || text->empty()) return std::nullopt;
        if (!EntityId::is_valid(*text)) throw Error(Errc::invalid_arg, name + " is not a valid id", name);
        return EntityId(*text);
    }

private:
    const std::multimap<std::string, std::string>& params_;
};

// Standard list envelope: {"total", "offset", "limit", "items"}.
json paginate(json items, const Query& q) {
    auto offset = q.integer("offset").value_or(0);
    auto limit = q.integer("limit");
    if (offset < 0) throw Error(Errc::invalid_arg, "offset must be non-negative", "offset");
    if (limit && *limit < 0) throw Error(Errc::invalid_arg, "limit must be non-negative", "limit");
    const auto total = static_cast<long long>(items.size());
    json page = json::array();
    long long end = limit ? std::min(total, offset + *limit) : total;
    for (long long i = offset; i < end; ++i) page.push_back(std::move(items[static_cast<std::size_t>(i)]));
    return json{{"total", total},
                {"offset", offset},
                {"limit", limit ? json(*limit) : json(nullptr)},
                {"items", std::move(page)}};
}

EntityId path_id(const std::string& segment) {
    if (!EntityId::is_valid(segment)) throw Error(Errc::invalid_id, "invalid id in path", segment);
    return EntityId(segment);
}

json parse_body(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw HttpFailure{400, "bad_request", "body must be a JSON object"};
    return j;
}

std::string body_string(const json& body, const char* key, bool required) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) {
        if (required) throw HttpFailure{422, "invalid_arg", std::string("missing field ") + key};
        return {};
    }
    if (!it->is_string()) throw HttpFailure{422, "invalid_arg", std::string(key) + " must be a string"};
    return it->get<std::string>();
}

}  // namespace

std::string ApiResponse::text() const { return body.dump(2, ' ', false, json::error_handler_t::replace) + "\n"; }

Api::Api(CurationConfig config, std::shared_ptr<SnapshotHandle> snapshot, std::shared_ptr<SessionHandle> visits,
         std::shared_ptr<CommentStore> comments, Clock clock)
    : config_(std::move(config)),
      snapshot_(std::move(snapshot)),
      visits_(std::move(visits)),
      comments_(std::move(comments)),
      clock_(std::move(clock)) {
    config_.validate();
}

ApiResponse Api::handle(const ApiRequest& request) const {
    try {
        return route(request);
    } catch (const HttpFailure& f) {
        return error_response(f.status, f.code, f.message);
    } catch (const Error& e) {
        int status = status_for(e.code());
        return error_response(status, status == 500 ? "internal" : errc_name(e.code()), e.what());
    } catch (const std::exception& e) {
        return error_response(500, "internal", e.what());
    }
}

ApiResponse Api::route(const ApiRequest& request) const {
    const auto parts = split_path(request.path);
    const Query q(request.query);
    const std::string& method = request.method;

    auto not_found = [&] { return error_response(404, "not_found", "no such endpoint: " + request.path); };
    auto require = [&](std::string_view allowed) {
        if (method != allowed) {
            throw HttpFailure{405, "method_not_allowed", method + " not allowed on " + request.path};
        }
    };

    if (parts.size() < 2 || parts[0] != "api") return not_found();

    auto snap = snapshot_->load();
    if (!snap) throw HttpFailure{503, "no_snapshot", "no knowledge graph snapshot loaded"};
    const Snapshot& kg = *snap;
    auto ref = [&](const EntityId& id) { return wire::entity_ref(kg, config_, id); };
    auto refs = [&](const std::vector<EntityId>& list) {
        json items = json::array();
        for (const auto& id : list) items.push_back(ref(id));
        return items;
    };

    const std::string& area = parts[1];

    if (area == "health" && parts.size() == 2) {
        require("GET");
        auto visits = visits_ ? visits_->load() : nullptr;
        return {200, json{{"status", "ok"},
                          {"version", kVersion},
                          {"snapshot_built_at", format_timestamp(kg.built_at())},
                          {"entities", kg.entities().size()},
                          {"statements", kg.statements().size()},
                          {"sessions", visits ? visits->sessions().size() : 0},
                          {"page_views", visits ? visits->view_count() : 0},
                          {"comments", comments_ ? comments_->size() : 0}}};
    }

    if (area == "metrics" && parts.size() == 3 && parts[2] == "summary") {
        require("GET");
        return {200, wire::to_json(metrics_summary(kg, config_))};
    }

    if (area == "predicates" && parts.size() == 3 && parts[2] == "undescribed") {
        require("GET");
        return {200, paginate(refs(predicates_without_description(kg)), q)};
    }
    if (area == "classes" && parts.size() == 3 && parts[2] == "undescribed") {
        require("GET");
        return {200, paginate(refs(classes_without_description(kg)), q)};
    }
    if (area == "resources" && parts.size() == 3 && (parts[2] == "unused" || parts[2] == "unlabeled")) {
        require("GET");
        return {200, paginate(refs(parts[2] == "unused" ? unused_resources(kg) : unlabeled_resources(kg)), q)};
    }

    if (area == "predicates" && parts.size() >= 3 && parts[2] == "duplicates") {
        require("GET");
        if (parts.size() == 3) {
            json items = json::array();
            for (const auto& g : duplicate_predicate_groups(kg)) items.push_back(wire::to_json(g, config_));
            return {200, paginate(std::move(items), q)};
        }
        if (parts.size() == 4 && parts[3] == "task1") {
            auto candidate = task1_candidate(kg);
            if (!candidate) return {200, json{{"candidate", nullptr}}};
            json c = ref(candidate->predicate);
            c["group"] = wire::to_json(candidate->group, config_);
            return {200, json{{"candidate", std::move(c)}}};
        }
        return not_found();
    }

    if (area == "fields" && parts.size() == 4 && parts[3] == "papers") {
        require("GET");
        auto field = path_id(parts[2]);
        auto result = papers_in_field(kg, config_, field);
        json body = paginate(refs(result.papers), q);
        body["field"] = field.str();
        body["count"] = result.count;
        return {200, std::move(body)};
    }

    if (area == "papers" && parts.size() == 3 && parts[2] == "statement-counts") {
        require("GET");
        auto order = q.get("order").value_or("asc");
        if (order != "asc" && order != "desc") {
            throw Error(Errc::invalid_arg, "order must be asc or desc", "order");
        }
        std::vector<PaperStatementCount> rows;
        for (const auto& [paper, count] : statement_count_per_paper(kg, config_)) rows.push_back({paper, count});
        std::stable_sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
            return order == "asc" ? a.statements < b.statements : a.statements > b.statements;
        });
        json items = json::array();
        for (const auto& r : rows) {
            json item = ref(r.paper);
            item["statements"] = r.statements;
            items.push_back(std::move(item));
        }
        json body = paginate(std::move(items), q);
        body["order"] = order;
        return {200, std::move(body)};
    }
    if (area == "papers" && parts.size() == 3 && parts[2] == "fewest") {
        require("GET");
        auto fewest = paper_with_fewest_statements(kg, config_);
        if (!fewest) return {200, json{{"paper", nullptr}}};
        json paper = ref(fewest->paper);
        paper["statements"] = fewest->statements;
        return {200, json{{"paper", std::move(paper)}}};
    }

    if (area == "comparisons" && parts.size() == 4 && parts[3] == "empty-cells") {
        require("GET");
        auto report = comparison_empty_cells(kg, config_, path_id(parts[2]));
        json body = wire::to_json(report);
        body["url"] = config_.entity_url(report.comparison_id);
        return {200, std::move(body)};
    }

    if (area == "templates" && parts.size() == 3 && parts[2] == "overview") {
        require("GET");
        return {200, wire::to_json(template_overview(kg, config_), config_)};
    }

    if (area == "visits" && parts.size() == 3) {
        require("GET");
        auto all = visits_ ? visits_->load() : nullptr;
        if (!all) all = std::make_shared<const SessionSet>();
        auto from = q.date("from");
        auto to = q.date("to");
        std::shared_ptr<const SessionSet> sessions = all;
        if (from || to) {
            sessions = std::make_shared<const SessionSet>(
                filter_by_date(*all, from.value_or(Date::min()), to.value_or(Date::max())));
        }
        json range = nullptr;
        if (sessions->date_range()) {
            range = json{{"from", format_date(sessions->date_range()->from)},
                         {"to", format_date(sessions->date_range()->to)}};
        }
        const std::string& what = parts[2];
        if (what == "graph") {
            json body = wire::to_json(build_transition_graph(*sessions));
            body["date_range"] = std::move(range);
            return {200, std::move(body)};
        }
        if (what == "top-edge") {
            auto top = top_transition(build_transition_graph(*sessions));
            return {200, json{{"edge", top ? wire::to_json(*top) : json(nullptr)}, {"date_range", std::move(range)}}};
        }
        if (what == "next") {
            auto node = q.get("node");
            if (!node || node->empty()) throw Error(Errc::invalid_arg, "node is required", "node");
            json items = json::array();
            for (const auto& s : next_step_distribution(build_transition_graph(*sessions), *node)) {
                items.push_back(wire::to_json(s));
            }
            json body = paginate(std::move(items), q);
            body["node"] = *node;
            body["date_range"] = std::move(range);
            return {200, std::move(body)};
        }
        if (what == "paths") {
            auto min_len = q.integer("min_len").value_or(3);
            auto top_k = q.integer("top_k").value_or(10);
            json items = json::array();
            for (const auto& p : frequent_paths(*sessions, min_len, top_k)) items.push_back(wire::to_json(p));
            json body = paginate(std::move(items), q);
            body["min_len"] = min_len;
            body["top_k"] = top_k;
            body["date_range"] = std::move(range);
            return {200, std::move(body)};
        }
        return not_found();
    }

    if (area == "comments") {
        if (!comments_) throw HttpFailure{503, "no_comment_store", "comment store not configured"};
        if (parts.size() == 2) {
            if (method == "POST") {
                json body = parse_body(request.body);
                auto target_text = body_string(body, "target", true);
                if (!EntityId::is_valid(target_text)) throw HttpFailure{422, "invalid_arg", "target is not an id"};
                auto type_text = body_string(body, "type", false);
                auto type = type_text.empty() ? std::optional(CommentType::other) : parse_comment_type(type_text);
                if (!type) throw HttpFailure{422, "invalid_arg", "unknown comment type '" + type_text + "'"};
                auto created = comments_->create(kg, EntityId(target_text), *type, body_string(body, "text", false),
                                                 body_string(body, "author", false), clock_());
                return {201, wire::to_json(created, config_)};
            }
            require("GET");
            CommentFilter filter;
            filter.target = q.id("target");
            if (auto s = q.get("status"); s && !s->empty()) {
                filter.status = parse_comment_status(*s);
                if (!filter.status) throw Error(Errc::invalid_arg, "unknown status '" + *s + "'", "status");
            }
            if (auto t = q.get("type"); t && !t->empty()) {
                filter.type = parse_comment_type(*t);
                if (!filter.type) throw Error(Errc::invalid_arg, "unknown type '" + *t + "'", "type");
            }
            json items = json::array();
            for (const auto& c : comments_->list(filter)) items.push_back(wire::to_json(c, config_));
            return {200, paginate(std::move(items), q)};
        }
        if (parts.size() == 3) {
            std::uint64_t id = 0;
            auto [end, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), id);
            if (ec != std::errc{} || end != parts[2].data() + parts[2].size()) {
                throw Error(Errc::unknown_comment, "unknown comment " + parts[2], parts[2]);
            }
            if (method == "PATCH") {
                json body = parse_body(request.body);
                auto status = parse_comment_status(body_string(body, "status", true));
                if (!status) throw HttpFailure{422, "invalid_arg", "status must be open or resolved"};
                return {200, wire::to_json(comments_->set_status(id, *status), config_)};
            }
            require("GET");
            auto c = comments_->get(id);
            if (!c) throw Error(Errc::unknown_comment, "unknown comment " + parts[2], parts[2]);
            return {200, wire::to_json(*c, config_)};
        }
    }

    return not_found();
}

}  // namespace kgdash
