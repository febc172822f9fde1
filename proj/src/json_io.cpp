#include "kgdash/json_io.hpp"

namespace kgdash::wire {

json ids(const std::vector<EntityId>& list) {
    json out = json::array();
    for (const auto& id : list) out.push_back(id.str());
    return out;
}

json entity_ref(const Snapshot& snapshot, const CurationConfig& config, const EntityId& id) {
    const Entity* e = snapshot.find(id);
    return json{{"id", id.str()},
                {"label", e && e->label ? json(*e->label) : json(nullptr)},
                {"url", config.entity_url(id)}};
}

json to_json(const MetricsSummary& s) {
    return json{{"predicates_without_description", s.predicates_without_description},
                {"classes_without_description", s.classes_without_description},
                {"duplicate_predicate_groups", s.duplicate_predicate_groups},
                {"unused_resources", s.unused_resources},
                {"unlabeled_resources", s.unlabeled_resources},
                {"papers_total", s.papers_total},
                {"templates_total", s.templates_total},
                {"built_at", format_timestamp(s.built_at)}};
}

json to_json(const DuplicateGroup& g, const CurationConfig& config) {
    json links = json::object();
    for (const auto& m : g.members) links[m.str()] = config.entity_url(m);
    return json{{"normalized_label", g.normalized_label},
                {"size", g.size},
                {"members", ids(g.members)},
                {"members_without_description", ids(g.members_without_description)},
                {"links", std::move(links)}};
}

json to_json(const EmptyCellReport& r) {
    json cells = json::array();
    for (const auto& [c, p] : r.empty_cells) cells.push_back(json{{"contribution", c.str()}, {"property", p.str()}});
    return json{{"comparison_id", r.comparison_id.str()},
                {"contributions", ids(r.contributions)},
                {"properties", ids(r.properties)},
                {"empty_cells", std::move(cells)},
                {"empty_count", r.empty_count},
                {"total_cells", r.total_cells}};
}

json to_json(const TemplateOverview& o, const CurationConfig& config) {
    json templates = json::array();
    for (const auto& t : o.templates) {
        templates.push_back(json{{"id", t.id.str()},
                                 {"label", t.label ? json(*t.label) : json(nullptr)},
                                 {"created_at", t.created_at ? json(format_timestamp(*t.created_at)) : json(nullptr)},
                                 {"url", config.entity_url(t.id)}});
    }
    json months = json::array();
    for (const auto& [month, count] : o.monthly_counts) months.push_back(json{{"month", month}, {"count", count}});
    return json{{"templates", std::move(templates)}, {"monthly_counts", std::move(months)}};
}

json to_json(const TransitionGraph& g) {
    json nodes = json::array();
    for (const auto& n : g.nodes) nodes.push_back(n);
    json edges = json::array();
    for (const auto& [e, count] : g.edges) edges.push_back(json{{"from", e.first}, {"to", e.second}, {"count", count}});
    return json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

json to_json(const Transition& t) { return json{{"from", t.from}, {"to", t.to}, {"count", t.count}}; }

json to_json(const NextStep& s) { return json{{"page", s.page}, {"count", s.count}}; }

json to_json(const PathResult& p) { return json{{"path", p.path}, {"occurrences", p.occurrences}}; }

json to_json(const Comment& c, const CurationConfig& config) {
    return json{{"id", c.id},
                {"target", c.target.str()},
                {"target_url", config.entity_url(c.target)},
                {"type", comment_type_name(c.type)},
                {"text", c.text},
                {"author", c.author},
                {"created_at", format_timestamp(c.created_at)},
                {"status", comment_status_name(c.status)}};
}

}  // namespace kgdash::wire
