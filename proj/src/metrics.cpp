#include "kgdash/metrics.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "kgdash/error.hpp"

namespace kgdash {

namespace {

bool is_ascii_punct(char c) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

std::vector<EntityId> undescribed_of_kind(const Snapshot& snapshot, EntityKind kind) {
    std::vector<EntityId> out;
    for (const auto& e : snapshot.entities()) {
        if (e.kind == kind && is_blank(e.description)) out.push_back(e.id);
    }
    return out;
}

bool is_classed(const Entity& e, const EntityId& class_id) {
    return std::binary_search(e.classes.begin(), e.classes.end(), class_id);
}

}  // namespace

std::string normalize_label(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (is_ascii_punct(c)) continue;
        if (is_ascii_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    }
    return out;
}

std::vector<EntityId> predicates_without_description(const Snapshot& snapshot) {
    return undescribed_of_kind(snapshot, EntityKind::predicate);
}

std::vector<EntityId> classes_without_description(const Snapshot& snapshot) {
    return undescribed_of_kind(snapshot, EntityKind::klass);
}

std::vector<DuplicateGroup> duplicate_predicate_groups(const Snapshot& snapshot) {
    std::unordered_map<std::string, std::vector<const Entity*>> by_label;
    for (const auto& e : snapshot.entities()) {
        if (e.kind != EntityKind::predicate || !e.label) continue;
        auto key = normalize_label(*e.label);
        if (key.empty()) continue;
        by_label[std::move(key)].push_back(&e);
    }

    std::vector<DuplicateGroup> groups;
    for (auto& [label, members] : by_label) {
        if (members.size() < 2) continue;
        DuplicateGroup g;
        g.normalized_label = label;
        g.size = members.size();
        // entities() is id-ordered, so members already are.
        for (const Entity* e : members) {
            g.members.push_back(e->id);
            if (is_blank(e->description)) g.members_without_description.push_back(e->id);
        }
        groups.push_back(std::move(g));
    }
    std::sort(groups.begin(), groups.end(), [](const DuplicateGroup& a, const DuplicateGroup& b) {
        return std::tie(a.size, a.normalized_label) < std::tie(b.size, b.normalized_label);
    });
    return groups;
}

std::optional<Task1Candidate> task1_candidate(const Snapshot& snapshot) {
    for (auto& g : duplicate_predicate_groups(snapshot)) {
        if (g.members_without_description.empty()) continue;
        EntityId pick = g.members_without_description.front();
        return Task1Candidate{std::move(pick), std::move(g)};
    }
    return std::nullopt;
}

std::vector<EntityId> unused_resources(const Snapshot& snapshot) {
    std::vector<EntityId> out;
    for (const auto& e : snapshot.entities()) {
        if (e.kind == EntityKind::resource && snapshot.outgoing(e.id).empty() && snapshot.incoming(e.id).empty()) {
            out.push_back(e.id);
        }
    }
    return out;
}

std::vector<EntityId> unlabeled_resources(const Snapshot& snapshot) {
    std::vector<EntityId> out;
    for (const auto& e : snapshot.entities()) {
        if (e.kind == EntityKind::resource && is_blank(e.label)) out.push_back(e.id);
    }
    return out;
}

PapersInField papers_in_field(const Snapshot& snapshot, const CurationConfig& config, const EntityId& field_id) {
    PapersInField result;
    for (const auto& paper : snapshot.members_of(config.paper_class)) {
        for (const Statement* s : snapshot.outgoing(paper)) {
            if (s->predicate == config.research_field_predicate && s->object == field_id) {
                result.papers.push_back(paper);
                break;
            }
        }
    }
    result.count = result.papers.size();
    return result;
}

std::map<EntityId, std::size_t> statement_count_per_paper(const Snapshot& snapshot, const CurationConfig& config) {
    std::map<EntityId, std::size_t> counts;
    const auto limit = config.traversal_depth_limit;
    std::unordered_set<EntityId> visited;
    std::deque<std::pair<EntityId, int>> frontier;
    for (const auto& paper : snapshot.members_of(config.paper_class)) {
        visited.clear();
        frontier.clear();
        visited.insert(paper);
        frontier.emplace_back(paper, 0);
        std::size_t count = 0;
        while (!frontier.empty()) {
            auto [node, depth] = std::move(frontier.front());
            frontier.pop_front();
            if (limit && depth >= *limit) continue;
            // Each node is expanded once and a statement has one subject, so
            // every reachable statement is counted exactly once.
            for (const Statement* s : snapshot.outgoing(node)) {
                ++count;
                if (visited.insert(s->object).second) frontier.emplace_back(s->object, depth + 1);
            }
        }
        counts.emplace(paper, count);
    }
    return counts;
}

std::optional<PaperStatementCount> paper_with_fewest_statements(const Snapshot& snapshot,
                                                                const CurationConfig& config) {
    std::optional<PaperStatementCount> best;
    // Map iteration is ascending by id, so strict < keeps the smallest id on ties.
    for (const auto& [paper, count] : statement_count_per_paper(snapshot, config)) {
        if (!best || count < best->statements) best = PaperStatementCount{paper, count};
    }
    return best;
}

EmptyCellReport comparison_empty_cells(const Snapshot& snapshot, const CurationConfig& config,
                                       const EntityId& comparison_id) {
    const Entity* comparison = snapshot.find(comparison_id);
    if (!comparison || comparison->kind != EntityKind::resource || !is_classed(*comparison, config.comparison_class)) {
        throw Error(Errc::not_a_comparison, comparison_id.str() + " is not a comparison", comparison_id.str());
    }

    EmptyCellReport report;
    report.comparison_id = comparison_id;
    for (const Statement* s : snapshot.outgoing(comparison_id)) {
        const Entity* target = snapshot.find(s->object);
        if (target && target->kind == EntityKind::resource && is_classed(*target, config.contribution_class)) {
            report.contributions.push_back(target->id);
        }
    }
    std::sort(report.contributions.begin(), report.contributions.end());
    report.contributions.erase(std::unique(report.contributions.begin(), report.contributions.end()),
                               report.contributions.end());

    std::vector<std::pair<EntityId, EntityId>> filled;
    for (const auto& c : report.contributions) {
        for (const Statement* s : snapshot.outgoing(c)) {
            report.properties.push_back(s->predicate);
            filled.emplace_back(c, s->predicate);
        }
    }
    std::sort(report.properties.begin(), report.properties.end());
    report.properties.erase(std::unique(report.properties.begin(), report.properties.end()),
                            report.properties.end());
    std::sort(filled.begin(), filled.end());

    for (const auto& c : report.contributions) {
        for (const auto& p : report.properties) {
            if (!std::binary_search(filled.begin(), filled.end(), std::make_pair(c, p))) {
                report.empty_cells.emplace_back(c, p);
            }
        }
    }
    report.empty_count = report.empty_cells.size();
    report.total_cells = report.contributions.size() * report.properties.size();
    return report;
}

TemplateOverview template_overview(const Snapshot& snapshot, const CurationConfig& config) {
    TemplateOverview overview;
    std::map<std::string, std::size_t> months;
    for (const auto& id : snapshot.members_of(config.template_class)) {
        const Entity* e = snapshot.find(id);
        overview.templates.push_back(TemplateEntry{id, e->label, e->created_at});
        if (e->created_at) ++months[format_year_month(*e->created_at)];
    }
    overview.monthly_counts.assign(months.begin(), months.end());
    return overview;
}

MetricsSummary metrics_summary(const Snapshot& snapshot, const CurationConfig& config) {
    MetricsSummary summary;
    summary.predicates_without_description = predicates_without_description(snapshot).size();
    summary.classes_without_description = classes_without_description(snapshot).size();
    summary.duplicate_predicate_groups = duplicate_predicate_groups(snapshot).size();
    summary.unused_resources = unused_resources(snapshot).size();
    summary.unlabeled_resources = unlabeled_resources(snapshot).size();
    summary.papers_total = snapshot.members_of(config.paper_class).size();
    summary.templates_total = snapshot.members_of(config.template_class).size();
    summary.built_at = snapshot.built_at();
    return summary;
}

}  // namespace kgdash
