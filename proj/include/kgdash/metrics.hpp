#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgdash/model.hpp"

namespace kgdash {

/// Predicates whose labels coincide after normalize_label.
struct DuplicateGroup {
    std::string normalized_label;
    std::vector<EntityId> members;  // ascending
    std::size_t size = 0;
    std::vector<EntityId> members_without_description;  // ascending, subset of members

    friend bool operator==(const DuplicateGroup&, const DuplicateGroup&) = default;
};

struct Task1Candidate {
    EntityId predicate;
    DuplicateGroup group;

    friend bool operator==(const Task1Candidate&, const Task1Candidate&) = default;
};

struct PaperStatementCount {
    EntityId paper;
    std::size_t statements = 0;

    friend bool operator==(const PaperStatementCount&, const PaperStatementCount&) = default;
};

struct EmptyCellReport {
    EntityId comparison_id;
    std::vector<EntityId> contributions;  // ascending
    std::vector<EntityId> properties;     // ascending
    std::vector<std::pair<EntityId, EntityId>> empty_cells;  // (contribution, property), ascending
    std::size_t empty_count = 0;
    std::size_t total_cells = 0;

    friend bool operator==(const EmptyCellReport&, const EmptyCellReport&) = default;
};

struct TemplateEntry {
    EntityId id;
    std::optional<std::string> label;
    std::optional<Timestamp> created_at;

    friend bool operator==(const TemplateEntry&, const TemplateEntry&) = default;
};

struct TemplateOverview {
    std::vector<TemplateEntry> templates;  // ascending id
    std::vector<std::pair<std::string, std::size_t>> monthly_counts;  // ("YYYY-MM", count), ascending month

    friend bool operator==(const TemplateOverview&, const TemplateOverview&) = default;
};

struct MetricsSummary {
    std::size_t predicates_without_description = 0;
    std::size_t classes_without_description = 0;
    std::size_t duplicate_predicate_groups = 0;
    std::size_t unused_resources = 0;
    std::size_t unlabeled_resources = 0;
    std::size_t papers_total = 0;
    std::size_t templates_total = 0;
    Timestamp built_at{};

    friend bool operator==(const MetricsSummary&, const MetricsSummary&) = default;
};

/// Duplicate-detection key: ASCII lowercase, ASCII punctuation removed,
/// whitespace runs collapsed to one space, ends trimmed.
std::string normalize_label(std::string_view raw);

std::vector<EntityId> predicates_without_description(const Snapshot& snapshot);
std::vector<EntityId> classes_without_description(const Snapshot& snapshot);

/// Sorted by (size, normalized_label). Unlabeled predicates are never grouped.
std::vector<DuplicateGroup> duplicate_predicate_groups(const Snapshot& snapshot);

/// The undescribed predicate in the smallest duplicate group that has one.
std::optional<Task1Candidate> task1_candidate(const Snapshot& snapshot);

std::vector<EntityId> unused_resources(const Snapshot& snapshot);
std::vector<EntityId> unlabeled_resources(const Snapshot& snapshot);

struct PapersInField {
    std::size_t count = 0;
    std::vector<EntityId> papers;

    friend bool operator==(const PapersInField&, const PapersInField&) = default;
};

PapersInField papers_in_field(const Snapshot& snapshot, const CurationConfig& config, const EntityId& field_id);

/// Number of distinct statements reachable from each paper by following
/// subject -> object edges, bounded by config.traversal_depth_limit.
std::map<EntityId, std::size_t> statement_count_per_paper(const Snapshot& snapshot, const CurationConfig& config);

/// Minimum count, ties broken by smallest paper id.
std::optional<PaperStatementCount> paper_with_fewest_statements(const Snapshot& snapshot,
                                                                const CurationConfig& config);

/// Throws Error(not_a_comparison) unless `comparison_id` is a resource classed
/// config.comparison_class.
EmptyCellReport comparison_empty_cells(const Snapshot& snapshot, const CurationConfig& config,
                                       const EntityId& comparison_id);

TemplateOverview template_overview(const Snapshot& snapshot, const CurationConfig& config);

MetricsSummary metrics_summary(const Snapshot& snapshot, const CurationConfig& config);

}  // namespace kgdash
