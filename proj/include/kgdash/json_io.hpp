#pragma once

#include <json.hpp>

#include "kgdash/clickstream.hpp"
#include "kgdash/comments.hpp"
#include "kgdash/metrics.hpp"
#include "kgdash/model.hpp"

// Wire encodings shared by the HTTP API and the CLI report.
namespace kgdash::wire {

using nlohmann::json;

json ids(const std::vector<EntityId>& list);

/// {"id", "label", "url"}; label is null when absent.
json entity_ref(const Snapshot& snapshot, const CurationConfig& config, const EntityId& id);

json to_json(const MetricsSummary& summary);
json to_json(const DuplicateGroup& group, const CurationConfig& config);
json to_json(const EmptyCellReport& report);
json to_json(const TemplateOverview& overview, const CurationConfig& config);
json to_json(const TransitionGraph& graph);
json to_json(const Transition& edge);
json to_json(const NextStep& step);
json to_json(const PathResult& path);
json to_json(const Comment& comment, const CurationConfig& config);

}  // namespace kgdash::wire
