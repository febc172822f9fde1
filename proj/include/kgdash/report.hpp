#pragma once

#include <cstddef>
#include <string>

#include <json.hpp>

#include "kgdash/model.hpp"

namespace kgdash {

inline constexpr std::size_t kReportListLimit = 100;

/// Full KPI report: the summary plus every listing, each truncated to
/// `list_limit` items and carrying its untruncated total. Layout is described
/// by docs/report.schema.json.
nlohmann::json build_report(const Snapshot& snapshot, const CurationConfig& config,
                            std::size_t list_limit = kReportListLimit);

std::string render_markdown(const nlohmann::json& report);

}  // namespace kgdash
