#include "kgdash/report.hpp"

#include <algorithm>
#include <sstream>

#include "kgdash/json_io.hpp"
#include "kgdash/metrics.hpp"

namespace kgdash {

using nlohmann::json;

namespace {

json truncated(json items, std::size_t limit) {
    json out{{"total", items.size()}, {"items", json::array()}};
    for (std::size_t i = 0; i < items.size() && i < limit; ++i) out["items"].push_back(std::move(items[i]));
    return out;
}

std::string cell(const json& v) {
    if (v.is_null()) return "";
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    std::string out;
    for (char c : s) {
        if (c == '|') {
            out += "\\|";
        } else if (c == '\n' || c == '\r') {
            out += ' ';
        } else {
            out += c;
        }
    }
    return out;
}

void entity_table(std::ostringstream& md, const std::string& title, const json& section) {
    md << "## " << title << " (" << section["total"].get<std::size_t>() << ")\n\n";
    if (section["items"].empty()) {
        md << "_none_\n\n";
        return;
    }
    md << "| id | label | link |\n|---|---|---|\n";
    for (const auto& item : section["items"]) {
        md << "| " << cell(item["id"]) << " | " << cell(item["label"]) << " | " << cell(item["url"]) << " |\n";
    }
    if (section["items"].size() < section["total"].get<std::size_t>()) {
        md << "\n_showing " << section["items"].size() << " of " << section["total"].get<std::size_t>() << "_\n";
    }
    md << "\n";
}

}  // namespace

json build_report(const Snapshot& snapshot, const CurationConfig& config, std::size_t list_limit) {
    auto refs = [&](const std::vector<EntityId>& list) {
        json items = json::array();
        for (const auto& id : list) items.push_back(wire::entity_ref(snapshot, config, id));
        return items;
    };

    json groups = json::array();
    for (const auto& g : duplicate_predicate_groups(snapshot)) groups.push_back(wire::to_json(g, config));

    json papers = json::array();
    std::vector<std::pair<EntityId, std::size_t>> counts;
    for (const auto& [paper, count] : statement_count_per_paper(snapshot, config)) counts.emplace_back(paper, count);
    std::stable_sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    for (const auto& [paper, count] : counts) {
        json item = wire::entity_ref(snapshot, config, paper);
        item["statements"] = count;
        papers.push_back(std::move(item));
    }

    json templates = wire::to_json(template_overview(snapshot, config), config);
    json template_section = truncated(templates["templates"], list_limit);
    template_section["monthly_counts"] = templates["monthly_counts"];

    json task1 = nullptr;
    if (auto c = task1_candidate(snapshot)) {
        task1 = wire::entity_ref(snapshot, config, c->predicate);
        task1["group"] = wire::to_json(c->group, config);
    }
    json fewest = nullptr;
    if (auto f = paper_with_fewest_statements(snapshot, config)) {
        fewest = wire::entity_ref(snapshot, config, f->paper);
        fewest["statements"] = f->statements;
    }

    return json{
        {"built_at", format_timestamp(snapshot.built_at())},
        {"summary", wire::to_json(metrics_summary(snapshot, config))},
        {"kpis",
         {{"predicates_without_description", truncated(refs(predicates_without_description(snapshot)), list_limit)},
          {"classes_without_description", truncated(refs(classes_without_description(snapshot)), list_limit)},
          {"duplicate_predicate_groups", truncated(std::move(groups), list_limit)},
          {"unused_resources", truncated(refs(unused_resources(snapshot)), list_limit)},
          {"unlabeled_resources", truncated(refs(unlabeled_resources(snapshot)), list_limit)},
          {"papers_by_statement_count", truncated(std::move(papers), list_limit)},
          {"templates", std::move(template_section)}}},
        {"task1_candidate", std::move(task1)},
        {"paper_with_fewest_statements", std::move(fewest)},
    };
}

std::string render_markdown(const json& report) {
    std::ostringstream md;
    md << "# Knowledge graph quality report\n\n";
    md << "Snapshot built at " << report["built_at"].get<std::string>() << ".\n\n";

    const auto& s = report["summary"];
    md << "| KPI | count |\n|---|---|\n";
    for (const char* key : {"predicates_without_description", "classes_without_description",
                            "duplicate_predicate_groups", "unused_resources", "unlabeled_resources", "papers_total",
                            "templates_total"}) {
        md << "| " << key << " | " << s[key].get<std::size_t>() << " |\n";
    }
    md << "\n";

    const auto& k = report["kpis"];
    entity_table(md, "Predicates without a description", k["predicates_without_description"]);
    entity_table(md, "Classes without a description", k["classes_without_description"]);

    const auto& dups = k["duplicate_predicate_groups"];
    md << "## Duplicate predicates (" << dups["total"].get<std::size_t>() << " groups)\n\n";
    if (dups["items"].empty()) {
        md << "_none_\n\n";
    } else {
        md << "| normalized label | size | members | undescribed |\n|---|---|---|---|\n";
        for (const auto& g : dups["items"]) {
            auto join = [](const json& arr) {
                std::string out;
                for (const auto& v : arr) out += (out.empty() ? "" : ", ") + v.get<std::string>();
                return out;
            };
            md << "| " << cell(g["normalized_label"]) << " | " << g["size"].get<std::size_t>() << " | "
               << join(g["members"]) << " | " << join(g["members_without_description"]) << " |\n";
        }
        md << "\n";
    }
    if (!report["task1_candidate"].is_null()) {
        const auto& t = report["task1_candidate"];
        md << "Undescribed predicate in the smallest duplicate group: **" << cell(t["id"]) << "** (" << cell(t["url"])
           << ")\n\n";
    }

    entity_table(md, "Unused resources", k["unused_resources"]);
    entity_table(md, "Unlabeled resources", k["unlabeled_resources"]);

    const auto& papers = k["papers_by_statement_count"];
    md << "## Statements per paper (" << papers["total"].get<std::size_t>() << " papers)\n\n";
    if (papers["items"].empty()) {
        md << "_none_\n\n";
    } else {
        md << "| paper | label | statements |\n|---|---|---|\n";
        for (const auto& p : papers["items"]) {
            md << "| " << cell(p["id"]) << " | " << cell(p["label"]) << " | " << p["statements"].get<std::size_t>()
               << " |\n";
        }
        md << "\n";
    }

    const auto& templates = k["templates"];
    md << "## Templates (" << templates["total"].get<std::size_t>() << ")\n\n";
    if (templates["monthly_counts"].empty()) {
        md << "_no dated templates_\n\n";
    } else {
        md << "| month | created |\n|---|---|\n";
        for (const auto& m : templates["monthly_counts"]) {
            md << "| " << cell(m["month"]) << " | " << m["count"].get<std::size_t>() << " |\n";
        }
        md << "\n";
    }
    return md.str();
}

}  // namespace kgdash
