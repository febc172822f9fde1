#include "kgdash/model.hpp"

#include <algorithm>
#include <cctype>

#include "kgdash/error.hpp"

namespace kgdash {

namespace {

const Snapshot::StatementList kNoStatements;

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

EntityId::EntityId(std::string value) : value_(std::move(value)) {
    if (!is_valid(value_)) {
        throw Error(Errc::invalid_id, "invalid entity id '" + value_ + "'", value_);
    }
}

bool EntityId::is_valid(std::string_view value) noexcept {
    return !value.empty() && std::none_of(value.begin(), value.end(), is_space);
}

std::string_view kind_name(EntityKind kind) noexcept {
    switch (kind) {
        case EntityKind::resource: return "resource";
        case EntityKind::predicate: return "predicate";
        case EntityKind::klass: return "class";
        case EntityKind::literal: return "literal";
    }
    return "resource";
}

std::optional<EntityKind> parse_kind(std::string_view name) noexcept {
    if (name == "resource") return EntityKind::resource;
    if (name == "predicate") return EntityKind::predicate;
    if (name == "class") return EntityKind::klass;
    if (name == "literal") return EntityKind::literal;
    return std::nullopt;
}

std::string_view trim(std::string_view text) noexcept {
    while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
    while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
    return text;
}

bool is_blank(const std::optional<std::string>& text) noexcept {
    return !text || trim(*text).empty();
}

const Entity* Snapshot::find(const EntityId& id) const {
    auto it = entity_pos_.find(id);
    return it == entity_pos_.end() ? nullptr : &entities_[it->second];
}

std::span<const Statement* const> Snapshot::outgoing(const EntityId& id) const {
    auto it = by_subject_.find(id);
    return it == by_subject_.end() ? std::span<const Statement* const>(kNoStatements) : it->second;
}

std::span<const Statement* const> Snapshot::incoming(const EntityId& id) const {
    auto it = by_object_.find(id);
    return it == by_object_.end() ? std::span<const Statement* const>(kNoStatements) : it->second;
}

std::span<const EntityId> Snapshot::members_of(const EntityId& class_id) const {
    auto it = by_class_.find(class_id);
    if (it == by_class_.end()) return {};
    return it->second;
}

Snapshot build_snapshot(std::vector<Entity> entities, std::vector<Statement> statements, Timestamp built_at) {
    Snapshot snap;
    snap.built_at_ = built_at;

    std::sort(entities.begin(), entities.end(), [](const Entity& a, const Entity& b) { return a.id < b.id; });
    std::sort(statements.begin(), statements.end(),
              [](const Statement& a, const Statement& b) { return a.id < b.id; });

    for (std::size_t i = 1; i < entities.size(); ++i) {
        if (entities[i].id == entities[i - 1].id) {
            throw Error(Errc::duplicate_id, "duplicate entity id " + entities[i].id.str(), entities[i].id.str());
        }
    }
    for (std::size_t i = 1; i < statements.size(); ++i) {
        if (statements[i].id == statements[i - 1].id) {
            throw Error(Errc::duplicate_id, "duplicate statement id " + statements[i].id.str(),
                        statements[i].id.str());
        }
    }

    snap.entity_pos_.reserve(entities.size());
    for (std::size_t i = 0; i < entities.size(); ++i) snap.entity_pos_.emplace(entities[i].id, i);

    auto kind_of = [&](const EntityId& id) -> std::optional<EntityKind> {
        auto it = snap.entity_pos_.find(id);
        if (it == snap.entity_pos_.end()) return std::nullopt;
        return entities[it->second].kind;
    };

    for (auto& e : entities) {
        std::sort(e.classes.begin(), e.classes.end());
        e.classes.erase(std::unique(e.classes.begin(), e.classes.end()), e.classes.end());
        if (!e.classes.empty() && e.kind != EntityKind::resource) {
            throw Error(Errc::kind_mismatch, "only resources carry class memberships: " + e.id.str(), e.id.str());
        }
        for (const auto& c : e.classes) {
            auto k = kind_of(c);
            if (!k) {
                throw Error(Errc::dangling_reference, "entity " + e.id.str() + " is classed by unknown " + c.str(),
                            e.id.str());
            }
            if (*k != EntityKind::klass) {
                throw Error(Errc::kind_mismatch, "entity " + e.id.str() + " is classed by non-class " + c.str(),
                            e.id.str());
            }
            snap.by_class_[c].push_back(e.id);
        }
    }

    for (const auto& s : statements) {
        for (const EntityId* ref : {&s.subject, &s.predicate, &s.object}) {
            if (!kind_of(*ref)) {
                throw Error(Errc::dangling_reference,
                            "statement " + s.id.str() + " references unknown id " + ref->str(), s.id.str());
            }
        }
        if (*kind_of(s.subject) != EntityKind::resource) {
            throw Error(Errc::kind_mismatch, "statement " + s.id.str() + " subject is not a resource", s.id.str());
        }
        if (*kind_of(s.predicate) != EntityKind::predicate) {
            throw Error(Errc::kind_mismatch, "statement " + s.id.str() + " predicate is not a predicate",
                        s.id.str());
        }
    }

    snap.entities_ = std::move(entities);
    snap.statements_ = std::move(statements);
    for (const auto& s : snap.statements_) {
        snap.by_subject_[s.subject].push_back(&s);
        snap.by_object_[s.object].push_back(&s);
    }
    // by_class_ members were pushed in ascending entity order already.
    return snap;
}

std::vector<EntityId> entities_of_class(const Snapshot& snapshot, const EntityId& class_id) {
    auto members = snapshot.members_of(class_id);
    return {members.begin(), members.end()};
}

void CurationConfig::validate() const {
    const std::string_view placeholder = "{id}";
    auto first = entity_url_template.find(placeholder);
    if (first == std::string::npos ||
        entity_url_template.find(placeholder, first + placeholder.size()) != std::string::npos) {
        throw Error(Errc::config_error, "entity_url_template must contain {id} exactly once",
                    entity_url_template);
    }
    if (traversal_depth_limit && *traversal_depth_limit <= 0) {
        throw Error(Errc::config_error, "traversal_depth_limit must be positive");
    }
}

std::string CurationConfig::entity_url(const EntityId& id) const {
    std::string url = entity_url_template;
    auto pos = url.find("{id}");
    if (pos != std::string::npos) url.replace(pos, 4, id.str());
    return url;
}

}  // namespace kgdash
