#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgdash/time.hpp"

namespace kgdash {

/// Identifier of an entity or statement. Non-empty, no whitespace.
class EntityId {
public:
    EntityId() = default;
    explicit EntityId(std::string value);

    const std::string& str() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    static bool is_valid(std::string_view value) noexcept;

    friend bool operator==(const EntityId&, const EntityId&) = default;
    friend auto operator<=>(const EntityId&, const EntityId&) = default;

private:
    std::string value_;
};

}  // namespace kgdash

template <>
struct std::hash<kgdash::EntityId> {
    std::size_t operator()(const kgdash::EntityId& id) const noexcept { return std::hash<std::string>{}(id.str()); }
};

namespace kgdash {

enum class EntityKind { resource, predicate, klass, literal };

std::string_view kind_name(EntityKind kind) noexcept;
std::optional<EntityKind> parse_kind(std::string_view name) noexcept;

struct Entity {
    EntityId id;
    EntityKind kind = EntityKind::resource;
    std::optional<std::string> label;
    std::optional<std::string> description;
    std::vector<EntityId> classes;  // resources only
    std::optional<Timestamp> created_at;

    friend bool operator==(const Entity&, const Entity&) = default;
};

struct Statement {
    EntityId id;
    EntityId subject;
    EntityId predicate;
    EntityId object;
    std::optional<Timestamp> created_at;

    friend bool operator==(const Statement&, const Statement&) = default;
};

/// Returns true when `text` is absent or only whitespace.
bool is_blank(const std::optional<std::string>& text) noexcept;
std::string_view trim(std::string_view text) noexcept;

/// Immutable, indexed view of a knowledge graph. Entities and statements are
/// held in ascending id order regardless of input order. Not copyable: the
/// indexes point into the owned statement storage.
class Snapshot {
public:
    using StatementList = std::vector<const Statement*>;

    Snapshot(const Snapshot&) = delete;
    Snapshot& operator=(const Snapshot&) = delete;
    Snapshot(Snapshot&&) noexcept = default;
    Snapshot& operator=(Snapshot&&) noexcept = default;

    std::span<const Entity> entities() const noexcept { return entities_; }
    std::span<const Statement> statements() const noexcept { return statements_; }

    const Entity* find(const EntityId& id) const;
    bool contains(const EntityId& id) const { return find(id) != nullptr; }

    /// Statements with `id` as subject / object, in ascending statement id order.
    std::span<const Statement* const> outgoing(const EntityId& id) const;
    std::span<const Statement* const> incoming(const EntityId& id) const;

    const std::unordered_map<EntityId, StatementList>& subject_index() const noexcept { return by_subject_; }
    const std::unordered_map<EntityId, StatementList>& object_index() const noexcept { return by_object_; }

    /// Sorted members of a class; empty if the class is unknown or has none.
    std::span<const EntityId> members_of(const EntityId& class_id) const;

    Timestamp built_at() const noexcept { return built_at_; }

private:
    friend Snapshot build_snapshot(std::vector<Entity>, std::vector<Statement>, Timestamp);
    Snapshot() = default;

    std::vector<Entity> entities_;
    std::vector<Statement> statements_;
    std::unordered_map<EntityId, std::size_t> entity_pos_;
    std::unordered_map<EntityId, StatementList> by_subject_;
    std::unordered_map<EntityId, StatementList> by_object_;
    std::unordered_map<EntityId, std::vector<EntityId>> by_class_;
    Timestamp built_at_{};
};

/// Validates and indexes a graph. Throws Error with duplicate_id,
/// dangling_reference (context: the offending statement or entity id) or
/// kind_mismatch.
Snapshot build_snapshot(std::vector<Entity> entities, std::vector<Statement> statements,
                        Timestamp built_at = utc_now());

/// Ascending ids of resources classed `class_id`.
std::vector<EntityId> entities_of_class(const Snapshot& snapshot, const EntityId& class_id);

/// Schema hooks that adapt the KPIs to a concrete knowledge graph.
struct CurationConfig {
    EntityId paper_class{"Paper"};
    EntityId comparison_class{"Comparison"};
    EntityId contribution_class{"Contribution"};
    EntityId template_class{"NodeShape"};
    EntityId research_field_predicate{"P30"};
    std::string entity_url_template{"https://orkg.org/resource/{id}"};
    std::optional<int> traversal_depth_limit;

    /// Throws Error(config_error) when the url template does not hold `{id}`
    /// exactly once or the depth limit is not positive.
    void validate() const;
    std::string entity_url(const EntityId& id) const;
};

/// Current-snapshot slot. Readers keep the snapshot they loaded alive while a
/// re-ingest publishes a replacement.
template <typename T>
class Published {
public:
    Published() = default;
    explicit Published(std::shared_ptr<const T> value) : value_(std::move(value)) {}

    std::shared_ptr<const T> load() const {
        std::lock_guard lock(mutex_);
        return value_;
    }
    void publish(std::shared_ptr<const T> value) {
        std::lock_guard lock(mutex_);
        value_ = std::move(value);
    }

private:
    mutable std::mutex mutex_;
    std::shared_ptr<const T> value_;
};

using SnapshotHandle = Published<Snapshot>;

}  // namespace kgdash
