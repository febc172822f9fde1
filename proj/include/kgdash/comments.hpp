#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "kgdash/model.hpp"

namespace kgdash {

enum class CommentType { inaccurate, incomplete, duplicate, question, other };
enum class CommentStatus { open, resolved };

std::string_view comment_type_name(CommentType type) noexcept;
std::optional<CommentType> parse_comment_type(std::string_view name) noexcept;
std::string_view comment_status_name(CommentStatus status) noexcept;
std::optional<CommentStatus> parse_comment_status(std::string_view name) noexcept;

inline constexpr std::size_t kMaxCommentLength = 10000;

struct Comment {
    std::uint64_t id = 0;
    EntityId target;
    CommentType type = CommentType::other;
    std::string text;
    std::string author;
    Timestamp created_at{};
    CommentStatus status = CommentStatus::open;

    friend bool operator==(const Comment&, const Comment&) = default;
};

struct CommentFilter {
    std::optional<EntityId> target;
    std::optional<CommentStatus> status;
    std::optional<CommentType> type;
};

/// Replays a journal's complete records. A trailing record without its
/// newline was never acknowledged and is ignored; any other bad record throws
/// Error(journal_corrupt). `valid_bytes`, when given, receives the length of
/// the acknowledged prefix.
std::vector<Comment> replay_journal(const std::filesystem::path& path, std::uint64_t* valid_bytes = nullptr);

/// Curator issue tracker persisted as an append-only JSON-lines journal.
///
/// Every mutation is written and fsynced before it returns. Mutations are
/// serialised through one writer; readers work off the in-memory index.
class CommentStore {
public:
    /// Replays `journal` (created if missing) and drops any unacknowledged
    /// tail so later appends start on a record boundary.
    explicit CommentStore(std::filesystem::path journal);
    ~CommentStore();

    CommentStore(const CommentStore&) = delete;
    CommentStore& operator=(const CommentStore&) = delete;

    /// Throws Error(unknown_target) when `target` is not in `snapshot`, and
    /// Error(empty_text) / Error(empty_author) / Error(invalid_arg) for bad
    /// input. The snapshot is only read.
    Comment create(const Snapshot& snapshot, const EntityId& target, CommentType type, std::string_view text,
                   std::string_view author, Timestamp now);

    /// Throws Error(unknown_comment).
    Comment set_status(std::uint64_t id, CommentStatus status);

    std::vector<Comment> list(const CommentFilter& filter = {}) const;
    std::optional<Comment> get(std::uint64_t id) const;
    std::size_t size() const;

    /// Rewrites the journal as one create record per comment, atomically.
    void compact();

    const std::filesystem::path& journal_path() const noexcept { return path_; }

private:
    void append(const std::string& record);
    void open_for_append();

    std::filesystem::path path_;
    int fd_ = -1;
    mutable std::shared_mutex mutex_;
    std::vector<Comment> comments_;  // ascending id
    std::uint64_t next_id_ = 1;
};

}  // namespace kgdash
