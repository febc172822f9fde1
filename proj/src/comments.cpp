#include "kgdash/comments.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>
#include <mutex>

#include <json.hpp>

#include "kgdash/error.hpp"

namespace kgdash {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void io_failure(const std::string& what, const fs::path& path) {
    throw Error(Errc::io_error, what + " " + path.string() + ": " + std::strerror(errno), path.string());
}

[[noreturn]] void corrupt(std::size_t record, const std::string& reason) {
    throw Error(Errc::journal_corrupt, "journal record " + std::to_string(record) + ": " + reason,
                std::to_string(record));
}

std::size_t utf8_length(std::string_view s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

json create_record(const Comment& c) {
    return json{{"op", "create"},
                {"id", c.id},
                {"target", c.target.str()},
                {"type", comment_type_name(c.type)},
                {"text", c.text},
                {"author", c.author},
                {"created_at", format_timestamp(c.created_at)},
                {"status", comment_status_name(c.status)}};
}

void write_all(int fd, const std::string& data, const fs::path& path) {
    const char* p = data.data();
    std::size_t left = data.size();
    while (left > 0) {
        ssize_t n = ::write(fd, p, left);
        if (n < 0) {
            if (errno == EINTR) continue;
            io_failure("cannot append to", path);
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
}

void sync_directory(const fs::path& file) {
    auto dir = file.parent_path().empty() ? fs::path(".") : file.parent_path();
    int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
    if (dfd >= 0) {
        ::fsync(dfd);
        ::close(dfd);
    }
}

}  // namespace

std::string_view comment_type_name(CommentType type) noexcept {
    switch (type) {
        case CommentType::inaccurate: return "inaccurate";
        case CommentType::incomplete: return "incomplete";
        case CommentType::duplicate: return "duplicate";
        case CommentType::question: return "question";
        case CommentType::other: return "other";
    }
    return "other";
}

std::optional<CommentType> parse_comment_type(std::string_view name) noexcept {
    for (auto t : {CommentType::inaccurate, CommentType::incomplete, CommentType::duplicate, CommentType::question,
                   CommentType::other}) {
        if (comment_type_name(t) == name) return t;
    }
    return std::nullopt;
}

std::string_view comment_status_name(CommentStatus status) noexcept {
    return status == CommentStatus::open ? "open" : "resolved";
}

std::optional<CommentStatus> parse_comment_status(std::string_view name) noexcept {
    if (name == "open") return CommentStatus::open;
    if (name == "resolved") return CommentStatus::resolved;
    return std::nullopt;
}

std::vector<Comment> replay_journal(const fs::path& path, std::uint64_t* valid_bytes) {
    std::vector<Comment> comments;
    if (valid_bytes) *valid_bytes = 0;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::error_code ec;
        if (!fs::exists(path, ec)) return comments;
        io_failure("cannot read", path);
    }
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    std::size_t record = 0;
    while (pos < data.size()) {
        auto nl = data.find('\n', pos);
        if (nl == std::string::npos) break;  // unacknowledged tail
        std::string_view line(data.data() + pos, nl - pos);
        pos = nl + 1;
        ++record;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            if (valid_bytes) *valid_bytes = pos;
            continue;
        }

        json r = json::parse(line, nullptr, false);
        if (r.is_discarded() || !r.is_object()) corrupt(record, "not a JSON object");
        auto str = [&](const char* key) -> std::string {
            auto it = r.find(key);
            if (it == r.end() || !it->is_string()) corrupt(record, std::string("missing string field ") + key);
            return it->get<std::string>();
        };
        auto it_id = r.find("id");
        if (it_id == r.end() || !it_id->is_number_unsigned()) corrupt(record, "missing id");
        auto id = it_id->get<std::uint64_t>();
        auto status = parse_comment_status(str("status"));
        if (!status) corrupt(record, "unknown status");

        std::string op = str("op");
        if (op == "create") {
            if (!comments.empty() && id <= comments.back().id) corrupt(record, "ids must increase");
            Comment c;
            c.id = id;
            auto target = str("target");
            if (!EntityId::is_valid(target)) corrupt(record, "invalid target");
            c.target = EntityId(std::move(target));
            auto type = parse_comment_type(str("type"));
            if (!type) corrupt(record, "unknown comment type");
            c.type = *type;
            c.text = str("text");
            c.author = str("author");
            auto created = parse_timestamp(str("created_at"));
            if (!created) corrupt(record, "bad created_at");
            c.created_at = *created;
            c.status = *status;
            comments.push_back(std::move(c));
        } else if (op == "set_status") {
            auto found = std::lower_bound(comments.begin(), comments.end(), id,
                                          [](const Comment& c, std::uint64_t v) { return c.id < v; });
            if (found == comments.end() || found->id != id) corrupt(record, "status update for unknown comment");
            found->status = *status;
        } else {
            corrupt(record, "unknown op '" + op + "'");
        }
        if (valid_bytes) *valid_bytes = pos;
    }
    return comments;
}

CommentStore::CommentStore(fs::path journal) : path_(std::move(journal)) {
    std::uint64_t valid = 0;
    comments_ = replay_journal(path_, &valid);
    next_id_ = comments_.empty() ? 1 : comments_.back().id + 1;

    std::error_code ec;
    if (fs::exists(path_, ec) && fs::file_size(path_, ec) > valid) {
        fs::resize_file(path_, valid, ec);
        if (ec) throw Error(Errc::io_error, "cannot drop partial journal tail: " + ec.message(), path_.string());
    }
    open_for_append();
}

CommentStore::~CommentStore() {
    if (fd_ >= 0) {
        ::fsync(fd_);
        ::close(fd_);
    }
}

void CommentStore::open_for_append() {
    if (!path_.parent_path().empty()) {
        std::error_code ec;
        fs::create_directories(path_.parent_path(), ec);
    }
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) io_failure("cannot open journal", path_);
}

void CommentStore::append(const std::string& record) {
    struct stat st {};
    if (::fstat(fd_, &st) != 0) io_failure("cannot stat", path_);
    try {
        write_all(fd_, record + "\n", path_);
        if (::fsync(fd_) != 0) io_failure("cannot sync", path_);
    } catch (...) {
        // Keep the journal on a record boundary.
        [[maybe_unused]] int rc = ::ftruncate(fd_, st.st_size);
        throw;
    }
}

Comment CommentStore::create(const Snapshot& snapshot, const EntityId& target, CommentType type,
                             std::string_view text, std::string_view author, Timestamp now) {
    if (!snapshot.contains(target)) {
        throw Error(Errc::unknown_target, "unknown target " + target.str(), target.str());
    }
    if (trim(text).empty()) throw Error(Errc::empty_text, "comment text is empty");
    if (utf8_length(text) > kMaxCommentLength) {
        throw Error(Errc::invalid_arg, "comment text exceeds " + std::to_string(kMaxCommentLength) + " characters",
                    "text");
    }
    if (trim(author).empty()) throw Error(Errc::empty_author, "comment author is empty");

    std::unique_lock lock(mutex_);
    Comment c{next_id_, target, type, std::string(text), std::string(author), now, CommentStatus::open};
    append(dump(create_record(c)));
    ++next_id_;
    comments_.push_back(c);
    return c;
}

Comment CommentStore::set_status(std::uint64_t id, CommentStatus status) {
    std::unique_lock lock(mutex_);
    auto it = std::lower_bound(comments_.begin(), comments_.end(), id,
                               [](const Comment& c, std::uint64_t v) { return c.id < v; });
    if (it == comments_.end() || it->id != id) {
        throw Error(Errc::unknown_comment, "unknown comment " + std::to_string(id), std::to_string(id));
    }
    append(dump(json{{"op", "set_status"}, {"id", id}, {"status", comment_status_name(status)}}));
    it->status = status;
    return *it;
}

std::vector<Comment> CommentStore::list(const CommentFilter& filter) const {
    std::shared_lock lock(mutex_);
    std::vector<Comment> out;
    for (const auto& c : comments_) {
        if (filter.target && c.target != *filter.target) continue;
        if (filter.status && c.status != *filter.status) continue;
        if (filter.type && c.type != *filter.type) continue;
        out.push_back(c);
    }
    return out;
}

std::optional<Comment> CommentStore::get(std::uint64_t id) const {
    std::shared_lock lock(mutex_);
    auto it = std::lower_bound(comments_.begin(), comments_.end(), id,
                               [](const Comment& c, std::uint64_t v) { return c.id < v; });
    if (it == comments_.end() || it->id != id) return std::nullopt;
    return *it;
}

std::size_t CommentStore::size() const {
    std::shared_lock lock(mutex_);
    return comments_.size();
}

void CommentStore::compact() {
    std::unique_lock lock(mutex_);
    fs::path tmp = path_;
    tmp += ".compact";
    int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) io_failure("cannot create", tmp);
    try {
        std::string body;
        for (const auto& c : comments_) body += dump(create_record(c)) + "\n";
        write_all(fd, body, tmp);
        if (::fsync(fd) != 0) io_failure("cannot sync", tmp);
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);
    if (::rename(tmp.c_str(), path_.c_str()) != 0) io_failure("cannot replace", path_);
    sync_directory(path_);
    ::close(fd_);
    fd_ = -1;
    open_for_append();
}

}  // namespace kgdash
