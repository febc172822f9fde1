#include <istream>
#include <ostream>

#include <new>

#include <sys/mman.h>

#include <json.hpp>

#include "kgdash/error.hpp"
#include "kgdash/ingest.hpp"

namespace kgdash {

namespace {

using nlohmann::json;

[[noreturn]] void violation(const std::string& pointer, const std::string& reason) {
    throw Error(Errc::schema_violation, (pointer.empty() ? std::string("/") : pointer) + ": " + reason, pointer);
}

std::string required_string(const json& obj, const std::string& base, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) violation(base + "/" + key, "missing");
    if (!it->is_string()) violation(base + "/" + key, "must be a string");
    return it->get<std::string>();
}

EntityId required_id(const json& obj, const std::string& base, const char* key) {
    auto value = required_string(obj, base, key);
    if (!EntityId::is_valid(value)) violation(base + "/" + key, "must be a non-empty id without whitespace");
    return EntityId(std::move(value));
}

std::optional<std::string> optional_string(const json& obj, const std::string& base, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) violation(base + "/" + key, "must be a string");
    return it->get<std::string>();
}

std::optional<Timestamp> optional_timestamp(const json& obj, const std::string& base, const char* key) {
    auto text = optional_string(obj, base, key);
    if (!text) return std::nullopt;
    auto ts = parse_timestamp(*text);
    if (!ts) violation(base + "/" + key, "not an ISO-8601 timestamp");
    return ts;
}

Entity entity_from_json(const json& obj, const std::string& base) {
    if (!obj.is_object()) violation(base, "must be an object");
    Entity e;
    e.id = required_id(obj, base, "id");
    auto kind = parse_kind(required_string(obj, base, "kind"));
    if (!kind) violation(base + "/kind", "must be one of resource, predicate, class, literal");
    e.kind = *kind;
    e.label = optional_string(obj, base, "label");
    e.description = optional_string(obj, base, "description");
    if (auto it = obj.find("classes"); it != obj.end() && !it->is_null()) {
        if (!it->is_array()) violation(base + "/classes", "must be an array");
        for (std::size_t j = 0; j < it->size(); ++j) {
            const auto& c = (*it)[j];
            std::string ptr = base + "/classes/" + std::to_string(j);
            if (!c.is_string() || !EntityId::is_valid(c.get_ref<const std::string&>())) {
                violation(ptr, "must be an id string");
            }
            e.classes.emplace_back(c.get<std::string>());
        }
    }
    e.created_at = optional_timestamp(obj, base, "created_at");
    if (e.kind == EntityKind::literal) {
        if (!e.label) violation(base + "/label", "literal entities carry their value as label");
        if (!e.classes.empty()) violation(base + "/classes", "literal entities have no classes");
    }
    return e;
}

Statement statement_from_json(const json& obj, const std::string& base) {
    if (!obj.is_object()) violation(base, "must be an object");
    Statement s;
    s.id = required_id(obj, base, "id");
    s.subject = required_id(obj, base, "subject");
    s.predicate = required_id(obj, base, "predicate");
    s.object = required_id(obj, base, "object");
    s.created_at = optional_timestamp(obj, base, "created_at");
    return s;
}

// SAX consumer that materialises one array element at a time, so memory
// tracks the parsed graph rather than the document.
// Page-mapped storage: released to the OS on deallocation instead of staying
// in the malloc arena.
template <typename T>
struct MappedAllocator {
    using value_type = T;
    MappedAllocator() = default;
    template <typename U>
    MappedAllocator(const MappedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        void* p = ::mmap(nullptr, n * sizeof(T), PROT_READ | PROT_WRITE, MAP_PRIVATE | MAP_ANONYMOUS, -1, 0);
        if (p == MAP_FAILED) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t n) noexcept { ::munmap(p, n * sizeof(T)); }

    friend bool operator==(const MappedAllocator&, const MappedAllocator&) { return true; }
};

// Records of unknown count. Growing one vector would briefly hold the old and
// the new buffer; fixed chunks drained into an exactly sized vector keep the
// peak near one copy of the data.
template <typename T>
class ChunkBuffer {
public:
    void push(T value) {
        if (chunks_.empty() || chunks_.back().size() == kChunk) {
            chunks_.emplace_back().reserve(kChunk);
        }
        chunks_.back().push_back(std::move(value));
        ++size_;
    }

    void drain_into(std::vector<T>& out) {
        out.reserve(out.size() + size_);
        for (auto& chunk : chunks_) {
            for (auto& v : chunk) out.push_back(std::move(v));
            std::vector<T, MappedAllocator<T>>().swap(chunk);
        }
        chunks_.clear();
        size_ = 0;
    }

private:
    static constexpr std::size_t kChunk = 1 << 14;
    std::vector<std::vector<T, MappedAllocator<T>>> chunks_;
    std::size_t size_ = 0;
};

class DumpReader {
public:
    explicit DumpReader(ParsedGraph& out) : out_(out) {}

    bool null() { return scalar(nullptr); }
    bool boolean(bool v) { return scalar(v); }
    bool number_integer(json::number_integer_t v) { return scalar(v); }
    bool number_unsigned(json::number_unsigned_t v) { return scalar(v); }
    bool number_float(json::number_float_t v, const std::string&) { return scalar(v); }
    bool string(std::string& v) { return scalar(std::move(v)); }
    bool binary(json::binary_t&) { return scalar(nullptr); }

    bool start_object(std::size_t) { return open(json::object()); }
    bool start_array(std::size_t) { return open(json::array()); }
    bool end_object() { return close(); }
    bool end_array() { return close(); }

    bool key(std::string& k) {
        if (skip_ > 0) return true;
        if (depth_ == 1) {
            top_key_ = k;
        } else {
            pending_key_ = std::move(k);
        }
        return true;
    }

    bool parse_error(std::size_t position, const std::string&, const nlohmann::detail::exception& ex) {
        violation(current_pointer(), "invalid JSON at byte " + std::to_string(position) + " (" + ex.what() + ")");
    }

    void check_complete() const {
        if (!seen_entities_) violation("/entities", "missing");
        if (!seen_statements_) violation("/statements", "missing");
    }

    void finish() {
        entities_.drain_into(out_.entities);
        statements_.drain_into(out_.statements);
    }

private:
    enum class Section { none, entities, statements };

    std::string current_pointer() const {
        if (section_ == Section::none) return top_key_.empty() ? std::string() : "/" + top_key_;
        return "/" + top_key_ + "/" + std::to_string(index_);
    }

    template <typename T>
    bool scalar(T&& v) {
        if (skip_ > 0) return true;
        if (depth_ == 0) violation("", "document must be an object");
        if (depth_ == 1) {
            if (top_key_ == "entities" || top_key_ == "statements") violation("/" + top_key_, "must be an array");
            return true;  // unknown top-level field
        }
        if (stack_.empty()) {
            item_ = json(std::forward<T>(v));
            emit();
            return true;
        }
        insert(json(std::forward<T>(v)));
        return true;
    }

    bool open(json container) {
        if (skip_ > 0) {
            ++skip_;
            return true;
        }
        if (depth_ == 0) {
            if (!container.is_object()) violation("", "document must be an object");
            depth_ = 1;
            return true;
        }
        if (depth_ == 1) {
            if (top_key_ == "entities" || top_key_ == "statements") {
                if (!container.is_array()) violation("/" + top_key_, "must be an array");
                section_ = top_key_ == "entities" ? Section::entities : Section::statements;
                (section_ == Section::entities ? seen_entities_ : seen_statements_) = true;
                index_ = 0;
                depth_ = 2;
            } else {
                skip_ = 1;
            }
            return true;
        }
        if (stack_.empty()) {
            item_ = std::move(container);
            stack_.push_back(&item_);
        } else {
            stack_.push_back(insert(std::move(container)));
        }
        return true;
    }

    bool close() {
        if (skip_ > 0) {
            --skip_;
            return true;
        }
        if (!stack_.empty()) {
            stack_.pop_back();
            if (stack_.empty()) emit();
            return true;
        }
        // closing a section array or the document
        if (depth_ == 2) {
            section_ = Section::none;
            depth_ = 1;
        } else {
            depth_ = 0;
        }
        return true;
    }

    json* insert(json value) {
        json& parent = *stack_.back();
        if (parent.is_array()) {
            parent.push_back(std::move(value));
            return &parent.back();
        }
        json& slot = parent[pending_key_];
        slot = std::move(value);
        return &slot;
    }

    void emit() {
        std::string base = current_pointer();
        if (section_ == Section::entities) {
            entities_.push(entity_from_json(item_, base));
        } else {
            statements_.push(statement_from_json(item_, base));
        }
        ++index_;
        item_ = nullptr;
    }

    ParsedGraph& out_;
    ChunkBuffer<Entity> entities_;
    ChunkBuffer<Statement> statements_;
    int depth_ = 0;  // 0 outside, 1 in document, 2 in a section array
    int skip_ = 0;
    Section section_ = Section::none;
    std::string top_key_;
    std::string pending_key_;
    std::size_t index_ = 0;
    json item_;
    std::vector<json*> stack_;
    bool seen_entities_ = false;
    bool seen_statements_ = false;
};

json to_json(const Entity& e) {
    json j;
    j["id"] = e.id.str();
    j["kind"] = kind_name(e.kind);
    if (e.label) j["label"] = *e.label;
    if (e.description) j["description"] = *e.description;
    if (!e.classes.empty()) {
        auto& classes = j["classes"] = json::array();
        for (const auto& c : e.classes) classes.push_back(c.str());
    }
    if (e.created_at) j["created_at"] = format_timestamp(*e.created_at);
    return j;
}

json to_json(const Statement& s) {
    json j;
    j["id"] = s.id.str();
    j["subject"] = s.subject.str();
    j["predicate"] = s.predicate.str();
    j["object"] = s.object.str();
    if (s.created_at) j["created_at"] = format_timestamp(*s.created_at);
    return j;
}

template <typename Entities, typename Statements>
void write_dump(std::ostream& out, const Entities& entities, const Statements& statements) {
    auto dump = [](const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); };
    out << "{\"entities\":[";
    bool first = true;
    for (const auto& e : entities) {
        out << (first ? "\n" : ",\n") << dump(to_json(e));
        first = false;
    }
    out << "\n],\"statements\":[";
    first = true;
    for (const auto& s : statements) {
        out << (first ? "\n" : ",\n") << dump(to_json(s));
        first = false;
    }
    out << "\n]}\n";
}

}  // namespace

ParsedGraph parse_json_dump(std::istream& in) {
    ParsedGraph graph;
    DumpReader reader(graph);
    json::sax_parse(in, &reader);
    reader.check_complete();
    reader.finish();
    return graph;
}

void write_json_dump(std::ostream& out, const Snapshot& snapshot) {
    write_dump(out, snapshot.entities(), snapshot.statements());
}

void write_json_dump(std::ostream& out, const ParsedGraph& graph) {
    write_dump(out, graph.entities, graph.statements);
}

}  // namespace kgdash
