#include <cctype>
#include <istream>
#include <unordered_map>

#include "kgdash/error.hpp"
#include "kgdash/ingest.hpp"

namespace kgdash {

namespace {

constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
constexpr std::string_view kDcterms = "http://purl.org/dc/terms/";

// Accepts both the full IRI and the prefixed form some dumps put in brackets.
bool is_term(std::string_view iri, std::string_view ns, std::string_view prefix, std::string_view local) {
    if (iri.size() == ns.size() + local.size() && iri.starts_with(ns) && iri.ends_with(local)) return true;
    return iri.size() == prefix.size() + 1 + local.size() && iri.starts_with(prefix) && iri[prefix.size()] == ':' &&
           iri.ends_with(local);
}

enum class Special { none, label, description, comment, type };

Special classify_predicate(std::string_view iri) {
    if (is_term(iri, kRdfs, "rdfs", "label")) return Special::label;
    if (is_term(iri, kDcterms, "dcterms", "description") || is_term(iri, kDcterms, "dct", "description")) {
        return Special::description;
    }
    if (is_term(iri, kRdfs, "rdfs", "comment")) return Special::comment;
    if (is_term(iri, kRdf, "rdf", "type")) return Special::type;
    return Special::none;
}

bool is_class_metatype(std::string_view iri) {
    return is_term(iri, kRdfs, "rdfs", "Class") || is_term(iri, kOwl, "owl", "Class");
}

bool is_property_metatype(std::string_view iri) {
    return is_term(iri, kRdf, "rdf", "Property") || is_term(iri, kOwl, "owl", "ObjectProperty") ||
           is_term(iri, kOwl, "owl", "DatatypeProperty") || is_term(iri, kOwl, "owl", "AnnotationProperty");
}

struct Term {
    enum class Type { iri, blank, literal } type = Type::iri;
    std::string value;  // IRI text, blank node label, or unescaped literal
};

class LineParser {
public:
    LineParser(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    [[noreturn]] void fail(const std::string& reason) const {
        throw Error(Errc::malformed_line, "line " + std::to_string(line_no_) + ": " + reason,
                    std::to_string(line_no_));
    }

    void skip_ws() {
        while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
    }

    bool at_end() const { return pos_ >= line_.size(); }
    char peek() const { return at_end() ? '\0' : line_[pos_]; }

    Term term(bool allow_blank, bool allow_literal) {
        skip_ws();
        char c = peek();
        if (c == '<') return Term{Term::Type::iri, iri()};
        if (c == '_' && allow_blank) return Term{Term::Type::blank, blank()};
        if (c == '"' && allow_literal) return Term{Term::Type::literal, literal()};
        if (at_end()) fail("unexpected end of line");
        fail(std::string("unexpected character '") + c + "'");
    }

    void finish() {
        skip_ws();
        if (peek() != '.') fail("expected '.' after object");
        ++pos_;
        skip_ws();
        if (!at_end() && peek() != '#') fail("trailing content after '.'");
    }

private:
    std::string iri() {
        ++pos_;  // '<'
        std::string out;
        while (true) {
            if (at_end()) fail("unterminated IRI");
            char c = line_[pos_++];
            if (c == '>') break;
            if (c == ' ' || c == '\t' || c == '"' || c == '<') fail("invalid character in IRI");
            if (c == '\\') {
                out += escape(true);
                continue;
            }
            out += c;
        }
        if (out.empty()) fail("empty IRI");
        return out;
    }

    std::string blank() {
        if (line_.substr(pos_, 2) != "_:") fail("malformed blank node");
        std::size_t start = pos_;
        pos_ += 2;
        while (!at_end() && line_[pos_] != ' ' && line_[pos_] != '\t' && line_[pos_] != '.') ++pos_;
        // A trailing '.' belongs to the statement terminator, not the label.
        if (pos_ == start + 2) fail("empty blank node label");
        return std::string(line_.substr(start, pos_ - start));
    }

    std::string literal() {
        ++pos_;  // '"'
        std::string out;
        while (true) {
            if (at_end()) fail("unterminated literal");
            char c = line_[pos_++];
            if (c == '"') break;
            if (c == '\\') {
                out += escape(false);
                continue;
            }
            out += c;
        }
        if (peek() == '@') {
            ++pos_;
            std::size_t start = pos_;
            while (!at_end() && (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '-')) ++pos_;
            if (pos_ == start) fail("empty language tag");
        } else if (line_.substr(pos_, 2) == "^^") {
            pos_ += 2;
            if (peek() != '<') fail("datatype must be an IRI");
            iri();
        }
        return out;
    }

    std::string escape(bool in_iri) {
        if (at_end()) fail("dangling escape");
        char c = line_[pos_++];
        if (c == 'u' || c == 'U') return unicode(c == 'u' ? 4 : 8);
        if (in_iri) fail("only \\u and \\U escapes are allowed in IRIs");
        switch (c) {
            case 't': return "\t";
            case 'b': return "\b";
            case 'n': return "\n";
            case 'r': return "\r";
            case 'f': return "\f";
            case '"': return "\"";
            case '\'': return "'";
            case '\\': return "\\";
            default: fail(std::string("unknown escape \\") + c);
        }
    }

    std::string unicode(int digits) {
        if (pos_ + static_cast<std::size_t>(digits) > line_.size()) fail("truncated unicode escape");
        unsigned long cp = 0;
        for (int i = 0; i < digits; ++i) {
            char h = line_[pos_++];
            int v = (h >= '0' && h <= '9') ? h - '0'
                    : (h >= 'a' && h <= 'f') ? h - 'a' + 10
                    : (h >= 'A' && h <= 'F') ? h - 'A' + 10
                                             : -1;
            if (v < 0) fail("invalid hex digit in unicode escape");
            cp = cp * 16 + static_cast<unsigned long>(v);
        }
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("invalid code point");
        std::string out;
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
        return out;
    }

    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

struct Node {
    explicit Node(std::size_t index) : entity(index) {}

    std::size_t entity;  // index into ParsedGraph::entities
    bool as_predicate = false;
    bool as_class = false;
    bool typed_class = false;
    bool typed_property = false;
    std::optional<std::string> comment;  // rdfs:comment, used when no dcterms:description
};

class GraphBuilder {
public:
    /// Registers a node term. Distinct terms that shorten to the same id are
    /// an id collision.
    Node& node(const Term& term, std::size_t line_no) {
        std::string id = term.type == Term::Type::blank ? term.value : shorten(term.value, line_no);
        std::string source = term.type == Term::Type::blank ? term.value : "<" + term.value + ">";
        auto it = nodes_.find(id);
        if (it != nodes_.end()) {
            if (sources_[id] != source) collision(id, line_no);
            return it->second;
        }
        sources_.emplace(id, std::move(source));
        graph_.entities.push_back(Entity{EntityId(id), EntityKind::resource, {}, {}, {}, {}});
        return nodes_.emplace(id, Node(graph_.entities.size() - 1)).first->second;
    }

    EntityId literal(std::string value, std::size_t line_no) {
        std::string id = "lit:" + std::to_string(++literal_count_);
        if (!sources_.emplace(id, "\"literal\"").second) collision(id, line_no);
        nodes_.emplace(id, Node(graph_.entities.size()));
        graph_.entities.push_back(Entity{EntityId(id), EntityKind::literal, std::move(value), {}, {}, {}});
        return graph_.entities.back().id;
    }

    Entity& entity(const Node& n) { return graph_.entities[n.entity]; }

    void statement(const EntityId& subject, const EntityId& predicate, const EntityId& object) {
        graph_.statements.push_back(
            Statement{EntityId("S" + std::to_string(graph_.statements.size() + 1)), subject, predicate, object, {}});
    }

    ParsedGraph finish() {
        for (auto& [id, n] : nodes_) {
            Entity& e = graph_.entities[n.entity];
            if (e.kind == EntityKind::literal) continue;
            bool is_class = n.as_class || n.typed_class;
            bool is_predicate = n.as_predicate || n.typed_property;
            if (is_class && is_predicate) {
                throw Error(Errc::kind_mismatch, id + " is used both as a class and as a predicate", id);
            }
            if (is_class) e.kind = EntityKind::klass;
            if (is_predicate) e.kind = EntityKind::predicate;
            // Memberships are only modelled for resources.
            if (e.kind != EntityKind::resource) e.classes.clear();
            if (!e.description && n.comment) e.description = std::move(n.comment);
        }
        return std::move(graph_);
    }

private:
    static std::string shorten(const std::string& iri, std::size_t line_no) {
        auto cut = iri.find_last_of("/#");
        std::string id = cut == std::string::npos ? iri : iri.substr(cut + 1);
        if (!EntityId::is_valid(id)) {
            throw Error(Errc::malformed_line,
                        "line " + std::to_string(line_no) + ": cannot derive an id from <" + iri + ">",
                        std::to_string(line_no));
        }
        return id;
    }

    [[noreturn]] void collision(const std::string& id, std::size_t line_no) const {
        throw Error(Errc::id_collision,
                    "line " + std::to_string(line_no) + ": id " + id + " already derived from " + sources_.at(id),
                    std::to_string(line_no));
    }

    ParsedGraph graph_;
    std::unordered_map<std::string, Node> nodes_;
    std::unordered_map<std::string, std::string> sources_;
    std::size_t literal_count_ = 0;
};

}  // namespace

ParsedGraph parse_ntriples(std::istream& in) {
    GraphBuilder builder;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        LineParser p(line, line_no);
        p.skip_ws();
        if (p.at_end() || p.peek() == '#') continue;

        Term subject = p.term(true, false);
        Term predicate = p.term(false, false);
        Special special = classify_predicate(predicate.value);
        Term object = p.term(true, true);
        p.finish();

        switch (special) {
            case Special::label:
            case Special::description:
            case Special::comment: {
                if (object.type != Term::Type::literal) p.fail("annotation object must be a literal");
                Node& s = builder.node(subject, line_no);
                Entity& e = builder.entity(s);
                if (special == Special::label) {
                    if (!e.label) e.label = std::move(object.value);
                } else if (special == Special::description) {
                    if (!e.description) e.description = std::move(object.value);
                } else if (!s.comment) {
                    s.comment = std::move(object.value);
                }
                break;
            }
            case Special::type: {
                if (object.type == Term::Type::literal) p.fail("rdf:type object must be an IRI");
                Node& s = builder.node(subject, line_no);
                if (object.type == Term::Type::iri && is_class_metatype(object.value)) {
                    s.typed_class = true;
                } else if (object.type == Term::Type::iri && is_property_metatype(object.value)) {
                    s.typed_property = true;
                } else {
                    Node& c = builder.node(object, line_no);
                    c.as_class = true;
                    builder.entity(s).classes.push_back(builder.entity(c).id);
                }
                break;
            }
            case Special::none: {
                EntityId sid = builder.entity(builder.node(subject, line_no)).id;
                Node& pn = builder.node(predicate, line_no);
                pn.as_predicate = true;
                EntityId pid = builder.entity(pn).id;
                EntityId oid = object.type == Term::Type::literal
                                   ? builder.literal(std::move(object.value), line_no)
                                   : builder.entity(builder.node(object, line_no)).id;
                builder.statement(sid, pid, oid);
                break;
            }
        }
    }
    return builder.finish();
}

}  // namespace kgdash
