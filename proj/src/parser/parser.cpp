#include "codemie/parser/parser.hpp"

#include "codemie/error.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>

namespace codemie::parser {

namespace {

const char* const kReservedNames[] = {"entity_dic", "chain_dic", "relation_dic", "grounding_dic"};

bool is_reserved(const std::string& name) {
    for (const char* r : kReservedNames) {
        if (name == r) {
            return true;
        }
    }
    return false;
}

struct Node {
    enum class Kind { STR, INT, FLOAT, LIST };
    Kind kind = Kind::STR;
    std::string str;     // STR content; for INT/FLOAT the raw lexeme
    bool quoted = false; // STR only
    std::int64_t ival = 0;
    double fval = 0.0;
    std::vector<Node> items;
};

struct Key {
    bool is_int = false;
    std::int64_t ival = 0;
    std::string sval;
    bool quoted = false;
};

using TokenSpan = std::vector<Token>;

class LineParser {
public:
    explicit LineParser(const TokenSpan& tokens) : tokens_(tokens) {}

    bool at_end() const { return pos_ >= tokens_.size(); }
    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_++]; }

    bool accept(TokenKind kind) {
        if (!at_end() && peek().kind == kind) {
            ++pos_;
            return true;
        }
        return false;
    }

    // STRING, INT, or a bare identifier run joined with single spaces.
    std::optional<Key> parse_key() {
        if (at_end()) {
            return std::nullopt;
        }
        Key key;
        if (peek().kind == TokenKind::STRING) {
            key.sval = next().value;
            key.quoted = true;
            return key;
        }
        if (peek().kind == TokenKind::INT) {
            key.is_int = true;
            key.ival = std::stoll(next().lexeme);
            return key;
        }
        if (peek().kind == TokenKind::IDENT) {
            key.sval = parse_bare_run();
            return key;
        }
        return std::nullopt;
    }

    std::optional<Node> parse_value(int depth = 0) {
        if (at_end() || depth > 16) {
            return std::nullopt;
        }
        const Token& tok = peek();
        switch (tok.kind) {
        case TokenKind::LBRACKET: {
            next();
            Node list;
            list.kind = Node::Kind::LIST;
            if (accept(TokenKind::RBRACKET)) {
                return list;
            }
            while (true) {
                auto item = parse_value(depth + 1);
                if (!item) {
                    return std::nullopt;
                }
                list.items.push_back(std::move(*item));
                if (accept(TokenKind::COMMA)) {
                    continue;
                }
                if (accept(TokenKind::RBRACKET)) {
                    return list;
                }
                return std::nullopt;
            }
        }
        case TokenKind::STRING: {
            Node node;
            node.kind = Node::Kind::STR;
            node.str = tok.value;
            node.quoted = true;
            next();
            return node;
        }
        case TokenKind::INT: {
            Node node;
            node.kind = Node::Kind::INT;
            node.str = tok.lexeme;
            node.ival = std::stoll(tok.lexeme);
            node.fval = static_cast<double>(node.ival);
            next();
            return node;
        }
        case TokenKind::FLOAT: {
            Node node;
            node.kind = Node::Kind::FLOAT;
            node.str = tok.lexeme;
            node.fval = std::stod(tok.lexeme);
            next();
            return node;
        }
        case TokenKind::IDENT: {
            Node node;
            node.kind = Node::Kind::STR;
            node.str = parse_bare_run();
            node.quoted = false;
            return node;
        }
        default:
            return std::nullopt;
        }
    }

private:
    // Maximal run of IDENT/INT/FLOAT tokens, e.g. a bare `Bob Hope`.
    std::string parse_bare_run() {
        std::string out = next().lexeme;
        while (!at_end() && (peek().kind == TokenKind::IDENT || peek().kind == TokenKind::INT ||
                             peek().kind == TokenKind::FLOAT)) {
            out += " " + next().lexeme;
        }
        return out;
    }

    const TokenSpan& tokens_;
    std::size_t pos_ = 0;
};

template <typename K, typename V>
class OrderedMap {
public:
    // Returns false when the key was already present (value is replaced).
    bool put(const K& key, V value) {
        auto it = index_.find(key);
        if (it != index_.end()) {
            items_[it->second].second = std::move(value);
            return false;
        }
        index_.emplace(key, items_.size());
        items_.emplace_back(key, std::move(value));
        return true;
    }

    bool contains(const K& key) const { return index_.count(key) > 0; }
    const std::vector<std::pair<K, V>>& items() const { return items_; }

private:
    std::vector<std::pair<K, V>> items_;
    std::map<K, std::size_t> index_;
};

std::string snippet(const std::string& raw) {
    std::string s = raw;
    if (s.size() > 80) {
        s = s.substr(0, 80) + "...";
    }
    return s;
}

struct RelationEntry {
    int line;
    std::string rtype;
    std::int64_t sub;
    std::int64_t obj;
};

struct ParsedRegion {
    std::string rtype;
    double cx, cy, w, h;
};

class OutputParser {
public:
    OutputParser(const core::EntityTypeSchema& schema, const ParseOptions& options)
        : schema_(schema), options_(options) {}

    ParseResult run(const std::string& text) {
        result_.report.document_id = options_.document_id;
        split_raw_lines(text);

        auto tokens = tokenize(text);
        TokenSpan line_tokens;
        int line_no = 1;
        for (const auto& tok : tokens) {
            if (tok.kind == TokenKind::NEWLINE) {
                handle_line(line_tokens, line_no);
                line_tokens.clear();
                line_no = tok.line + 1;
            } else {
                line_tokens.push_back(tok);
            }
        }
        handle_line(line_tokens, line_no);

        finish();
        return std::move(result_);
    }

private:
    void split_raw_lines(const std::string& text) {
        std::string current;
        for (char c : text) {
            if (c == '\n') {
                raw_lines_.push_back(current);
                current.clear();
            } else {
                current.push_back(c);
            }
        }
        raw_lines_.push_back(current);
    }

    const std::string& raw_line(int line_no) const {
        static const std::string empty;
        if (line_no < 1 || line_no > static_cast<int>(raw_lines_.size())) {
            return empty;
        }
        return raw_lines_[static_cast<std::size_t>(line_no) - 1];
    }

    void deviate(DeviationKind kind, int line_no, std::string detail) {
        result_.report.deviations.push_back({kind, line_no, std::move(detail)});
    }

    void quarantine(std::string category, int line_no, std::string detail) {
        result_.report.quarantine.push_back({std::move(category), line_no, std::move(detail)});
    }

    void handle_line(TokenSpan tokens, int line_no) {
        // Trailing comments are tolerated; whole-line comments are skipped.
        while (!tokens.empty() && tokens.back().kind == TokenKind::JUNK &&
               !tokens.back().lexeme.empty() && tokens.back().lexeme[0] == '#') {
            tokens.pop_back();
        }
        if (tokens.empty()) {
            return;
        }

        bool has_equals = false;
        for (const auto& tok : tokens) {
            if (tok.kind == TokenKind::EQUALS) {
                has_equals = true;
                break;
            }
        }
        const bool starts_reserved =
            tokens.front().kind == TokenKind::IDENT && is_reserved(tokens.front().lexeme);

        if (!has_equals && !starts_reserved) {
            deviate(DeviationKind::PROSE_CONTAMINATION, line_no, snippet(raw_line(line_no)));
            return;
        }

        // Assignment shape: IDENT [ key ] = value
        LineParser lp(tokens);
        std::string name;
        std::optional<Key> key;
        std::optional<Node> value;
        bool shape_ok = false;
        if (!lp.at_end() && lp.peek().kind == TokenKind::IDENT) {
            name = lp.next().lexeme;
            if (lp.accept(TokenKind::LBRACKET)) {
                key = lp.parse_key();
                if (key && lp.accept(TokenKind::RBRACKET) && lp.accept(TokenKind::EQUALS)) {
                    value = lp.parse_value();
                    shape_ok = value.has_value() && lp.at_end();
                }
            }
        }

        if (!shape_ok) {
            deviate(DeviationKind::UNPARSEABLE_LINE, line_no, snippet(raw_line(line_no)));
            return;
        }
        if (!is_reserved(name)) {
            deviate(DeviationKind::UNKNOWN_MAP_NAME, line_no, name);
            return;
        }
        if (options_.strict_strings && !key->is_int && !key->quoted) {
            deviate(DeviationKind::ARITY_MISMATCH, line_no, "bare string key: " + key->sval);
            return;
        }

        if (name == "entity_dic") {
            handle_entities(*key, *value, line_no);
        } else if (name == "chain_dic") {
            handle_chain(*key, *value, line_no);
        } else if (name == "relation_dic") {
            handle_relations(*key, *value, line_no);
        } else {
            handle_grounding(*key, *value, line_no);
        }
    }

    // A string element, leniently also accepting numeric lexemes. Returns
    // nullopt when the node cannot serve as a string.
    std::optional<std::string> as_string(const Node& node) const {
        switch (node.kind) {
        case Node::Kind::STR:
            if (options_.strict_strings && !node.quoted) {
                return std::nullopt;
            }
            return node.str;
        case Node::Kind::INT:
        case Node::Kind::FLOAT:
            if (options_.strict_strings) {
                return std::nullopt;
            }
            return node.str;
        case Node::Kind::LIST:
            return std::nullopt;
        }
        return std::nullopt;
    }

    void handle_entities(const Key& key, const Node& value, int line_no) {
        if (key.is_int) {
            deviate(DeviationKind::ARITY_MISMATCH, line_no, "entity type key must be a string");
            return;
        }
        if (value.kind != Node::Kind::LIST) {
            deviate(DeviationKind::ARITY_MISMATCH, line_no, "entity value must be a list");
            return;
        }
        std::vector<std::string> surfaces;
        for (std::size_t i = 0; i < value.items.size(); ++i) {
            auto s = as_string(value.items[i]);
            if (!s) {
                deviate(DeviationKind::ARITY_MISMATCH, line_no,
                        "entity element " + std::to_string(i) + " is not a string");
                continue;
            }
            surfaces.push_back(std::move(*s));
        }
        if (!schema_.has_type(key.sval)) {
            deviate(DeviationKind::TYPE_NOT_IN_SCHEMA, line_no, "entity type " + key.sval);
            for (const auto& s : surfaces) {
                quarantine("entity", line_no, key.sval + ": " + s);
            }
            return;
        }
        if (!entities_.put(key.sval, std::move(surfaces))) {
            deviate(DeviationKind::DUPLICATE_ASSIGNMENT, line_no, "entity_dic[" + key.sval + "]");
        }
    }

    void handle_chain(const Key& key, const Node& value, int line_no) {
        if (!key.is_int) {
            deviate(DeviationKind::ARITY_MISMATCH, line_no, "chain key must be an integer");
            return;
        }
        if (value.kind != Node::Kind::LIST || value.items.size() != 2 ||
            value.items[0].kind != Node::Kind::LIST) {
            deviate(DeviationKind::ARITY_MISMATCH, line_no,
                    "chain value must be [[mentions...], type]");
            return;
        }
        auto ctype = as_string(value.items[1]);
        if (!ctype) {
            deviate(DeviationKind::ARITY_MISMATCH, line_no, "chain type must be a string");
            return;
        }
        std::vector<std::string> mentions;
        for (const auto& item : value.items[0].items) {
            auto s = as_string(item);
            if (!s) {
                deviate(DeviationKind::ARITY_MISMATCH, line_no,
                        "chain mention is not a string");
                return;
            }
            mentions.push_back(std::move(*s));
        }
        if (!schema_.has_type(*ctype)) {
            deviate(DeviationKind::TYPE_NOT_IN_SCHEMA, line_no, "chain type " + *ctype);
            quarantine("chain", line_no, std::to_string(key.ival) + ": " + *ctype);
            return;
        }
        if (!chains_.put(key.ival, {std::move(mentions), *ctype})) {
            deviate(DeviationKind::DUPLICATE_ASSIGNMENT, line_no,
                    "chain_dic[" + std::to_string(key.ival) + "]");
        }
    }

    void handle_relations(const Key& key, const Node& value, int line_no) {
        if (key.is_int) {
            deviate(DeviationKind::ARITY_MISMATCH, line_no, "relation type key must be a string");
            return;
        }
        if (value.kind != Node::Kind::LIST) {
            deviate(DeviationKind::ARITY_MISMATCH, line_no, "relation value must be a list");
            return;
        }
        std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
        for (std::size_t i = 0; i < value.items.size(); ++i) {
            const Node& item = value.items[i];
            if (item.kind != Node::Kind::LIST || item.items.size() != 2 ||
                item.items[0].kind != Node::Kind::INT ||
                item.items[1].kind != Node::Kind::INT) {
                deviate(DeviationKind::ARITY_MISMATCH, line_no,
                        "relation element " + std::to_string(i) +
                            " is not a pair of chain ids");
                continue;
            }
            pairs.emplace_back(item.items[0].ival, item.items[1].ival);
        }
        if (!schema_.has_relation_type(key.sval)) {
            deviate(DeviationKind::TYPE_NOT_IN_SCHEMA, line_no, "relation type " + key.sval);
            for (const auto& [sub, obj] : pairs) {
                quarantine("relation", line_no,
                           key.sval + ": [" + std::to_string(sub) + ", " + std::to_string(obj) +
                               "]");
            }
            return;
        }
        for (const auto& [sub, obj] : pairs) {
            relation_entries_.push_back({line_no, key.sval, sub, obj});
        }
        if (!relations_.put(key.sval, std::move(pairs))) {
            deviate(DeviationKind::DUPLICATE_ASSIGNMENT, line_no,
                    "relation_dic[" + key.sval + "]");
        }
    }

    void handle_grounding(const Key& key, const Node& value, int line_no) {
        if (key.is_int) {
            deviate(DeviationKind::ARITY_MISMATCH, line_no, "grounding key must be a string");
            return;
        }
        if (value.kind != Node::Kind::LIST) {
            deviate(DeviationKind::ARITY_MISMATCH, line_no, "grounding value must be a list");
            return;
        }
        auto as_number = [](const Node& node, double& out) {
            if (node.kind == Node::Kind::INT || node.kind == Node::Kind::FLOAT) {
                out = node.fval;
                return true;
            }
            return false;
        };
        std::vector<ParsedRegion> regions;
        for (std::size_t i = 0; i < value.items.size(); ++i) {
            const Node& item = value.items[i];
            ParsedRegion region;
            bool ok = item.kind == Node::Kind::LIST && item.items.size() == 5;
            if (ok) {
                auto type_str = as_string(item.items[0]);
                ok = type_str.has_value() && as_number(item.items[1], region.cx) &&
                     as_number(item.items[2], region.cy) && as_number(item.items[3], region.w) &&
                     as_number(item.items[4], region.h);
                if (ok) {
                    region.rtype = *type_str;
                }
            }
            if (!ok) {
                deviate(DeviationKind::ARITY_MISMATCH, line_no,
                        "region element " + std::to_string(i) +
                            " is not [type, cx, cy, w, h]");
                continue;
            }
            if (!schema_.has_type(region.rtype)) {
                deviate(DeviationKind::TYPE_NOT_IN_SCHEMA, line_no,
                        "region type " + region.rtype);
                quarantine("region", line_no, key.sval + ": " + region.rtype);
                continue;
            }
            regions.push_back(std::move(region));
        }
        if (!grounding_.put(key.sval, std::move(regions))) {
            deviate(DeviationKind::DUPLICATE_ASSIGNMENT, line_no,
                    "grounding_dic[" + key.sval + "]");
        }
    }

    std::string map_image_key(const std::string& key) const {
        if (options_.image_refs.empty() || key.size() <= 4 || key.compare(0, 4, "Img_") != 0) {
            return key;
        }
        std::size_t index = 0;
        for (std::size_t i = 4; i < key.size(); ++i) {
            if (key[i] < '0' || key[i] > '9') {
                return key;
            }
            index = index * 10 + static_cast<std::size_t>(key[i] - '0');
            if (index > options_.image_refs.size()) {
                return key;
            }
        }
        if (index == 0) {
            return key;
        }
        return options_.image_refs[index - 1];
    }

    void finish() {
        for (const auto& [etype, surfaces] : entities_.items()) {
            for (const auto& surface : surfaces) {
                result_.annotations.entities.push_back({surface, etype});
            }
        }
        for (const auto& [id, chain] : chains_.items()) {
            result_.annotations.chains.push_back({id, chain.first, chain.second});
        }
        for (const auto& [rtype, pairs] : relations_.items()) {
            for (const auto& [sub, obj] : pairs) {
                result_.annotations.relations.push_back({rtype, sub, obj});
            }
        }
        for (const auto& [key, regions] : grounding_.items()) {
            const std::string image_ref = map_image_key(key);
            for (const auto& r : regions) {
                result_.annotations.regions.push_back(
                    {image_ref, r.rtype, r.cx, r.cy, r.w, r.h});
            }
        }

        for (const auto& entry : relation_entries_) {
            std::string missing;
            for (std::int64_t id : {entry.sub, entry.obj}) {
                if (!chains_.contains(id)) {
                    if (!missing.empty()) {
                        missing += ", ";
                    }
                    missing += std::to_string(id);
                }
            }
            if (!missing.empty()) {
                deviate(DeviationKind::DANGLING_CHAIN_ID, entry.line,
                        entry.rtype + " references missing chain " + missing);
            }
        }
    }

    const core::EntityTypeSchema& schema_;
    const ParseOptions& options_;
    ParseResult result_;
    std::vector<std::string> raw_lines_;

    OrderedMap<std::string, std::vector<std::string>> entities_;
    OrderedMap<std::int64_t, std::pair<std::vector<std::string>, std::string>> chains_;
    OrderedMap<std::string, std::vector<std::pair<std::int64_t, std::int64_t>>> relations_;
    OrderedMap<std::string, std::vector<ParsedRegion>> grounding_;
    std::vector<RelationEntry> relation_entries_;
};

} // namespace

const char* deviation_kind_name(DeviationKind kind) {
    switch (kind) {
    case DeviationKind::UNPARSEABLE_LINE: return "UNPARSEABLE_LINE";
    case DeviationKind::UNKNOWN_MAP_NAME: return "UNKNOWN_MAP_NAME";
    case DeviationKind::ARITY_MISMATCH: return "ARITY_MISMATCH";
    case DeviationKind::TYPE_NOT_IN_SCHEMA: return "TYPE_NOT_IN_SCHEMA";
    case DeviationKind::DANGLING_CHAIN_ID: return "DANGLING_CHAIN_ID";
    case DeviationKind::PROSE_CONTAMINATION: return "PROSE_CONTAMINATION";
    case DeviationKind::DUPLICATE_ASSIGNMENT: return "DUPLICATE_ASSIGNMENT";
    }
    return "?";
}

DeviationKind deviation_kind_from_name(const std::string& name) {
    for (auto kind : {DeviationKind::UNPARSEABLE_LINE, DeviationKind::UNKNOWN_MAP_NAME,
                      DeviationKind::ARITY_MISMATCH, DeviationKind::TYPE_NOT_IN_SCHEMA,
                      DeviationKind::DANGLING_CHAIN_ID, DeviationKind::PROSE_CONTAMINATION,
                      DeviationKind::DUPLICATE_ASSIGNMENT}) {
        if (name == deviation_kind_name(kind)) {
            return kind;
        }
    }
    throw DataError("unknown deviation kind: " + name);
}

std::set<DeviationKind> DeviationReport::kinds() const {
    std::set<DeviationKind> out;
    for (const auto& d : deviations) {
        out.insert(d.kind);
    }
    return out;
}

ParseResult parse_output(const std::string& text,
                         const core::EntityTypeSchema& schema,
                         const ParseOptions& options) {
    OutputParser parser(schema, options);
    return parser.run(text);
}

std::set<DeviationKind> default_hallucination_kinds() {
    return {DeviationKind::UNPARSEABLE_LINE,   DeviationKind::UNKNOWN_MAP_NAME,
            DeviationKind::ARITY_MISMATCH,     DeviationKind::TYPE_NOT_IN_SCHEMA,
            DeviationKind::DANGLING_CHAIN_ID,  DeviationKind::PROSE_CONTAMINATION};
}

bool has_hallucination(const DeviationReport& report) {
    return has_hallucination(report, default_hallucination_kinds());
}

bool has_hallucination(const DeviationReport& report, const std::set<DeviationKind>& kinds) {
    for (const auto& d : report.deviations) {
        if (kinds.count(d.kind) > 0) {
            return true;
        }
    }
    return false;
}

} // namespace codemie::parser
