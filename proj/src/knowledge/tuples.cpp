#include "codemie/knowledge/tuples.hpp"

#include "codemie/core/normalize.hpp"
#include "codemie/error.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace codemie::knowledge {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> normalized_tuple(const RawTupleRow& row) {
    std::vector<std::string> out;
    out.reserve(row.values.size());
    for (const auto& v : row.values) {
        out.push_back(core::normalize_surface(v));
    }
    return out;
}

} // namespace

ParsedTuples parse_tuple_lines(const std::string& raw,
                               std::optional<std::size_t> expected_arity) {
    ParsedTuples result;
    std::istringstream lines(raw);
    std::string line;
    while (std::getline(lines, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        const auto open = stripped.find('(');
        const auto close = stripped.rfind(')');
        if (open == std::string::npos || close == std::string::npos || close <= open) {
            ++result.skipped_lines;
            continue;
        }
        const std::string inner = stripped.substr(open + 1, close - open - 1);
        RawTupleRow row;
        std::string value;
        std::istringstream parts(inner);
        while (std::getline(parts, value, ',')) {
            row.values.push_back(trim(value));
        }
        if (row.values.empty()) {
            ++result.skipped_lines;
            continue;
        }
        if (expected_arity && row.values.size() != *expected_arity) {
            ++result.arity_dropped;
            continue;
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

std::vector<RawTupleRow> dedup_rows(const std::vector<RawTupleRow>& rows) {
    std::set<std::vector<std::string>> seen;
    std::vector<RawTupleRow> out;
    for (const auto& row : rows) {
        if (seen.insert(normalized_tuple(row)).second) {
            out.push_back(row);
        }
    }
    return out;
}

PostprocessResult postprocess_attributes(const std::vector<RawTupleRow>& rows,
                                         const std::string& etype,
                                         const std::vector<std::string>& attrs,
                                         const core::EntityTypeSchema& schema,
                                         const PostprocessOptions& options) {
    if (!schema.has_type(etype)) {
        throw DataError("postprocess: type not in schema: " + etype);
    }
    const auto& allowed = schema.attributes_for(etype);
    for (const auto& attr : attrs) {
        if (std::find(allowed.begin(), allowed.end(), attr) == allowed.end()) {
            throw DataError("postprocess: attribute not in schema for " + etype + ": " + attr);
        }
    }
    PostprocessResult result;
    std::set<std::vector<std::pair<std::string, std::string>>> seen;
    for (const auto& row : rows) {
        if (row.values.size() != attrs.size()) {
            throw DataError("postprocess: row arity " + std::to_string(row.values.size()) +
                            " does not match attribute count " + std::to_string(attrs.size()));
        }
        core::AttributeRecord record;
        record.etype = etype;
        record.provenance = core::Provenance::GENERATED;
        for (std::size_t i = 0; i < attrs.size(); ++i) {
            const std::string value = core::normalize_surface(row.values[i]);
            if (value.empty() || core::is_not_mentioned(value)) {
                continue;
            }
            record.values.emplace_back(attrs[i], value);
        }
        const std::string* name = record.find("name");
        if (name == nullptr || name->empty()) {
            ++result.dropped_no_name;
            continue;
        }
        if (record.values.size() < 2) {
            ++result.dropped_too_few;
            continue;
        }
        if (!seen.insert(record.values).second) {
            ++result.dropped_duplicates;
            continue;
        }
        bool flag = false;
        for (const auto& entity : options.known_entities) {
            if (entity.etype != etype && core::surfaces_equal(entity.surface, *name)) {
                flag = true;
                break;
            }
        }
        if (flag) {
            result.flagged.push_back(result.records.size());
        }
        result.records.push_back(std::move(record));
    }
    return result;
}

core::SceneGraph postprocess_scene_graph(const std::vector<RawTupleRow>& rows,
                                         const std::string& image_ref) {
    core::SceneGraph graph;
    graph.image_ref = image_ref;
    std::set<std::vector<std::string>> seen;
    for (const auto& row : rows) {
        if (row.values.size() != 3) {
            throw DataError("scene graph rows must have exactly 3 values");
        }
        core::SceneGraphTriple triple{core::normalize_surface(row.values[0]),
                                      core::normalize_surface(row.values[1]),
                                      core::normalize_surface(row.values[2])};
        if (triple.subject.empty() || triple.object.empty() || triple.relation.empty()) {
            continue;
        }
        if (seen.insert({triple.subject, triple.object, triple.relation}).second) {
            graph.triples.push_back(std::move(triple));
        }
    }
    return graph;
}

} // namespace codemie::knowledge
