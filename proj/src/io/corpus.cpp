#include "codemie/io/corpus.hpp"

#include "codemie/core/validate.hpp"
#include "codemie/error.hpp"
#include "codemie/util/files.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <utility>

namespace codemie::io {

namespace {

using nlohmann::json;

const json& require_field(const json& j, const char* key, const char* context) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw DataError(std::string(context) + ": missing field \"" + key + "\"");
    }
    return *it;
}

std::string get_string(const json& j, const char* key, const char* context) {
    const json& field = require_field(j, key, context);
    if (!field.is_string()) {
        throw DataError(std::string(context) + ": field \"" + key + "\" must be a string");
    }
    return field.get<std::string>();
}

std::int64_t get_int(const json& j, const char* key, const char* context) {
    const json& field = require_field(j, key, context);
    if (!field.is_number_integer()) {
        throw DataError(std::string(context) + ": field \"" + key + "\" must be an integer");
    }
    return field.get<std::int64_t>();
}

double get_double(const json& j, const char* key, const char* context) {
    const json& field = require_field(j, key, context);
    if (!field.is_number()) {
        throw DataError(std::string(context) + ": field \"" + key + "\" must be a number");
    }
    return field.get<double>();
}

std::vector<std::string> string_list(const json& field, const char* what) {
    if (!field.is_array()) {
        throw DataError(std::string(what) + " must be an array of strings");
    }
    std::vector<std::string> out;
    out.reserve(field.size());
    for (const auto& item : field) {
        if (!item.is_string()) {
            throw DataError(std::string(what) + " must contain only strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

// Per-element arrays inside an AnnotationSet; missing array means empty.
const json* optional_array(const json& j, const char* key, const char* context) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return nullptr;
    }
    if (!it->is_array()) {
        throw DataError(std::string(context) + ": field \"" + key + "\" must be an array");
    }
    return &*it;
}

} // namespace

std::string_view split_name(Split s) {
    switch (s) {
    case Split::TRAIN:
        return "train";
    case Split::DEV:
        return "dev";
    case Split::TEST:
        return "test";
    }
    return "test";
}

Split split_from_name(std::string_view name) {
    if (name == "train" || name == "TRAIN") {
        return Split::TRAIN;
    }
    if (name == "dev" || name == "DEV") {
        return Split::DEV;
    }
    if (name == "test" || name == "TEST") {
        return Split::TEST;
    }
    throw DataError("unknown split: " + std::string(name));
}

json annotation_set_to_json(const core::AnnotationSet& ann) {
    json entities = json::array();
    for (const auto& e : ann.entities) {
        entities.push_back({{"surface", e.surface}, {"type", e.etype}});
    }
    json chains = json::array();
    for (const auto& c : ann.chains) {
        chains.push_back({{"id", c.id}, {"mentions", c.mentions}, {"type", c.ctype}});
    }
    json relations = json::array();
    for (const auto& r : ann.relations) {
        relations.push_back(
            {{"type", r.rtype}, {"subject", r.subject_chain_id}, {"object", r.object_chain_id}});
    }
    json regions = json::array();
    for (const auto& g : ann.regions) {
        regions.push_back({{"image", g.image_ref},
                           {"type", g.rtype},
                           {"cx", g.cx},
                           {"cy", g.cy},
                           {"w", g.w},
                           {"h", g.h}});
    }
    return {{"entities", entities},
            {"chains", chains},
            {"relations", relations},
            {"regions", regions}};
}

core::AnnotationSet annotation_set_from_json(const json& j) {
    if (!j.is_object()) {
        throw DataError("annotations: expected an object");
    }
    core::AnnotationSet ann;
    if (const json* arr = optional_array(j, "entities", "annotations")) {
        for (const auto& item : *arr) {
            core::Entity e;
            e.surface = get_string(item, "surface", "entity");
            e.etype = get_string(item, "type", "entity");
            ann.entities.push_back(std::move(e));
        }
    }
    if (const json* arr = optional_array(j, "chains", "annotations")) {
        for (const auto& item : *arr) {
            core::EntityChain c;
            c.id = get_int(item, "id", "chain");
            c.mentions = string_list(require_field(item, "mentions", "chain"), "chain mentions");
            c.ctype = get_string(item, "type", "chain");
            ann.chains.push_back(std::move(c));
        }
    }
    if (const json* arr = optional_array(j, "relations", "annotations")) {
        for (const auto& item : *arr) {
            core::RelationTriple r;
            r.rtype = get_string(item, "type", "relation");
            r.subject_chain_id = get_int(item, "subject", "relation");
            r.object_chain_id = get_int(item, "object", "relation");
            ann.relations.push_back(std::move(r));
        }
    }
    if (const json* arr = optional_array(j, "regions", "annotations")) {
        for (const auto& item : *arr) {
            core::VisualRegion g;
            g.image_ref = get_string(item, "image", "region");
            g.rtype = get_string(item, "type", "region");
            g.cx = get_double(item, "cx", "region");
            g.cy = get_double(item, "cy", "region");
            g.w = get_double(item, "w", "region");
            g.h = get_double(item, "h", "region");
            ann.regions.push_back(std::move(g));
        }
    }
    return ann;
}

json document_to_json(const core::Document& doc) {
    json j{{"id", doc.id},
           {"text", doc.text},
           {"language", doc.language == core::Language::ZH ? "zh" : "en"},
           {"image_refs", doc.image_refs}};
    if (doc.gold) {
        j["gold"] = annotation_set_to_json(*doc.gold);
    }
    return j;
}

core::Document document_from_json(const json& j) {
    if (!j.is_object()) {
        throw DataError("document: expected an object");
    }
    core::Document doc;
    doc.id = get_string(j, "id", "document");
    doc.text = get_string(j, "text", "document");
    if (auto it = j.find("language"); it != j.end()) {
        if (!it->is_string()) {
            throw DataError("document: field \"language\" must be a string");
        }
        doc.language = core::language_from_name(it->get<std::string>());
    }
    if (auto it = j.find("image_refs"); it != j.end() && !it->is_null()) {
        doc.image_refs = string_list(*it, "document image_refs");
    }
    if (auto it = j.find("gold"); it != j.end() && !it->is_null()) {
        doc.gold = annotation_set_from_json(*it);
    }
    return doc;
}

json schema_to_json(const core::EntityTypeSchema& schema) {
    json attrs = json::object();
    for (const auto& [etype, list] : schema.attributes_per_type) {
        attrs[etype] = list;
    }
    return {{"entity_types", schema.types},
            {"attributes", attrs},
            {"relation_types", schema.relation_types}};
}

core::EntityTypeSchema schema_from_json(const json& j) {
    if (!j.is_object()) {
        throw DataError("schema: expected an object");
    }
    core::EntityTypeSchema schema;
    schema.types = string_list(require_field(j, "entity_types", "schema"), "schema entity_types");
    std::set<std::string> seen(schema.types.begin(), schema.types.end());
    if (seen.size() != schema.types.size()) {
        throw DataError("schema: duplicate entity type");
    }
    if (auto it = j.find("attributes"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) {
            throw DataError("schema: field \"attributes\" must be an object");
        }
        for (const auto& [etype, list] : it->items()) {
            if (!seen.count(etype)) {
                throw DataError("schema: attributes listed for unknown type " + etype);
            }
            schema.attributes_per_type[etype] =
                string_list(list, ("schema attributes for " + etype).c_str());
        }
    }
    if (auto it = j.find("relation_types"); it != j.end() && !it->is_null()) {
        schema.relation_types = string_list(*it, "schema relation_types");
        std::set<std::string> rel(schema.relation_types.begin(), schema.relation_types.end());
        if (rel.size() != schema.relation_types.size()) {
            throw DataError("schema: duplicate relation type");
        }
    }
    return schema;
}

core::EntityTypeSchema load_schema(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(util::read_file(path));
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
    try {
        return schema_from_json(j);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void save_schema(const core::EntityTypeSchema& schema, const std::filesystem::path& path) {
    util::write_file_atomic(path, schema_to_json(schema).dump(2) + "\n");
}

Corpus load_corpus(const std::filesystem::path& path,
                   const std::filesystem::path& schema_path,
                   Split split) {
    Corpus corpus;
    corpus.split = split;

    if (!schema_path.empty()) {
        corpus.schema = load_schema(schema_path);
    } else {
        const auto adjacent = path.parent_path() / "schema.json";
        corpus.schema = std::filesystem::exists(adjacent)
                            ? load_schema(adjacent)
                            : core::EntityTypeSchema::with_default_attributes();
    }

    const std::string content = util::read_file(path);
    std::set<std::string> ids;
    std::size_t line_no = 0;
    std::istringstream stream(content);
    std::string line;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": invalid JSON: " +
                            e.what());
        }
        core::Document doc;
        try {
            doc = document_from_json(j);
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!ids.insert(doc.id).second) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": duplicate document id " + doc.id);
        }
        const auto report = core::validate_document(doc, corpus.schema);
        if (report.has_hard_errors()) {
            throw DataError("document " + doc.id + ":\n" + report.summary());
        }
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::string out;
    for (const auto& doc : corpus.documents) {
        out += document_to_json(doc).dump();
        out += '\n';
    }
    util::write_file_atomic(path, out);
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
    const std::string content = util::read_file(path);
    std::vector<Prediction> out;
    std::size_t line_no = 0;
    std::istringstream stream(content);
    std::string line;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        try {
            const json j = json::parse(line);
            Prediction pred;
            pred.document_id = get_string(j, "id", "prediction");
            pred.annotations =
                annotation_set_from_json(require_field(j, "annotations", "prediction"));
            out.push_back(std::move(pred));
        } catch (const json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": invalid JSON: " +
                            e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void save_predictions(const std::vector<Prediction>& predictions,
                      const std::filesystem::path& path) {
    std::string out;
    for (const auto& pred : predictions) {
        const json j{{"id", pred.document_id},
                     {"annotations", annotation_set_to_json(pred.annotations)}};
        out += j.dump();
        out += '\n';
    }
    util::write_file_atomic(path, out);
}

CorpusStats corpus_stats(const Corpus& corpus) {
    CorpusStats stats;
    stats.documents = corpus.documents.size();
    for (const auto& doc : corpus.documents) {
        stats.sentences += count_sentences(doc.text);
        if (!doc.gold) {
            continue;
        }
        stats.entities += doc.gold->entities.size();
        stats.chains += doc.gold->chains.size();
        stats.relations += doc.gold->relations.size();
        stats.groundings += doc.gold->regions.size();
    }
    return stats;
}

std::size_t count_sentences(std::string_view text) {
    // Terminators: . ! ? plus U+3002, U+FF01, U+FF1F. Segments that hold no
    // non-whitespace bytes do not count, so "!!!" is zero sentences.
    static const std::vector<std::string_view> kWide = {"\xE3\x80\x82", "\xEF\xBC\x81",
                                                        "\xEF\xBC\x9F"};
    std::size_t count = 0;
    bool segment_has_content = false;
    for (std::size_t i = 0; i < text.size();) {
        bool terminator = false;
        std::size_t advance = 1;
        const char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            terminator = true;
        } else {
            for (const auto& wide : kWide) {
                if (text.substr(i, wide.size()) == wide) {
                    terminator = true;
                    advance = wide.size();
                    break;
                }
            }
        }
        if (terminator) {
            if (segment_has_content) {
                ++count;
            }
            segment_has_content = false;
        } else if (static_cast<unsigned char>(c) > ' ') {
            segment_has_content = true;
        }
        i += advance;
    }
    if (segment_has_content) {
        ++count;
    }
    return count;
}

} // namespace codemie::io
