#pragma once

#include "codemie/core/types.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace codemie::io {

enum class Split { TRAIN, DEV, TEST };

std::string_view split_name(Split s);
Split split_from_name(std::string_view name);

/// A document collection together with the type schema its annotations follow.
struct Corpus {
    std::vector<core::Document> documents;
    core::EntityTypeSchema schema;
    Split split = Split::TEST;
};

struct CorpusStats {
    std::size_t documents = 0;
    std::size_t sentences = 0;
    std::size_t entities = 0;
    std::size_t chains = 0;
    std::size_t relations = 0;
    std::size_t groundings = 0;

    bool operator==(const CorpusStats&) const = default;
};

/// One parsed model output keyed by document id.
struct Prediction {
    std::string document_id;
    core::AnnotationSet annotations;
};

// Interchange (de)serialization; field names are documented in docs/format.md.
nlohmann::json annotation_set_to_json(const core::AnnotationSet& ann);
core::AnnotationSet annotation_set_from_json(const nlohmann::json& j);

nlohmann::json document_to_json(const core::Document& doc);
core::Document document_from_json(const nlohmann::json& j);

nlohmann::json schema_to_json(const core::EntityTypeSchema& schema);
core::EntityTypeSchema schema_from_json(const nlohmann::json& j);

core::EntityTypeSchema load_schema(const std::filesystem::path& path);
void save_schema(const core::EntityTypeSchema& schema, const std::filesystem::path& path);

/// Loads a JSONL corpus, one document per line. The schema comes from
/// `schema_path` when given, else from a `schema.json` next to the corpus
/// file, else the built-in default types. Gold annotations are validated;
/// hard violations abort the load with the offending document id.
Corpus load_corpus(const std::filesystem::path& path,
                   const std::filesystem::path& schema_path = {},
                   Split split = Split::TEST);

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

std::vector<Prediction> load_predictions(const std::filesystem::path& path);
void save_predictions(const std::vector<Prediction>& predictions,
                      const std::filesystem::path& path);

CorpusStats corpus_stats(const Corpus& corpus);

/// Sentence count under a naive terminator split (. ! ? and the CJK forms);
/// a trailing unterminated fragment counts as one more sentence.
std::size_t count_sentences(std::string_view text);

} // namespace codemie::io
