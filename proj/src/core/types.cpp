#include "codemie/core/types.hpp"

#include "codemie/core/normalize.hpp"
#include "codemie/error.hpp"

#include <algorithm>

namespace codemie::core {

std::string_view language_name(Language lang) {
    return lang == Language::ZH ? "ZH" : "EN";
}

Language language_from_name(std::string_view name) {
    if (name == "EN" || name == "en") {
        return Language::EN;
    }
    if (name == "ZH" || name == "zh") {
        return Language::ZH;
    }
    throw DataError("unknown language: " + std::string(name));
}

std::string_view not_mentioned_sentinel(Language lang) {
    return lang == Language::ZH ? kNotMentionedZh : kNotMentionedEn;
}

bool is_not_mentioned(std::string_view value) {
    const std::string norm = normalize_surface(value);
    return norm == kNotMentionedEn || norm == kNotMentionedZh;
}

EntityTypeSchema EntityTypeSchema::with_default_attributes() {
    EntityTypeSchema schema;
    schema.types = {"PER", "LOC", "ORG", "TIME"};
    schema.attributes_per_type = {
        {"PER",
         {"name", "occupation", "gender", "nationality", "marital status",
          "place of birth", "place of death"}},
        {"LOC", {"name", "type", "function"}},
        {"ORG", {"name", "type", "establishment status", "affiliation", "domain"}},
        {"TIME", {"name", "incident"}},
    };
    return schema;
}

bool EntityTypeSchema::has_type(std::string_view t) const {
    return std::find(types.begin(), types.end(), t) != types.end();
}

bool EntityTypeSchema::has_relation_type(std::string_view t) const {
    return std::find(relation_types.begin(), relation_types.end(), t) != relation_types.end();
}

const std::vector<std::string>& EntityTypeSchema::attributes_for(std::string_view t) const {
    static const std::vector<std::string> kEmpty;
    auto it = attributes_per_type.find(std::string(t));
    return it == attributes_per_type.end() ? kEmpty : it->second;
}

std::string_view provenance_name(Provenance p) {
    return p == Provenance::REVIEWED ? "REVIEWED" : "GENERATED";
}

Provenance provenance_from_name(std::string_view name) {
    if (name == "GENERATED") {
        return Provenance::GENERATED;
    }
    if (name == "REVIEWED") {
        return Provenance::REVIEWED;
    }
    throw DataError("unknown provenance: " + std::string(name));
}

const std::string* AttributeRecord::find(std::string_view attr) const {
    for (const auto& [key, value] : values) {
        if (key == attr) {
            return &value;
        }
    }
    return nullptr;
}

} // namespace codemie::core
