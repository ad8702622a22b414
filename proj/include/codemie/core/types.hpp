#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace codemie::core {

enum class Language { EN, ZH };

std::string_view language_name(Language lang);
Language language_from_name(std::string_view name);

// Attribute value marking "this attribute is not stated in the text".
inline constexpr std::string_view kNotMentionedEn = "not mentioned";
inline constexpr std::string_view kNotMentionedZh = "未提及";

std::string_view not_mentioned_sentinel(Language lang);
bool is_not_mentioned(std::string_view value);

/// A typed entity mention surface.
struct Entity {
    std::string surface;
    std::string etype;

    bool operator==(const Entity&) const = default;
};

/// A coreference cluster: all mention surfaces referring to one entity.
struct EntityChain {
    std::int64_t id = 0;
    std::vector<std::string> mentions;
    std::string ctype;

    bool operator==(const EntityChain&) const = default;
};

/// A typed relation between two entity chains, referenced by chain id.
struct RelationTriple {
    std::string rtype;
    std::int64_t subject_chain_id = 0;
    std::int64_t object_chain_id = 0;

    bool operator==(const RelationTriple&) const = default;
};

/// A typed bounding box in center format, coordinates normalized to [0,1].
struct VisualRegion {
    std::string image_ref;
    std::string rtype;
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    bool operator==(const VisualRegion&) const = default;
};

/// The four extraction structures for one document: entities, chains,
/// relations, grounding regions.
struct AnnotationSet {
    std::vector<Entity> entities;
    std::vector<EntityChain> chains;
    std::vector<RelationTriple> relations;
    std::vector<VisualRegion> regions;

    bool empty() const {
        return entities.empty() && chains.empty() && relations.empty() && regions.empty();
    }

    bool operator==(const AnnotationSet&) const = default;
};

/// One input sample: text plus ordered image references, optionally with
/// gold annotations.
struct Document {
    std::string id;
    std::string text;
    Language language = Language::EN;
    std::vector<std::string> image_refs;
    std::optional<AnnotationSet> gold;

    bool operator==(const Document&) const = default;
};

/// Entity-type inventory with per-type attribute lists and relation types.
struct EntityTypeSchema {
    std::vector<std::string> types;
    std::map<std::string, std::vector<std::string>> attributes_per_type;
    std::vector<std::string> relation_types;

    // PER/LOC/ORG/TIME with their standard attribute lists.
    static EntityTypeSchema with_default_attributes();

    bool has_type(std::string_view t) const;
    bool has_relation_type(std::string_view t) const;

    // Empty list when the type defines no attributes (the OTHER/MISC case).
    const std::vector<std::string>& attributes_for(std::string_view t) const;

    bool operator==(const EntityTypeSchema&) const = default;
};

enum class Provenance { GENERATED, REVIEWED };

std::string_view provenance_name(Provenance p);
Provenance provenance_from_name(std::string_view name);

/// One generated entity-attribute tuple: entity type plus an ordered
/// attribute -> value map.
struct AttributeRecord {
    std::string etype;
    std::vector<std::pair<std::string, std::string>> values;
    Provenance provenance = Provenance::GENERATED;

    const std::string* find(std::string_view attr) const;

    bool operator==(const AttributeRecord&) const = default;
};

/// Per-image list of (subject, object, relation) triples.
struct SceneGraphTriple {
    std::string subject;
    std::string object;
    std::string relation;

    bool operator==(const SceneGraphTriple&) const = default;
};

struct SceneGraph {
    std::string image_ref;
    std::vector<SceneGraphTriple> triples;

    bool operator==(const SceneGraph&) const = default;
};

} // namespace codemie::core
