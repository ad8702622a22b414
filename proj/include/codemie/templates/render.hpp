#pragma once

#include "codemie/core/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace codemie::templates {

// Rendered function-style prompt. truncated_images counts scene graphs that
// were dropped because of the per-template image cap.
struct InputTemplate {
    std::string text;
    std::size_t truncated_images = 0;
};

struct OutputTemplate {
    std::string text;
};

struct TemplateOptions {
    std::size_t max_scene_graph_images = 32;
};

// Escapes backslash, double quote, newline, carriage return and tab, and
// wraps the result in double quotes.
std::string quote_string(const std::string& value);

// Fixed 4-decimal rendering, e.g. 0.5 -> "0.5000".
std::string format_float(double value);

// One line per entity type with at least one record:
//   PER: [{name: Bob Hope, occupation: actor}]
// Types follow schema order, records input order, attributes schema order.
std::string serialize_entity_attributes(const std::vector<core::AttributeRecord>& records,
                                        const core::EntityTypeSchema& schema);

// One line per image, 1-based position:
//   Img_1: [[person, boat, stand]]
std::string serialize_scene_graphs(const std::vector<core::SceneGraph>& graphs);

// Builds the full function-style input block: header, doc comment, the three
// parameter assignments, four empty-map initializations and the trailing
// marker comment.
InputTemplate build_input_template(const core::Document& doc,
                                   const std::vector<core::AttributeRecord>& attrs,
                                   const std::vector<core::SceneGraph>& graphs,
                                   const core::EntityTypeSchema& schema,
                                   const TemplateOptions& options = {});

// Renders an annotation set as assignment statements over the four reserved
// maps. Throws DataError when the annotation set has hard validation errors.
OutputTemplate render_gold_output(const core::AnnotationSet& ann,
                                  const core::Document& doc,
                                  const core::EntityTypeSchema& schema);

} // namespace codemie::templates
