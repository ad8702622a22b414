#pragma once

#include "codemie/core/types.hpp"

#include <string>
#include <vector>

namespace codemie::knowledge {

// Instruction asking for attribute tuples of one entity type, in the given
// language. Throws DataError on an empty attribute list (types without
// attributes are skipped upstream).
std::string build_attribute_prompt(const std::string& text,
                                   const std::string& etype,
                                   const std::vector<std::string>& attrs,
                                   core::Language language = core::Language::EN);

// Fixed instruction asking for (subject, object, relation) triples; the
// image travels separately as request payload.
std::string build_scene_graph_prompt(core::Language language = core::Language::EN);

} // namespace codemie::knowledge
