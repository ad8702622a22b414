#pragma once

#include "codemie/core/types.hpp"
#include "codemie/parser/lexer.hpp"

#include <set>
#include <string>
#include <vector>

namespace codemie::parser {

enum class DeviationKind {
    UNPARSEABLE_LINE,
    UNKNOWN_MAP_NAME,
    ARITY_MISMATCH,
    TYPE_NOT_IN_SCHEMA,
    DANGLING_CHAIN_ID,
    PROSE_CONTAMINATION,
    DUPLICATE_ASSIGNMENT,
};

const char* deviation_kind_name(DeviationKind kind);
DeviationKind deviation_kind_from_name(const std::string& name);

struct Deviation {
    DeviationKind kind;
    int line = 0;
    std::string detail;
};

// An otherwise well-formed item whose entity or relation type is not in the
// schema. Kept out of the annotation set but reported for inspection.
struct QuarantinedItem {
    std::string category; // "entity" | "chain" | "relation" | "region"
    int line = 0;
    std::string detail;
};

struct DeviationReport {
    std::string document_id;
    std::vector<Deviation> deviations;
    std::vector<QuarantinedItem> quarantine;

    bool empty() const { return deviations.empty(); }
    std::set<DeviationKind> kinds() const;
};

struct ParseOptions {
    // When set, grounding keys Img_i are mapped back to image_refs[i-1];
    // unmappable keys are kept literally as the region's image reference.
    std::vector<std::string> image_refs;
    // Reject bare (unquoted) string values instead of accepting them.
    bool strict_strings = false;
    std::string document_id;
};

struct ParseResult {
    core::AnnotationSet annotations;
    DeviationReport report;
};

// Total over arbitrary bytes: recovers at line granularity, never throws.
ParseResult parse_output(const std::string& text,
                         const core::EntityTypeSchema& schema,
                         const ParseOptions& options = {});

// Deviation kinds that count a sample as hallucinated. Default: everything
// except DUPLICATE_ASSIGNMENT.
std::set<DeviationKind> default_hallucination_kinds();

bool has_hallucination(const DeviationReport& report);
bool has_hallucination(const DeviationReport& report, const std::set<DeviationKind>& kinds);

} // namespace codemie::parser
