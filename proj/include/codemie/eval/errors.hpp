#pragma once

#include "codemie/core/types.hpp"
#include "codemie/parser/parser.hpp"

#include <cstddef>
#include <set>
#include <vector>

namespace codemie::eval {

// Two error kinds per task. Counts cover only errors attributable to one of
// the kinds; rates are computed over the classified total of the task.
struct ErrorBreakdown {
    std::size_t entity_boundary_incorrect = 0;
    std::size_t entity_type_incorrect = 0;
    std::size_t chain_contains_incorrect_entities = 0;
    std::size_t chain_missing_entities = 0;
    std::size_t relation_spurious_pair = 0;
    std::size_t relation_wrong_relation_type = 0;
    std::size_t grounding_boundary_incorrect = 0;
    std::size_t grounding_type_incorrect = 0;

    void add(const ErrorBreakdown& other);

    double entity_boundary_rate() const;
    double entity_type_rate() const;
    double chain_contains_rate() const;
    double chain_missing_rate() const;
    double relation_spurious_rate() const;
    double relation_wrong_type_rate() const;
    double grounding_boundary_rate() const;
    double grounding_type_rate() const;
};

// Classifies false positives and false negatives of each task:
// - entities and grounding: boundary error (same type, overlapping surface
//   respectively positive IoU) before type error (same surface respectively
//   above-threshold IoU, different type);
// - chains: mentions disagreeing with the optimally aligned opposite chain;
// - relations: unmatched predictions split into spurious pairs and wrong
//   relation types.
ErrorBreakdown error_taxonomy(const core::AnnotationSet& pred,
                              const core::AnnotationSet& gold,
                              double grounding_threshold = 0.5);

// Share of reports flagged by has_hallucination. Throws DataError on empty
// input.
double hallucination_rate(const std::vector<parser::DeviationReport>& reports);
double hallucination_rate(const std::vector<parser::DeviationReport>& reports,
                          const std::set<parser::DeviationKind>& kinds);

} // namespace codemie::eval
