#pragma once

#include "codemie/core/types.hpp"
#include "codemie/eval/errors.hpp"
#include "codemie/eval/metrics.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>

namespace codemie::eval {

struct DocumentScore {
    PRF entities;
    ChainScores chains;
    PRF relations;
    PRF grounding;
    ErrorBreakdown errors;
};

DocumentScore score_document(const core::AnnotationSet& pred,
                             const core::AnnotationSet& gold,
                             double grounding_threshold = 0.5);

// Summable per-document tallies; corpus scores are computed from the sums
// (micro aggregation).
struct CorpusTally {
    std::size_t documents = 0;
    CountTally entities;
    MucTally muc;
    B3Tally b3;
    CeafTally ceaf;
    CountTally relations;
    CountTally grounding;
    ErrorBreakdown errors;
    std::map<std::string, CountTally> entities_by_type;
    std::map<std::string, CountTally> relations_by_type;

    void add_document(const core::AnnotationSet& pred,
                      const core::AnnotationSet& gold,
                      double grounding_threshold = 0.5);
    void add(const CorpusTally& other);
};

struct CorpusScore {
    std::size_t documents = 0;
    PRF entities;
    ChainScores chains;
    PRF relations;
    PRF grounding;
    ErrorBreakdown errors;
    std::map<std::string, PRF> entities_by_type;
    std::map<std::string, PRF> relations_by_type;
};

CorpusScore finalize(const CorpusTally& tally);

nlohmann::json score_report_json(const CorpusScore& score,
                                 std::optional<double> hallucination_rate = std::nullopt);

} // namespace codemie::eval
