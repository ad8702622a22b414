#pragma once

#include "codemie/core/types.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace codemie::eval {

// tp/pred_count/gold_count are populated by the counting metrics (entities,
// relations, grounding). The coreference metrics are rate-based and leave the
// counts at zero.
struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0;
    std::size_t pred_count = 0;
    std::size_t gold_count = 0;
};

PRF prf_from_counts(std::size_t tp, std::size_t pred_count, std::size_t gold_count);
PRF prf_from_rates(double precision, double recall);

// Per-document tallies that aggregate into corpus-level scores by summation.
struct CountTally {
    std::size_t tp = 0;
    std::size_t pred = 0;
    std::size_t gold = 0;
    void add(const CountTally& other);
    PRF prf() const;
};

struct MucTally {
    double recall_num = 0.0;
    double recall_den = 0.0;
    double precision_num = 0.0;
    double precision_den = 0.0;
    void add(const MucTally& other);
    PRF prf() const;
};

struct B3Tally {
    double precision_sum = 0.0;
    double recall_sum = 0.0;
    std::size_t mentions = 0; // gold-mention universe size
    void add(const B3Tally& other);
    PRF prf() const;
};

struct CeafTally {
    double phi = 0.0;
    std::size_t pred_chains = 0;
    std::size_t gold_chains = 0;
    void add(const CeafTally& other);
    PRF prf() const;
};

struct ChainScores {
    PRF muc;
    PRF b_cubed;
    PRF ceaf_e;
    PRF mean; // arithmetic mean of the three, component-wise
};

// Entity match: exact (normalized surface, type) equality; set semantics.
PRF score_entities(const std::vector<core::Entity>& pred, const std::vector<core::Entity>& gold);
std::map<std::string, PRF> score_entities_by_type(const std::vector<core::Entity>& pred,
                                                  const std::vector<core::Entity>& gold);

CountTally entity_tally(const std::vector<core::Entity>& pred,
                        const std::vector<core::Entity>& gold);

MucTally muc_tally(const std::vector<core::EntityChain>& pred,
                   const std::vector<core::EntityChain>& gold);
B3Tally b_cubed_tally(const std::vector<core::EntityChain>& pred,
                      const std::vector<core::EntityChain>& gold);
CeafTally ceaf_e_tally(const std::vector<core::EntityChain>& pred,
                       const std::vector<core::EntityChain>& gold);

PRF muc(const std::vector<core::EntityChain>& pred, const std::vector<core::EntityChain>& gold);
PRF b_cubed(const std::vector<core::EntityChain>& pred,
            const std::vector<core::EntityChain>& gold);
PRF ceaf_e(const std::vector<core::EntityChain>& pred,
           const std::vector<core::EntityChain>& gold);

ChainScores score_chains_detailed(const std::vector<core::EntityChain>& pred,
                                  const std::vector<core::EntityChain>& gold);
PRF score_chains(const std::vector<core::EntityChain>& pred,
                 const std::vector<core::EntityChain>& gold);

// A predicted triple matches a gold triple when the subject chains share a
// mention, the object chains share a mention, and types are equal. Greedy
// one-to-one in input order. Dangling chain ids resolve to empty sets.
PRF score_relations(const std::vector<core::RelationTriple>& pred,
                    const std::vector<core::EntityChain>& pred_chains,
                    const std::vector<core::RelationTriple>& gold,
                    const std::vector<core::EntityChain>& gold_chains);
std::map<std::string, PRF> score_relations_by_type(
    const std::vector<core::RelationTriple>& pred,
    const std::vector<core::EntityChain>& pred_chains,
    const std::vector<core::RelationTriple>& gold,
    const std::vector<core::EntityChain>& gold_chains);
CountTally relation_tally(const std::vector<core::RelationTriple>& pred,
                          const std::vector<core::EntityChain>& pred_chains,
                          const std::vector<core::RelationTriple>& gold,
                          const std::vector<core::EntityChain>& gold_chains);

// Center-format boxes are clipped to the unit square before computing
// intersection over union.
double iou(const core::VisualRegion& a, const core::VisualRegion& b);

// Greedy per-image matching by descending IoU; a pair matches when IoU is
// strictly above the threshold and the types are equal.
PRF score_grounding(const std::vector<core::VisualRegion>& pred,
                    const std::vector<core::VisualRegion>& gold,
                    double threshold = 0.5);
CountTally grounding_tally(const std::vector<core::VisualRegion>& pred,
                           const std::vector<core::VisualRegion>& gold,
                           double threshold = 0.5);

// The matched (pred index, gold index) pairs behind the two greedy scorers,
// for downstream error analysis.
std::vector<std::pair<int, int>> relation_match_pairs(
    const std::vector<core::RelationTriple>& pred,
    const std::vector<core::EntityChain>& pred_chains,
    const std::vector<core::RelationTriple>& gold,
    const std::vector<core::EntityChain>& gold_chains);
std::vector<std::pair<int, int>> grounding_match_pairs(
    const std::vector<core::VisualRegion>& pred,
    const std::vector<core::VisualRegion>& gold,
    double threshold = 0.5);

// Maximum-similarity one-to-one assignment (Hungarian method, O(n^3)).
// Returns the total similarity and, per row, the assigned column or -1.
std::pair<double, std::vector<int>> assignment_max_similarity(
    const std::vector<std::vector<double>>& sim);

} // namespace codemie::eval
