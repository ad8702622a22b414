#include "codemie/eval/errors.hpp"

#include "codemie/core/normalize.hpp"
#include "codemie/error.hpp"
#include "codemie/eval/metrics.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

namespace codemie::eval {

namespace {

double rate(std::size_t a, std::size_t b) {
    const std::size_t total = a + b;
    return total > 0 ? static_cast<double>(a) / static_cast<double>(total) : 0.0;
}

using EntityKey = std::pair<std::string, std::string>; // normalized surface, type

std::set<EntityKey> entity_keys(const std::vector<core::Entity>& entities) {
    std::set<EntityKey> out;
    for (const auto& e : entities) {
        out.insert({core::normalize_surface(e.surface), e.etype});
    }
    return out;
}

// Codepoint bigrams; two surfaces share a substring of length >= 2 iff their
// bigram sets intersect.
std::set<std::pair<char32_t, char32_t>> bigrams(const std::string& surface) {
    const auto cps = core::to_codepoints(surface);
    std::set<std::pair<char32_t, char32_t>> out;
    for (std::size_t i = 0; i + 1 < cps.size(); ++i) {
        out.insert({cps[i], cps[i + 1]});
    }
    return out;
}

bool bigrams_intersect(const std::set<std::pair<char32_t, char32_t>>& a,
                       const std::set<std::pair<char32_t, char32_t>>& b) {
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    return std::any_of(small.begin(), small.end(),
                       [&](const auto& g) { return large.count(g) > 0; });
}

void classify_entity_errors(const std::set<EntityKey>& errors,
                            const std::set<EntityKey>& others,
                            std::size_t& boundary,
                            std::size_t& type) {
    std::map<std::string, std::set<std::pair<char32_t, char32_t>>> bigram_cache;
    auto grams = [&](const std::string& s) -> const std::set<std::pair<char32_t, char32_t>>& {
        auto it = bigram_cache.find(s);
        if (it == bigram_cache.end()) {
            it = bigram_cache.emplace(s, bigrams(s)).first;
        }
        return it->second;
    };
    for (const auto& [surface, etype] : errors) {
        bool is_boundary = false;
        bool is_type = false;
        for (const auto& [osurface, otype] : others) {
            if (otype == etype && bigrams_intersect(grams(surface), grams(osurface))) {
                is_boundary = true;
                break;
            }
            if (otype != etype && osurface == surface) {
                is_type = true;
            }
        }
        if (is_boundary) {
            ++boundary;
        } else if (is_type) {
            ++type;
        }
    }
}

std::set<std::string> mention_set(const core::EntityChain& chain) {
    std::set<std::string> out;
    for (const auto& m : chain.mentions) {
        auto norm = core::normalize_surface(m);
        if (!norm.empty()) {
            out.insert(std::move(norm));
        }
    }
    return out;
}

double phi4(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) {
        return 0.0;
    }
    std::size_t inter = 0;
    for (const auto& m : a) {
        inter += b.count(m);
    }
    return 2.0 * static_cast<double>(inter) / static_cast<double>(a.size() + b.size());
}

void classify_chain_errors(const std::vector<core::EntityChain>& pred,
                           const std::vector<core::EntityChain>& gold,
                           ErrorBreakdown& out) {
    std::vector<std::set<std::string>> pred_sets, gold_sets;
    for (const auto& c : pred) {
        pred_sets.push_back(mention_set(c));
    }
    for (const auto& c : gold) {
        gold_sets.push_back(mention_set(c));
    }
    std::vector<int> row_to_col(pred_sets.size(), -1);
    if (!pred_sets.empty() && !gold_sets.empty()) {
        std::vector<std::vector<double>> sim(pred_sets.size(),
                                             std::vector<double>(gold_sets.size(), 0.0));
        for (std::size_t i = 0; i < pred_sets.size(); ++i) {
            for (std::size_t j = 0; j < gold_sets.size(); ++j) {
                sim[i][j] = phi4(pred_sets[i], gold_sets[j]);
            }
        }
        row_to_col = assignment_max_similarity(sim).second;
        // Alignments with zero similarity are padding artifacts.
        for (std::size_t i = 0; i < row_to_col.size(); ++i) {
            if (row_to_col[i] >= 0 && sim[i][static_cast<std::size_t>(row_to_col[i])] == 0.0) {
                row_to_col[i] = -1;
            }
        }
    }

    std::vector<bool> gold_aligned(gold_sets.size(), false);
    for (std::size_t i = 0; i < pred_sets.size(); ++i) {
        const int j = row_to_col[i];
        if (j < 0) {
            out.chain_contains_incorrect_entities += pred_sets[i].size();
            continue;
        }
        gold_aligned[static_cast<std::size_t>(j)] = true;
        const auto& g = gold_sets[static_cast<std::size_t>(j)];
        for (const auto& m : pred_sets[i]) {
            if (g.count(m) == 0) {
                ++out.chain_contains_incorrect_entities;
            }
        }
        for (const auto& m : g) {
            if (pred_sets[i].count(m) == 0) {
                ++out.chain_missing_entities;
            }
        }
    }
    for (std::size_t j = 0; j < gold_sets.size(); ++j) {
        if (!gold_aligned[j]) {
            out.chain_missing_entities += gold_sets[j].size();
        }
    }
}

void classify_relation_errors(const core::AnnotationSet& pred,
                              const core::AnnotationSet& gold,
                              ErrorBreakdown& out) {
    const auto matches =
        relation_match_pairs(pred.relations, pred.chains, gold.relations, gold.chains);
    std::vector<bool> matched(pred.relations.size(), false);
    for (const auto& [pi, gi] : matches) {
        matched[static_cast<std::size_t>(pi)] = true;
    }

    std::map<std::int64_t, std::set<std::string>> pred_by_id, gold_by_id;
    for (const auto& c : pred.chains) {
        pred_by_id.emplace(c.id, mention_set(c));
    }
    for (const auto& c : gold.chains) {
        gold_by_id.emplace(c.id, mention_set(c));
    }
    auto resolve = [](const std::map<std::int64_t, std::set<std::string>>& by_id,
                      std::int64_t id) -> const std::set<std::string>& {
        static const std::set<std::string> empty;
        auto it = by_id.find(id);
        return it == by_id.end() ? empty : it->second;
    };
    auto intersects = [](const std::set<std::string>& a, const std::set<std::string>& b) {
        const auto& small = a.size() <= b.size() ? a : b;
        const auto& large = a.size() <= b.size() ? b : a;
        return std::any_of(small.begin(), small.end(),
                           [&](const std::string& m) { return large.count(m) > 0; });
    };

    for (std::size_t i = 0; i < pred.relations.size(); ++i) {
        if (matched[i]) {
            continue;
        }
        const auto& p = pred.relations[i];
        const auto& psub = resolve(pred_by_id, p.subject_chain_id);
        const auto& pobj = resolve(pred_by_id, p.object_chain_id);
        bool pair_found = false;
        bool wrong_type = false;
        for (const auto& g : gold.relations) {
            const auto& gsub = resolve(gold_by_id, g.subject_chain_id);
            const auto& gobj = resolve(gold_by_id, g.object_chain_id);
            if (intersects(psub, gsub) && intersects(pobj, gobj)) {
                pair_found = true;
                if (g.rtype != p.rtype) {
                    wrong_type = true;
                    break;
                }
            }
        }
        if (!pair_found) {
            ++out.relation_spurious_pair;
        } else if (wrong_type) {
            ++out.relation_wrong_relation_type;
        }
    }
}

void classify_grounding_errors(const core::AnnotationSet& pred,
                               const core::AnnotationSet& gold,
                               double threshold,
                               ErrorBreakdown& out) {
    const auto matches = grounding_match_pairs(pred.regions, gold.regions, threshold);
    std::vector<bool> pred_matched(pred.regions.size(), false);
    std::vector<bool> gold_matched(gold.regions.size(), false);
    for (const auto& [pi, gi] : matches) {
        pred_matched[static_cast<std::size_t>(pi)] = true;
        gold_matched[static_cast<std::size_t>(gi)] = true;
    }

    auto classify = [&](const core::VisualRegion& r, const std::vector<core::VisualRegion>& others,
                        std::size_t& boundary, std::size_t& type) {
        bool is_boundary = false;
        bool is_type = false;
        for (const auto& o : others) {
            if (o.image_ref != r.image_ref) {
                continue;
            }
            const double overlap = iou(r, o);
            if (o.rtype == r.rtype && overlap > 0.0) {
                is_boundary = true;
                break;
            }
            if (o.rtype != r.rtype && overlap > threshold) {
                is_type = true;
            }
        }
        if (is_boundary) {
            ++boundary;
        } else if (is_type) {
            ++type;
        }
    };

    for (std::size_t i = 0; i < pred.regions.size(); ++i) {
        if (!pred_matched[i]) {
            classify(pred.regions[i], gold.regions, out.grounding_boundary_incorrect,
                     out.grounding_type_incorrect);
        }
    }
    for (std::size_t j = 0; j < gold.regions.size(); ++j) {
        if (!gold_matched[j]) {
            classify(gold.regions[j], pred.regions, out.grounding_boundary_incorrect,
                     out.grounding_type_incorrect);
        }
    }
}

} // namespace

void ErrorBreakdown::add(const ErrorBreakdown& other) {
    entity_boundary_incorrect += other.entity_boundary_incorrect;
    entity_type_incorrect += other.entity_type_incorrect;
    chain_contains_incorrect_entities += other.chain_contains_incorrect_entities;
    chain_missing_entities += other.chain_missing_entities;
    relation_spurious_pair += other.relation_spurious_pair;
    relation_wrong_relation_type += other.relation_wrong_relation_type;
    grounding_boundary_incorrect += other.grounding_boundary_incorrect;
    grounding_type_incorrect += other.grounding_type_incorrect;
}

double ErrorBreakdown::entity_boundary_rate() const {
    return rate(entity_boundary_incorrect, entity_type_incorrect);
}
double ErrorBreakdown::entity_type_rate() const {
    return rate(entity_type_incorrect, entity_boundary_incorrect);
}
double ErrorBreakdown::chain_contains_rate() const {
    return rate(chain_contains_incorrect_entities, chain_missing_entities);
}
double ErrorBreakdown::chain_missing_rate() const {
    return rate(chain_missing_entities, chain_contains_incorrect_entities);
}
double ErrorBreakdown::relation_spurious_rate() const {
    return rate(relation_spurious_pair, relation_wrong_relation_type);
}
double ErrorBreakdown::relation_wrong_type_rate() const {
    return rate(relation_wrong_relation_type, relation_spurious_pair);
}
double ErrorBreakdown::grounding_boundary_rate() const {
    return rate(grounding_boundary_incorrect, grounding_type_incorrect);
}
double ErrorBreakdown::grounding_type_rate() const {
    return rate(grounding_type_incorrect, grounding_boundary_incorrect);
}

ErrorBreakdown error_taxonomy(const core::AnnotationSet& pred,
                              const core::AnnotationSet& gold,
                              double grounding_threshold) {
    ErrorBreakdown out;

    const auto pred_keys = entity_keys(pred.entities);
    const auto gold_keys = entity_keys(gold.entities);
    std::set<EntityKey> false_pos, false_neg;
    std::set_difference(pred_keys.begin(), pred_keys.end(), gold_keys.begin(), gold_keys.end(),
                        std::inserter(false_pos, false_pos.end()));
    std::set_difference(gold_keys.begin(), gold_keys.end(), pred_keys.begin(), pred_keys.end(),
                        std::inserter(false_neg, false_neg.end()));
    classify_entity_errors(false_pos, gold_keys, out.entity_boundary_incorrect,
                           out.entity_type_incorrect);
    classify_entity_errors(false_neg, pred_keys, out.entity_boundary_incorrect,
                           out.entity_type_incorrect);

    classify_chain_errors(pred.chains, gold.chains, out);
    classify_relation_errors(pred, gold, out);
    classify_grounding_errors(pred, gold, grounding_threshold, out);
    return out;
}

double hallucination_rate(const std::vector<parser::DeviationReport>& reports) {
    return hallucination_rate(reports, parser::default_hallucination_kinds());
}

double hallucination_rate(const std::vector<parser::DeviationReport>& reports,
                          const std::set<parser::DeviationKind>& kinds) {
    if (reports.empty()) {
        throw DataError("hallucination rate: no samples");
    }
    std::size_t flagged = 0;
    for (const auto& report : reports) {
        if (parser::has_hallucination(report, kinds)) {
            ++flagged;
        }
    }
    return static_cast<double>(flagged) / static_cast<double>(reports.size());
}

} // namespace codemie::eval
