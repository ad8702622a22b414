#include "codemie/eval/report.hpp"

#include "codemie/version.hpp"

#include <algorithm>
#include <set>

namespace codemie::eval {

namespace {

template <typename T, typename Pred>
std::vector<T> filtered(const std::vector<T>& items, Pred pred) {
    std::vector<T> out;
    std::copy_if(items.begin(), items.end(), std::back_inserter(out), pred);
    return out;
}

nlohmann::json prf_counts_json(const PRF& prf) {
    return {{"precision", prf.precision}, {"recall", prf.recall},     {"f1", prf.f1},
            {"tp", prf.tp},               {"pred", prf.pred_count},   {"gold", prf.gold_count}};
}

nlohmann::json prf_rates_json(const PRF& prf) {
    return {{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1}};
}

} // namespace

DocumentScore score_document(const core::AnnotationSet& pred,
                             const core::AnnotationSet& gold,
                             double grounding_threshold) {
    DocumentScore out;
    out.entities = score_entities(pred.entities, gold.entities);
    out.chains = score_chains_detailed(pred.chains, gold.chains);
    out.relations = score_relations(pred.relations, pred.chains, gold.relations, gold.chains);
    out.grounding = score_grounding(pred.regions, gold.regions, grounding_threshold);
    out.errors = error_taxonomy(pred, gold, grounding_threshold);
    return out;
}

void CorpusTally::add_document(const core::AnnotationSet& pred,
                               const core::AnnotationSet& gold,
                               double grounding_threshold) {
    ++documents;
    entities.add(entity_tally(pred.entities, gold.entities));
    muc.add(muc_tally(pred.chains, gold.chains));
    b3.add(b_cubed_tally(pred.chains, gold.chains));
    ceaf.add(ceaf_e_tally(pred.chains, gold.chains));
    relations.add(relation_tally(pred.relations, pred.chains, gold.relations, gold.chains));
    grounding.add(grounding_tally(pred.regions, gold.regions, grounding_threshold));
    errors.add(error_taxonomy(pred, gold, grounding_threshold));

    std::set<std::string> etypes;
    for (const auto& e : pred.entities) {
        etypes.insert(e.etype);
    }
    for (const auto& e : gold.entities) {
        etypes.insert(e.etype);
    }
    for (const auto& type : etypes) {
        auto by_type = [&](const core::Entity& e) { return e.etype == type; };
        entities_by_type[type].add(
            entity_tally(filtered(pred.entities, by_type), filtered(gold.entities, by_type)));
    }

    std::set<std::string> rtypes;
    for (const auto& r : pred.relations) {
        rtypes.insert(r.rtype);
    }
    for (const auto& r : gold.relations) {
        rtypes.insert(r.rtype);
    }
    for (const auto& type : rtypes) {
        auto by_type = [&](const core::RelationTriple& r) { return r.rtype == type; };
        relations_by_type[type].add(relation_tally(filtered(pred.relations, by_type), pred.chains,
                                                   filtered(gold.relations, by_type),
                                                   gold.chains));
    }
}

void CorpusTally::add(const CorpusTally& other) {
    documents += other.documents;
    entities.add(other.entities);
    muc.add(other.muc);
    b3.add(other.b3);
    ceaf.add(other.ceaf);
    relations.add(other.relations);
    grounding.add(other.grounding);
    errors.add(other.errors);
    for (const auto& [type, tally] : other.entities_by_type) {
        entities_by_type[type].add(tally);
    }
    for (const auto& [type, tally] : other.relations_by_type) {
        relations_by_type[type].add(tally);
    }
}

CorpusScore finalize(const CorpusTally& tally) {
    CorpusScore out;
    out.documents = tally.documents;
    out.entities = tally.entities.prf();
    out.chains.muc = tally.muc.prf();
    out.chains.b_cubed = tally.b3.prf();
    out.chains.ceaf_e = tally.ceaf.prf();
    out.chains.mean.precision =
        (out.chains.muc.precision + out.chains.b_cubed.precision + out.chains.ceaf_e.precision) /
        3.0;
    out.chains.mean.recall =
        (out.chains.muc.recall + out.chains.b_cubed.recall + out.chains.ceaf_e.recall) / 3.0;
    out.chains.mean.f1 = (out.chains.muc.f1 + out.chains.b_cubed.f1 + out.chains.ceaf_e.f1) / 3.0;
    out.relations = tally.relations.prf();
    out.grounding = tally.grounding.prf();
    out.errors = tally.errors;
    for (const auto& [type, t] : tally.entities_by_type) {
        out.entities_by_type[type] = t.prf();
    }
    for (const auto& [type, t] : tally.relations_by_type) {
        out.relations_by_type[type] = t.prf();
    }
    return out;
}

nlohmann::json score_report_json(const CorpusScore& score,
                                 std::optional<double> hallucination_rate) {
    nlohmann::json out;
    out["metric_version"] = kMetricVersion;
    out["documents"] = score.documents;
    out["entities"] = prf_counts_json(score.entities);
    out["chains"] = {{"muc", prf_rates_json(score.chains.muc)},
                     {"b_cubed", prf_rates_json(score.chains.b_cubed)},
                     {"ceaf_e", prf_rates_json(score.chains.ceaf_e)},
                     {"mean", prf_rates_json(score.chains.mean)}};
    out["relations"] = prf_counts_json(score.relations);
    out["grounding"] = prf_counts_json(score.grounding);

    nlohmann::json by_etype = nlohmann::json::object();
    for (const auto& [type, prf] : score.entities_by_type) {
        by_etype[type] = prf_counts_json(prf);
    }
    out["entities_by_type"] = by_etype;

    nlohmann::json by_rtype = nlohmann::json::object();
    for (const auto& [type, prf] : score.relations_by_type) {
        by_rtype[type] = prf_counts_json(prf);
    }
    out["relations_by_type"] = by_rtype;

    const auto& e = score.errors;
    out["errors"] = {
        {"entities",
         {{"boundary_incorrect", e.entity_boundary_incorrect},
          {"type_incorrect", e.entity_type_incorrect},
          {"boundary_rate", e.entity_boundary_rate()},
          {"type_rate", e.entity_type_rate()}}},
        {"chains",
         {{"contains_incorrect_entities", e.chain_contains_incorrect_entities},
          {"missing_entities", e.chain_missing_entities},
          {"contains_incorrect_rate", e.chain_contains_rate()},
          {"missing_rate", e.chain_missing_rate()}}},
        {"relations",
         {{"spurious_pair", e.relation_spurious_pair},
          {"wrong_relation_type", e.relation_wrong_relation_type},
          {"spurious_rate", e.relation_spurious_rate()},
          {"wrong_type_rate", e.relation_wrong_type_rate()}}},
        {"grounding",
         {{"boundary_incorrect", e.grounding_boundary_incorrect},
          {"type_incorrect", e.grounding_type_incorrect},
          {"boundary_rate", e.grounding_boundary_rate()},
          {"type_rate", e.grounding_type_rate()}}},
    };
    if (hallucination_rate) {
        out["hallucination_rate"] = *hallucination_rate;
    }
    return out;
}

} // namespace codemie::eval
