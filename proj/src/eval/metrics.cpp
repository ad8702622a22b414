#include "codemie/eval/metrics.hpp"

#include "codemie/core/normalize.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace codemie::eval {

namespace {

double safe_div(double num, double den) {
    return den > 0.0 ? num / den : 0.0;
}

double f1_of(double p, double r) {
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
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

std::vector<std::set<std::string>> mention_sets(const std::vector<core::EntityChain>& chains) {
    std::vector<std::set<std::string>> out;
    out.reserve(chains.size());
    for (const auto& chain : chains) {
        out.push_back(mention_set(chain));
    }
    return out;
}

// Mention -> index of the first chain containing it.
std::map<std::string, std::size_t> containing_chain(
    const std::vector<std::set<std::string>>& sets) {
    std::map<std::string, std::size_t> out;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (const auto& m : sets[i]) {
            out.emplace(m, i);
        }
    }
    return out;
}

std::size_t intersection_size(const std::set<std::string>& a, const std::set<std::string>& b) {
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    std::size_t n = 0;
    for (const auto& m : small) {
        n += large.count(m);
    }
    return n;
}

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    return std::any_of(small.begin(), small.end(),
                       [&](const std::string& m) { return large.count(m) > 0; });
}

// One side of the MUC rate: sum over `sets` of |s| - partitions(s, other).
void muc_side(const std::vector<std::set<std::string>>& sets,
              const std::vector<std::set<std::string>>& other,
              double& num,
              double& den) {
    const auto other_index = containing_chain(other);
    for (const auto& s : sets) {
        if (s.empty()) {
            continue;
        }
        std::set<std::size_t> blocks;
        std::size_t unassigned = 0;
        for (const auto& m : s) {
            auto it = other_index.find(m);
            if (it == other_index.end()) {
                ++unassigned;
            } else {
                blocks.insert(it->second);
            }
        }
        const double partitions = static_cast<double>(blocks.size() + unassigned);
        num += static_cast<double>(s.size()) - partitions;
        den += static_cast<double>(s.size()) - 1.0;
    }
}

double phi4(const std::set<std::string>& g, const std::set<std::string>& p) {
    const std::size_t total = g.size() + p.size();
    if (total == 0) {
        return 0.0;
    }
    return 2.0 * static_cast<double>(intersection_size(g, p)) / static_cast<double>(total);
}

std::pair<std::string, std::string> entity_key(const core::Entity& e) {
    return {core::normalize_surface(e.surface), e.etype};
}

// Chain id -> mention set, first occurrence of an id wins.
std::map<std::int64_t, std::set<std::string>> chain_sets_by_id(
    const std::vector<core::EntityChain>& chains) {
    std::map<std::int64_t, std::set<std::string>> out;
    for (const auto& chain : chains) {
        out.emplace(chain.id, mention_set(chain));
    }
    return out;
}

const std::set<std::string>& resolve_chain(
    const std::map<std::int64_t, std::set<std::string>>& by_id, std::int64_t id) {
    static const std::set<std::string> empty;
    auto it = by_id.find(id);
    return it == by_id.end() ? empty : it->second;
}

struct Box {
    double x1, y1, x2, y2;
};

Box clipped(const core::VisualRegion& r) {
    return {std::clamp(r.cx - r.w / 2.0, 0.0, 1.0), std::clamp(r.cy - r.h / 2.0, 0.0, 1.0),
            std::clamp(r.cx + r.w / 2.0, 0.0, 1.0), std::clamp(r.cy + r.h / 2.0, 0.0, 1.0)};
}

double area(const Box& b) {
    return std::max(0.0, b.x2 - b.x1) * std::max(0.0, b.y2 - b.y1);
}

} // namespace

PRF prf_from_counts(std::size_t tp, std::size_t pred_count, std::size_t gold_count) {
    PRF out;
    out.tp = tp;
    out.pred_count = pred_count;
    out.gold_count = gold_count;
    out.precision = safe_div(static_cast<double>(tp), static_cast<double>(pred_count));
    out.recall = safe_div(static_cast<double>(tp), static_cast<double>(gold_count));
    out.f1 = f1_of(out.precision, out.recall);
    return out;
}

PRF prf_from_rates(double precision, double recall) {
    PRF out;
    out.precision = precision;
    out.recall = recall;
    out.f1 = f1_of(precision, recall);
    return out;
}

void CountTally::add(const CountTally& other) {
    tp += other.tp;
    pred += other.pred;
    gold += other.gold;
}

PRF CountTally::prf() const {
    return prf_from_counts(tp, pred, gold);
}

void MucTally::add(const MucTally& other) {
    recall_num += other.recall_num;
    recall_den += other.recall_den;
    precision_num += other.precision_num;
    precision_den += other.precision_den;
}

PRF MucTally::prf() const {
    return prf_from_rates(safe_div(precision_num, precision_den),
                          safe_div(recall_num, recall_den));
}

void B3Tally::add(const B3Tally& other) {
    precision_sum += other.precision_sum;
    recall_sum += other.recall_sum;
    mentions += other.mentions;
}

PRF B3Tally::prf() const {
    const double n = static_cast<double>(mentions);
    return prf_from_rates(safe_div(precision_sum, n), safe_div(recall_sum, n));
}

void CeafTally::add(const CeafTally& other) {
    phi += other.phi;
    pred_chains += other.pred_chains;
    gold_chains += other.gold_chains;
}

PRF CeafTally::prf() const {
    return prf_from_rates(safe_div(phi, static_cast<double>(pred_chains)),
                          safe_div(phi, static_cast<double>(gold_chains)));
}

PRF score_entities(const std::vector<core::Entity>& pred, const std::vector<core::Entity>& gold) {
    return entity_tally(pred, gold).prf();
}

CountTally entity_tally(const std::vector<core::Entity>& pred,
                        const std::vector<core::Entity>& gold) {
    std::set<std::pair<std::string, std::string>> pred_set;
    std::set<std::pair<std::string, std::string>> gold_set;
    for (const auto& e : pred) {
        pred_set.insert(entity_key(e));
    }
    for (const auto& e : gold) {
        gold_set.insert(entity_key(e));
    }
    CountTally tally;
    tally.pred = pred_set.size();
    tally.gold = gold_set.size();
    for (const auto& key : pred_set) {
        tally.tp += gold_set.count(key);
    }
    return tally;
}

std::map<std::string, PRF> score_entities_by_type(const std::vector<core::Entity>& pred,
                                                  const std::vector<core::Entity>& gold) {
    std::set<std::string> types;
    for (const auto& e : pred) {
        types.insert(e.etype);
    }
    for (const auto& e : gold) {
        types.insert(e.etype);
    }
    std::map<std::string, PRF> out;
    for (const auto& type : types) {
        std::vector<core::Entity> p, g;
        std::copy_if(pred.begin(), pred.end(), std::back_inserter(p),
                     [&](const core::Entity& e) { return e.etype == type; });
        std::copy_if(gold.begin(), gold.end(), std::back_inserter(g),
                     [&](const core::Entity& e) { return e.etype == type; });
        out[type] = score_entities(p, g);
    }
    return out;
}

MucTally muc_tally(const std::vector<core::EntityChain>& pred,
                   const std::vector<core::EntityChain>& gold) {
    const auto pred_sets = mention_sets(pred);
    const auto gold_sets = mention_sets(gold);
    MucTally tally;
    muc_side(gold_sets, pred_sets, tally.recall_num, tally.recall_den);
    muc_side(pred_sets, gold_sets, tally.precision_num, tally.precision_den);
    return tally;
}

B3Tally b_cubed_tally(const std::vector<core::EntityChain>& pred,
                      const std::vector<core::EntityChain>& gold) {
    const auto pred_sets = mention_sets(pred);
    const auto gold_sets = mention_sets(gold);
    const auto gold_index = containing_chain(gold_sets);
    const auto pred_index = containing_chain(pred_sets);

    B3Tally tally;
    tally.mentions = gold_index.size();
    // An empty prediction scores zero; the singleton fallback below applies
    // only when some prediction exists.
    const bool pred_empty =
        std::all_of(pred_sets.begin(), pred_sets.end(),
                    [](const std::set<std::string>& s) { return s.empty(); });
    if (pred_empty) {
        return tally;
    }
    for (const auto& [mention, gi] : gold_index) {
        const auto& g = gold_sets[gi];
        auto it = pred_index.find(mention);
        if (it == pred_index.end()) {
            // Fallback singleton chain {mention}.
            tally.precision_sum += 1.0;
            tally.recall_sum += 1.0 / static_cast<double>(g.size());
            continue;
        }
        const auto& p = pred_sets[it->second];
        const double inter = static_cast<double>(intersection_size(p, g));
        tally.precision_sum += inter / static_cast<double>(p.size());
        tally.recall_sum += inter / static_cast<double>(g.size());
    }
    return tally;
}

CeafTally ceaf_e_tally(const std::vector<core::EntityChain>& pred,
                       const std::vector<core::EntityChain>& gold) {
    const auto pred_sets = mention_sets(pred);
    const auto gold_sets = mention_sets(gold);
    CeafTally tally;
    tally.pred_chains = pred_sets.size();
    tally.gold_chains = gold_sets.size();
    if (pred_sets.empty() || gold_sets.empty()) {
        return tally;
    }
    std::vector<std::vector<double>> sim(pred_sets.size(),
                                         std::vector<double>(gold_sets.size(), 0.0));
    for (std::size_t i = 0; i < pred_sets.size(); ++i) {
        for (std::size_t j = 0; j < gold_sets.size(); ++j) {
            sim[i][j] = phi4(gold_sets[j], pred_sets[i]);
        }
    }
    tally.phi = assignment_max_similarity(sim).first;
    return tally;
}

PRF muc(const std::vector<core::EntityChain>& pred, const std::vector<core::EntityChain>& gold) {
    return muc_tally(pred, gold).prf();
}

PRF b_cubed(const std::vector<core::EntityChain>& pred,
            const std::vector<core::EntityChain>& gold) {
    return b_cubed_tally(pred, gold).prf();
}

PRF ceaf_e(const std::vector<core::EntityChain>& pred,
           const std::vector<core::EntityChain>& gold) {
    return ceaf_e_tally(pred, gold).prf();
}

ChainScores score_chains_detailed(const std::vector<core::EntityChain>& pred,
                                  const std::vector<core::EntityChain>& gold) {
    ChainScores out;
    out.muc = muc(pred, gold);
    out.b_cubed = b_cubed(pred, gold);
    out.ceaf_e = ceaf_e(pred, gold);
    out.mean.precision = (out.muc.precision + out.b_cubed.precision + out.ceaf_e.precision) / 3.0;
    out.mean.recall = (out.muc.recall + out.b_cubed.recall + out.ceaf_e.recall) / 3.0;
    out.mean.f1 = (out.muc.f1 + out.b_cubed.f1 + out.ceaf_e.f1) / 3.0;
    return out;
}

PRF score_chains(const std::vector<core::EntityChain>& pred,
                 const std::vector<core::EntityChain>& gold) {
    return score_chains_detailed(pred, gold).mean;
}

std::vector<std::pair<int, int>> relation_match_pairs(
    const std::vector<core::RelationTriple>& pred,
    const std::vector<core::EntityChain>& pred_chains,
    const std::vector<core::RelationTriple>& gold,
    const std::vector<core::EntityChain>& gold_chains) {
    const auto pred_by_id = chain_sets_by_id(pred_chains);
    const auto gold_by_id = chain_sets_by_id(gold_chains);
    std::vector<bool> consumed(gold.size(), false);
    std::vector<std::pair<int, int>> matches;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const auto& p = pred[i];
        const auto& psub = resolve_chain(pred_by_id, p.subject_chain_id);
        const auto& pobj = resolve_chain(pred_by_id, p.object_chain_id);
        for (std::size_t j = 0; j < gold.size(); ++j) {
            if (consumed[j] || gold[j].rtype != p.rtype) {
                continue;
            }
            const auto& gsub = resolve_chain(gold_by_id, gold[j].subject_chain_id);
            const auto& gobj = resolve_chain(gold_by_id, gold[j].object_chain_id);
            if (intersects(psub, gsub) && intersects(pobj, gobj)) {
                consumed[j] = true;
                matches.emplace_back(static_cast<int>(i), static_cast<int>(j));
                break;
            }
        }
    }
    return matches;
}

CountTally relation_tally(const std::vector<core::RelationTriple>& pred,
                          const std::vector<core::EntityChain>& pred_chains,
                          const std::vector<core::RelationTriple>& gold,
                          const std::vector<core::EntityChain>& gold_chains) {
    CountTally tally;
    tally.tp = relation_match_pairs(pred, pred_chains, gold, gold_chains).size();
    tally.pred = pred.size();
    tally.gold = gold.size();
    return tally;
}

PRF score_relations(const std::vector<core::RelationTriple>& pred,
                    const std::vector<core::EntityChain>& pred_chains,
                    const std::vector<core::RelationTriple>& gold,
                    const std::vector<core::EntityChain>& gold_chains) {
    return relation_tally(pred, pred_chains, gold, gold_chains).prf();
}

std::map<std::string, PRF> score_relations_by_type(
    const std::vector<core::RelationTriple>& pred,
    const std::vector<core::EntityChain>& pred_chains,
    const std::vector<core::RelationTriple>& gold,
    const std::vector<core::EntityChain>& gold_chains) {
    std::set<std::string> types;
    for (const auto& r : pred) {
        types.insert(r.rtype);
    }
    for (const auto& r : gold) {
        types.insert(r.rtype);
    }
    std::map<std::string, PRF> out;
    for (const auto& type : types) {
        std::vector<core::RelationTriple> p, g;
        std::copy_if(pred.begin(), pred.end(), std::back_inserter(p),
                     [&](const core::RelationTriple& r) { return r.rtype == type; });
        std::copy_if(gold.begin(), gold.end(), std::back_inserter(g),
                     [&](const core::RelationTriple& r) { return r.rtype == type; });
        out[type] = score_relations(p, pred_chains, g, gold_chains);
    }
    return out;
}

double iou(const core::VisualRegion& a, const core::VisualRegion& b) {
    const Box ba = clipped(a);
    const Box bb = clipped(b);
    const double ix = std::min(ba.x2, bb.x2) - std::max(ba.x1, bb.x1);
    const double iy = std::min(ba.y2, bb.y2) - std::max(ba.y1, bb.y1);
    const double inter = std::max(0.0, ix) * std::max(0.0, iy);
    const double uni = area(ba) + area(bb) - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<std::pair<int, int>> grounding_match_pairs(
    const std::vector<core::VisualRegion>& pred,
    const std::vector<core::VisualRegion>& gold,
    double threshold) {
    struct Candidate {
        double overlap;
        int pi;
        int gi;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        for (std::size_t j = 0; j < gold.size(); ++j) {
            if (pred[i].image_ref != gold[j].image_ref || pred[i].rtype != gold[j].rtype) {
                continue;
            }
            const double overlap = iou(pred[i], gold[j]);
            if (overlap > threshold) {
                candidates.push_back({overlap, static_cast<int>(i), static_cast<int>(j)});
            }
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.overlap != b.overlap) {
            return a.overlap > b.overlap;
        }
        if (a.pi != b.pi) {
            return a.pi < b.pi;
        }
        return a.gi < b.gi;
    });
    std::vector<bool> pred_used(pred.size(), false);
    std::vector<bool> gold_used(gold.size(), false);
    std::vector<std::pair<int, int>> matches;
    for (const auto& c : candidates) {
        if (pred_used[static_cast<std::size_t>(c.pi)] ||
            gold_used[static_cast<std::size_t>(c.gi)]) {
            continue;
        }
        pred_used[static_cast<std::size_t>(c.pi)] = true;
        gold_used[static_cast<std::size_t>(c.gi)] = true;
        matches.emplace_back(c.pi, c.gi);
    }
    return matches;
}

CountTally grounding_tally(const std::vector<core::VisualRegion>& pred,
                           const std::vector<core::VisualRegion>& gold,
                           double threshold) {
    CountTally tally;
    tally.tp = grounding_match_pairs(pred, gold, threshold).size();
    tally.pred = pred.size();
    tally.gold = gold.size();
    return tally;
}

PRF score_grounding(const std::vector<core::VisualRegion>& pred,
                    const std::vector<core::VisualRegion>& gold,
                    double threshold) {
    return grounding_tally(pred, gold, threshold).prf();
}

std::pair<double, std::vector<int>> assignment_max_similarity(
    const std::vector<std::vector<double>>& sim) {
    const int rows = static_cast<int>(sim.size());
    if (rows == 0) {
        return {0.0, {}};
    }
    const int cols = static_cast<int>(sim[0].size());
    if (cols == 0) {
        return {0.0, std::vector<int>(static_cast<std::size_t>(rows), -1)};
    }
    const int n = std::max(rows, cols);
    const double kInf = std::numeric_limits<double>::infinity();

    // Hungarian method with potentials, minimizing -sim on an n x n matrix
    // padded with zeros.
    auto cost = [&](int i, int j) {
        if (i <= rows && j <= cols) {
            return -sim[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
        }
        return 0.0;
    };

    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
        std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
        do {
            used[static_cast<std::size_t>(j0)] = true;
            const int i0 = p[static_cast<std::size_t>(j0)];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    continue;
                }
                const double cur = cost(i0, j) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(static_cast<std::size_t>(rows), -1);
    double total = 0.0;
    for (int j = 1; j <= n; ++j) {
        const int i = p[static_cast<std::size_t>(j)];
        if (i >= 1 && i <= rows && j <= cols) {
            row_to_col[static_cast<std::size_t>(i - 1)] = j - 1;
            total += sim[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
        }
    }
    return {total, row_to_col};
}

} // namespace codemie::eval
