#include "codemie/core/validate.hpp"

#include "codemie/core/normalize.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

namespace codemie::core {

namespace {

void add(ValidationReport& report, Severity sev, std::string code, std::string message) {
    report.violations.push_back({sev, std::move(code), std::move(message)});
}

bool clipped_area_positive(const VisualRegion& r) {
    const double x1 = std::max(0.0, r.cx - r.w / 2.0);
    const double y1 = std::max(0.0, r.cy - r.h / 2.0);
    const double x2 = std::min(1.0, r.cx + r.w / 2.0);
    const double y2 = std::min(1.0, r.cy + r.h / 2.0);
    return x2 > x1 && y2 > y1;
}

} // namespace

bool ValidationReport::has_hard_errors() const {
    return std::any_of(violations.begin(), violations.end(),
                       [](const Violation& v) { return v.severity == Severity::HARD; });
}

size_t ValidationReport::hard_count() const {
    return static_cast<size_t>(std::count_if(violations.begin(), violations.end(), [](const Violation& v) {
        return v.severity == Severity::HARD;
    }));
}

size_t ValidationReport::lint_count() const {
    return violations.size() - hard_count();
}

std::string ValidationReport::summary() const {
    std::ostringstream out;
    for (const auto& v : violations) {
        out << (v.severity == Severity::HARD ? "error" : "warning") << ": " << v.code << ": "
            << v.message << "\n";
    }
    return out.str();
}

ValidationReport validate_annotation_set(const AnnotationSet& ann,
                                         const Document& doc,
                                         const EntityTypeSchema& schema) {
    ValidationReport report;

    std::set<std::pair<std::string, std::string>> entity_keys;
    for (const auto& entity : ann.entities) {
        if (entity.surface.empty()) {
            add(report, Severity::HARD, "empty entity surface", "entity of type " + entity.etype);
        }
        if (!schema.has_type(entity.etype)) {
            add(report, Severity::HARD, "entity type not in schema", entity.etype);
        }
        auto key = std::make_pair(normalize_surface(entity.surface), entity.etype);
        if (!entity_keys.insert(key).second) {
            add(report, Severity::HARD, "duplicate entity",
                entity.etype + " \"" + entity.surface + "\"");
        }
    }

    std::set<std::int64_t> chain_ids;
    std::set<std::int64_t> seen_ids;
    for (const auto& chain : ann.chains) {
        if (!seen_ids.insert(chain.id).second) {
            add(report, Severity::HARD, "duplicate chain id", std::to_string(chain.id));
        }
        chain_ids.insert(chain.id);
        if (chain.mentions.empty()) {
            add(report, Severity::HARD, "empty chain", "chain " + std::to_string(chain.id));
        }
        if (!schema.has_type(chain.ctype)) {
            add(report, Severity::HARD, "chain type not in schema",
                "chain " + std::to_string(chain.id) + ": " + chain.ctype);
        }
        std::set<std::string> mention_keys;
        for (const auto& mention : chain.mentions) {
            if (mention.empty()) {
                add(report, Severity::HARD, "empty mention", "chain " + std::to_string(chain.id));
                continue;
            }
            if (!mention_keys.insert(normalize_surface(mention)).second) {
                add(report, Severity::HARD, "duplicate mention in chain",
                    "chain " + std::to_string(chain.id) + ": \"" + mention + "\"");
            }
            auto key = std::make_pair(normalize_surface(mention), chain.ctype);
            if (entity_keys.find(key) == entity_keys.end()) {
                add(report, Severity::LINT, "chain mention not in entities",
                    "chain " + std::to_string(chain.id) + ": \"" + mention + "\" (" + chain.ctype + ")");
            }
        }
    }
    // Contiguity: ids must be exactly 0..n-1.
    if (!ann.chains.empty()) {
        const auto n = static_cast<std::int64_t>(ann.chains.size());
        bool contiguous = static_cast<std::int64_t>(seen_ids.size()) == n;
        for (std::int64_t i = 0; contiguous && i < n; ++i) {
            contiguous = seen_ids.count(i) > 0;
        }
        if (!contiguous) {
            add(report, Severity::HARD, "non-contiguous chain ids",
                "expected ids 0.." + std::to_string(n - 1));
        }
    }

    for (const auto& rel : ann.relations) {
        if (!schema.has_relation_type(rel.rtype)) {
            add(report, Severity::HARD, "relation type not in schema", rel.rtype);
        }
        for (std::int64_t id : {rel.subject_chain_id, rel.object_chain_id}) {
            if (chain_ids.find(id) == chain_ids.end()) {
                add(report, Severity::HARD, "dangling chain id",
                    rel.rtype + " references chain " + std::to_string(id));
            }
        }
    }

    const std::unordered_set<std::string> image_refs(doc.image_refs.begin(), doc.image_refs.end());
    for (const auto& region : ann.regions) {
        if (image_refs.find(region.image_ref) == image_refs.end()) {
            add(report, Severity::HARD, "region image not in document", region.image_ref);
        }
        if (!schema.has_type(region.rtype)) {
            add(report, Severity::HARD, "region type not in schema", region.rtype);
        }
        const bool centers_ok = region.cx >= 0.0 && region.cx <= 1.0 && region.cy >= 0.0 && region.cy <= 1.0;
        const bool extents_ok = region.w > 0.0 && region.w <= 1.0 && region.h > 0.0 && region.h <= 1.0;
        if (!centers_ok || !extents_ok) {
            add(report, Severity::HARD, "coordinate out of range",
                region.rtype + " on " + region.image_ref);
        } else if (!clipped_area_positive(region)) {
            add(report, Severity::HARD, "degenerate region",
                region.rtype + " on " + region.image_ref);
        }
    }

    return report;
}

ValidationReport validate_document(const Document& doc, const EntityTypeSchema& schema) {
    ValidationReport report;
    if (doc.id.empty()) {
        add(report, Severity::HARD, "empty document id", "");
    }
    if (doc.text.empty()) {
        add(report, Severity::HARD, "empty document text", doc.id);
    }
    std::set<std::string> refs;
    for (const auto& ref : doc.image_refs) {
        if (!refs.insert(ref).second) {
            add(report, Severity::HARD, "duplicate image ref", ref);
        }
    }
    if (doc.gold) {
        auto gold_report = validate_annotation_set(*doc.gold, doc, schema);
        report.violations.insert(report.violations.end(), gold_report.violations.begin(),
                                 gold_report.violations.end());
    }
    return report;
}

std::vector<std::string> attribute_record_violations(const AttributeRecord& record,
                                                     const EntityTypeSchema& schema) {
    std::vector<std::string> problems;
    if (!schema.has_type(record.etype)) {
        problems.push_back("type not in schema: " + record.etype);
    }
    const auto& allowed = schema.attributes_for(record.etype);
    std::set<std::string> seen;
    for (const auto& [attr, value] : record.values) {
        if (std::find(allowed.begin(), allowed.end(), attr) == allowed.end()) {
            problems.push_back("unknown attribute for type " + record.etype + ": " + attr);
        }
        if (!seen.insert(attr).second) {
            problems.push_back("duplicate attribute: " + attr);
        }
        if (is_not_mentioned(value)) {
            problems.push_back("sentinel value present: " + attr);
        }
    }
    const std::string* name = record.find("name");
    if (name == nullptr || normalize_surface(*name).empty()) {
        problems.push_back("missing name");
    }
    if (record.values.size() < 2) {
        problems.push_back("fewer than two attributes");
    }
    return problems;
}

} // namespace codemie::core
