#pragma once

#include "codemie/core/types.hpp"

#include <string>
#include <vector>

namespace codemie::core {

enum class Severity { HARD, LINT };

struct Violation {
    Severity severity = Severity::HARD;
    std::string code;
    std::string message;

    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool has_hard_errors() const;
    size_t hard_count() const;
    size_t lint_count() const;
    bool empty() const { return violations.empty(); }
    std::string summary() const;

    bool operator==(const ValidationReport&) const = default;
};

// Pure and deterministic. Hard errors break the structural invariants
// (dangling ids, out-of-schema types, bad coordinates); lints flag
// inconsistencies that model outputs are allowed to have (a chain mention
// missing from the entity set).
ValidationReport validate_annotation_set(const AnnotationSet& ann,
                                         const Document& doc,
                                         const EntityTypeSchema& schema);

ValidationReport validate_document(const Document& doc, const EntityTypeSchema& schema);

// Empty when the record satisfies all AttributeRecord invariants.
std::vector<std::string> attribute_record_violations(const AttributeRecord& record,
                                                     const EntityTypeSchema& schema);

} // namespace codemie::core
