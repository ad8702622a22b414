#pragma once

#include "codemie/core/types.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace codemie::knowledge {

enum class DecisionKind { KEEP, DROP, EDIT };

struct ReviewDecision {
    DecisionKind kind;
    std::string field; // EDIT only; empty value removes the field
    std::string value;
};

struct ReviewResult {
    std::vector<core::AttributeRecord> records; // committed (REVIEWED) first, then undecided
    std::size_t decided = 0;                    // records consumed by KEEP or DROP
    std::vector<std::string> rejected_edits;
};

// Applies decisions sequentially: EDIT modifies the current record (and is
// rejected when the result violates record invariants), KEEP commits it with
// REVIEWED provenance, DROP discards it. Records beyond the decision stream
// pass through unchanged with GENERATED provenance.
ReviewResult review_session(const std::vector<core::AttributeRecord>& records,
                            const std::vector<ReviewDecision>& decisions,
                            const core::EntityTypeSchema& schema);

// Append-only JSONL journal so sessions can resume: one decision per line.
void append_journal(const std::filesystem::path& path, const ReviewDecision& decision);
std::vector<ReviewDecision> load_journal(const std::filesystem::path& path);

ReviewDecision parse_decision(const std::string& line);

} // namespace codemie::knowledge
