#include "codemie/knowledge/review.hpp"

#include "codemie/core/normalize.hpp"
#include "codemie/core/validate.hpp"
#include "codemie/error.hpp"
#include "codemie/util/files.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace codemie::knowledge {

namespace {

const char* kind_name(DecisionKind kind) {
    switch (kind) {
    case DecisionKind::KEEP: return "KEEP";
    case DecisionKind::DROP: return "DROP";
    case DecisionKind::EDIT: return "EDIT";
    }
    return "?";
}

core::AttributeRecord apply_edit(const core::AttributeRecord& record,
                                 const ReviewDecision& decision) {
    core::AttributeRecord edited = record;
    auto it = std::find_if(edited.values.begin(), edited.values.end(),
                           [&](const auto& kv) { return kv.first == decision.field; });
    const std::string value = core::normalize_surface(decision.value);
    if (value.empty()) {
        if (it != edited.values.end()) {
            edited.values.erase(it);
        }
    } else if (it != edited.values.end()) {
        it->second = value;
    } else {
        edited.values.emplace_back(decision.field, value);
    }
    return edited;
}

} // namespace

ReviewResult review_session(const std::vector<core::AttributeRecord>& records,
                            const std::vector<ReviewDecision>& decisions,
                            const core::EntityTypeSchema& schema) {
    ReviewResult result;
    std::size_t current = 0;
    core::AttributeRecord working;
    bool have_working = false;

    for (const auto& decision : decisions) {
        if (current >= records.size()) {
            break;
        }
        if (!have_working) {
            working = records[current];
            have_working = true;
        }
        switch (decision.kind) {
        case DecisionKind::EDIT: {
            auto edited = apply_edit(working, decision);
            if (core::attribute_record_violations(edited, schema).empty()) {
                working = std::move(edited);
            } else {
                result.rejected_edits.push_back("record " + std::to_string(current) + ": " +
                                                decision.field + "=" + decision.value);
            }
            break;
        }
        case DecisionKind::KEEP:
            working.provenance = core::Provenance::REVIEWED;
            result.records.push_back(working);
            ++current;
            ++result.decided;
            have_working = false;
            break;
        case DecisionKind::DROP:
            ++current;
            ++result.decided;
            have_working = false;
            break;
        }
    }
    for (std::size_t i = current; i < records.size(); ++i) {
        result.records.push_back(records[i]);
    }
    return result;
}

void append_journal(const std::filesystem::path& path, const ReviewDecision& decision) {
    nlohmann::json entry = {{"kind", kind_name(decision.kind)}};
    if (decision.kind == DecisionKind::EDIT) {
        entry["field"] = decision.field;
        entry["value"] = decision.value;
    }
    util::append_line(path, entry.dump());
}

std::vector<ReviewDecision> load_journal(const std::filesystem::path& path) {
    std::vector<ReviewDecision> out;
    std::ifstream in(path);
    if (!in) {
        return out;
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            const auto doc = nlohmann::json::parse(line);
            const std::string kind = doc.at("kind").get<std::string>();
            ReviewDecision decision;
            if (kind == "KEEP") {
                decision.kind = DecisionKind::KEEP;
            } else if (kind == "DROP") {
                decision.kind = DecisionKind::DROP;
            } else if (kind == "EDIT") {
                decision.kind = DecisionKind::EDIT;
                decision.field = doc.at("field").get<std::string>();
                decision.value = doc.at("value").get<std::string>();
            } else {
                throw DataError("unknown decision kind: " + kind);
            }
            out.push_back(std::move(decision));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("journal " + path.string() + " line " + std::to_string(line_no) +
                            ": " + e.what());
        }
    }
    return out;
}

ReviewDecision parse_decision(const std::string& line) {
    // "keep" | "drop" | "edit <field>=<value>"; field may contain spaces.
    std::string lowered = line;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered == "keep" || lowered == "k") {
        return {DecisionKind::KEEP, {}, {}};
    }
    if (lowered == "drop" || lowered == "d") {
        return {DecisionKind::DROP, {}, {}};
    }
    if (lowered.rfind("edit ", 0) == 0) {
        const std::string rest = line.substr(5);
        const auto eq = rest.find('=');
        if (eq == std::string::npos) {
            throw DataError("edit decision needs <field>=<value>: " + line);
        }
        return {DecisionKind::EDIT, rest.substr(0, eq), rest.substr(eq + 1)};
    }
    throw DataError("unknown review decision: " + line);
}

} // namespace codemie::knowledge
