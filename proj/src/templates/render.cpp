#include "codemie/templates/render.hpp"

#include "codemie/core/normalize.hpp"
#include "codemie/core/validate.hpp"
#include "codemie/error.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace codemie::templates {

namespace {

constexpr const char* kDocComment =
    "    \"\"\"first , extract entities from text .\n"
    "        second , extract entity chains base on entities .\n"
    "        third , extract entity chains relation based on entity chains .\n"
    "        fourth , inferring the visual area coordinate and type in the image based on the "
    "scene graph .\"\"\"\n";

constexpr const char* kTrailingComment =
    "    # extacted entities , entity chains , relations and visual areas\n";

void append_block_literal(std::ostream& out, const std::string& name, const std::string& payload) {
    out << "    " << name << " = ";
    if (payload.empty()) {
        out << "\"\"\n";
        return;
    }
    out << "\"\"\"\n";
    std::istringstream lines(payload);
    std::string line;
    while (std::getline(lines, line)) {
        out << "        " << line << "\n";
    }
    out << "        \"\"\"\n";
}

} // namespace

std::string quote_string(const std::string& value) {
    std::string out;
    out.reserve(value.size() + 2);
    out.push_back('"');
    for (char c : value) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

std::string format_float(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    return buf;
}

std::string serialize_entity_attributes(const std::vector<core::AttributeRecord>& records,
                                        const core::EntityTypeSchema& schema) {
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto problems = core::attribute_record_violations(records[i], schema);
        if (!problems.empty()) {
            throw DataError("attribute record " + std::to_string(i) + ": " + problems.front());
        }
    }
    std::ostringstream out;
    for (const auto& type : schema.types) {
        std::string line;
        for (const auto& record : records) {
            if (record.etype != type) {
                continue;
            }
            if (!line.empty()) {
                line += ", ";
            }
            line += "{";
            bool first = true;
            for (const auto& attr : schema.attributes_for(type)) {
                const std::string* value = record.find(attr);
                if (value == nullptr) {
                    continue;
                }
                if (!first) {
                    line += ", ";
                }
                line += attr + ": " + *value;
                first = false;
            }
            line += "}";
        }
        if (!line.empty()) {
            out << type << ": [" << line << "]\n";
        }
    }
    return out.str();
}

std::string serialize_scene_graphs(const std::vector<core::SceneGraph>& graphs) {
    std::ostringstream out;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        out << "Img_" << (i + 1) << ": [";
        bool first = true;
        for (const auto& triple : graphs[i].triples) {
            if (triple.subject.empty() || triple.object.empty() || triple.relation.empty()) {
                throw DataError("scene graph " + std::to_string(i + 1) +
                                ": empty subject, object or relation");
            }
            if (!first) {
                out << ", ";
            }
            out << "[" << triple.subject << ", " << triple.object << ", " << triple.relation << "]";
            first = false;
        }
        out << "]\n";
    }
    return out.str();
}

InputTemplate build_input_template(const core::Document& doc,
                                   const std::vector<core::AttributeRecord>& attrs,
                                   const std::vector<core::SceneGraph>& graphs,
                                   const core::EntityTypeSchema& schema,
                                   const TemplateOptions& options) {
    InputTemplate result;
    std::vector<core::SceneGraph> kept = graphs;
    if (kept.size() > options.max_scene_graph_images) {
        result.truncated_images = kept.size() - options.max_scene_graph_images;
        kept.resize(options.max_scene_graph_images);
    }

    std::ostringstream out;
    out << "def information_extraction(input_text, entity_attribute, scene_graph):\n";
    out << kDocComment;
    out << "    input_text = " << quote_string(doc.text) << "\n";
    append_block_literal(out, "entity_attribute", serialize_entity_attributes(attrs, schema));
    append_block_literal(out, "scene_graph", serialize_scene_graphs(kept));
    out << "    entity_dic = {}\n";
    out << "    chain_dic = {}\n";
    out << "    relation_dic = {}\n";
    out << "    grounding_dic = {}\n";
    out << kTrailingComment;
    result.text = out.str();
    return result;
}

OutputTemplate render_gold_output(const core::AnnotationSet& ann,
                                  const core::Document& doc,
                                  const core::EntityTypeSchema& schema) {
    auto report = core::validate_annotation_set(ann, doc, schema);
    if (report.has_hard_errors()) {
        throw DataError("annotation set failed validation:\n" + report.summary());
    }

    std::ostringstream out;

    for (const auto& type : schema.types) {
        std::string line;
        for (const auto& entity : ann.entities) {
            if (entity.etype != type) {
                continue;
            }
            if (!line.empty()) {
                line += ", ";
            }
            line += quote_string(entity.surface);
        }
        if (!line.empty()) {
            out << "entity_dic[" << quote_string(type) << "] = [" << line << "]\n";
        }
    }

    std::vector<const core::EntityChain*> chains;
    chains.reserve(ann.chains.size());
    for (const auto& chain : ann.chains) {
        chains.push_back(&chain);
    }
    std::sort(chains.begin(), chains.end(),
              [](const auto* a, const auto* b) { return a->id < b->id; });
    for (const auto* chain : chains) {
        out << "chain_dic[" << chain->id << "] = [[";
        for (std::size_t i = 0; i < chain->mentions.size(); ++i) {
            if (i > 0) {
                out << ", ";
            }
            out << quote_string(chain->mentions[i]);
        }
        out << "], " << quote_string(chain->ctype) << "]\n";
    }

    for (const auto& rtype : schema.relation_types) {
        std::string line;
        for (const auto& rel : ann.relations) {
            if (rel.rtype != rtype) {
                continue;
            }
            if (!line.empty()) {
                line += ", ";
            }
            line += "[" + std::to_string(rel.subject_chain_id) + ", " +
                    std::to_string(rel.object_chain_id) + "]";
        }
        if (!line.empty()) {
            out << "relation_dic[" << quote_string(rtype) << "] = [" << line << "]\n";
        }
    }

    for (std::size_t i = 0; i < doc.image_refs.size(); ++i) {
        std::string line;
        for (const auto& region : ann.regions) {
            if (region.image_ref != doc.image_refs[i]) {
                continue;
            }
            if (!line.empty()) {
                line += ", ";
            }
            line += "[" + quote_string(region.rtype) + ", " + format_float(region.cx) + ", " +
                    format_float(region.cy) + ", " + format_float(region.w) + ", " +
                    format_float(region.h) + "]";
        }
        if (!line.empty()) {
            out << "grounding_dic[" << quote_string("Img_" + std::to_string(i + 1)) << "] = ["
                << line << "]\n";
        }
    }

    return {out.str()};
}

} // namespace codemie::templates
