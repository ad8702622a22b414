#include "codemie/core/types.hpp"
#include "codemie/error.hpp"
#include "codemie/eval/errors.hpp"
#include "codemie/eval/report.hpp"
#include "codemie/io/config.hpp"
#include "codemie/io/corpus.hpp"
#include "codemie/io/manifest.hpp"
#include "codemie/knowledge/client.hpp"
#include "codemie/knowledge/pipeline.hpp"
#include "codemie/knowledge/review.hpp"
#include "codemie/parser/parser.hpp"
#include "codemie/templates/render.hpp"
#include "codemie/util/files.hpp"
#include "codemie/util/parallel.hpp"
#include "codemie/version.hpp"
#include "codemie/visual/embedding_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace codemie;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::optional<int> seed;
};

io::Config effective_config(const GlobalArgs& args) {
    if (args.config_path.empty()) {
        return io::Config{};
    }
    return io::load_config(args.config_path);
}

// Document ids become artifact file names; anything outside [A-Za-z0-9._-]
// is replaced so ids with spaces or separators stay usable.
std::string safe_filename(const std::string& id) {
    std::string out = id;
    for (char& c : out) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        if (!ok) {
            c = '_';
        }
    }
    return out;
}

std::map<std::string, std::string> artifact_names(const io::Corpus& corpus) {
    std::map<std::string, std::string> names;
    std::set<std::string> used;
    for (const auto& doc : corpus.documents) {
        const std::string name = safe_filename(doc.id);
        if (!used.insert(name).second) {
            throw DataError("document ids " + doc.id + " and another collide as file name " +
                            name);
        }
        names[doc.id] = name;
    }
    return names;
}

knowledge::GenerationConfig generation_config(const io::Config& config,
                                              const GlobalArgs& globals,
                                              const std::string& images_dir = {}) {
    knowledge::GenerationConfig gen;
    gen.model_name = config.model_name;
    gen.vision_model_name = config.vision_model_name;
    gen.temperature = config.temperature;
    gen.seed = globals.seed;
    gen.images_dir = images_dir;
    return gen;
}

std::unique_ptr<knowledge::CompletionClient> build_client(const io::Config& config) {
    knowledge::ClientConfig cc;
    cc.endpoint = config.endpoint;
    cc.cache_dir = config.cache_dir;
    return knowledge::make_client(cc);
}

json record_to_json(const core::AttributeRecord& record) {
    json values = json::array();
    for (const auto& [attr, value] : record.values) {
        values.push_back(json::array({attr, value}));
    }
    return {{"type", record.etype},
            {"values", values},
            {"provenance", std::string(core::provenance_name(record.provenance))}};
}

core::AttributeRecord record_from_json(const json& j) {
    core::AttributeRecord record;
    record.etype = j.at("type").get<std::string>();
    for (const auto& pair : j.at("values")) {
        if (!pair.is_array() || pair.size() != 2) {
            throw DataError("attribute values must be [attribute, value] pairs");
        }
        record.values.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
    if (auto it = j.find("provenance"); it != j.end()) {
        record.provenance = core::provenance_from_name(it->get<std::string>());
    }
    return record;
}

using AttributeFile = std::map<std::string, std::vector<core::AttributeRecord>>;
using SceneGraphFile = std::map<std::string, std::vector<core::SceneGraph>>;

AttributeFile load_attribute_file(const fs::path& path) {
    AttributeFile out;
    std::istringstream stream(util::read_file(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const json j = json::parse(line);
            const std::string id = j.at("id").get<std::string>();
            std::vector<core::AttributeRecord> records;
            for (const auto& rec : j.at("records")) {
                records.push_back(record_from_json(rec));
            }
            if (!out.emplace(id, std::move(records)).second) {
                throw DataError("duplicate document id " + id);
            }
        } catch (const json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

SceneGraphFile load_scene_graph_file(const fs::path& path) {
    SceneGraphFile out;
    std::istringstream stream(util::read_file(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const json j = json::parse(line);
            const std::string id = j.at("id").get<std::string>();
            std::vector<core::SceneGraph> graphs;
            for (const auto& g : j.at("graphs")) {
                core::SceneGraph graph;
                graph.image_ref = g.at("image").get<std::string>();
                for (const auto& t : g.at("triples")) {
                    if (!t.is_array() || t.size() != 3) {
                        throw DataError("scene graph triples must be [subject, object, relation]");
                    }
                    graph.triples.push_back({t[0].get<std::string>(), t[1].get<std::string>(),
                                             t[2].get<std::string>()});
                }
                graphs.push_back(std::move(graph));
            }
            if (!out.emplace(id, std::move(graphs)).second) {
                throw DataError("duplicate document id " + id);
            }
        } catch (const json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

json stats_json(const io::CorpusStats& stats) {
    return {{"documents", stats.documents}, {"sentences", stats.sentences},
            {"entities", stats.entities},   {"chains", stats.chains},
            {"relations", stats.relations}, {"groundings", stats.groundings}};
}

json generation_stats_json(std::size_t documents, const knowledge::GenerationStats& stats) {
    return {{"documents", documents},
            {"requests", stats.requests},
            {"rows_kept", stats.rows_kept},
            {"skipped_lines", stats.skipped_lines},
            {"arity_dropped", stats.arity_dropped},
            {"failed_runs", stats.failed_runs},
            {"flagged", stats.flagged},
            {"dropped_no_name", stats.dropped_no_name},
            {"dropped_too_few", stats.dropped_too_few},
            {"dropped_duplicates", stats.dropped_duplicates}};
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& warning : warnings) {
        std::cerr << "warning: " << warning << "\n";
    }
}

void write_run_manifest(const std::string& command,
                        const io::Config& config,
                        const std::vector<fs::path>& inputs,
                        const fs::path& out_dir) {
    io::write_manifest(io::make_manifest(command, config, inputs), out_dir / "manifest.json");
}

struct ParsedCorpus {
    std::vector<io::Prediction> predictions;
    std::vector<parser::DeviationReport> reports;
};

// Reads <outputs>/<safe-id>.output.py for every document and parses it.
ParsedCorpus parse_model_outputs(const io::Corpus& corpus,
                                 const fs::path& outputs_dir,
                                 bool strict_strings,
                                 std::size_t max_concurrency,
                                 std::vector<fs::path>* consumed = nullptr) {
    const auto names = artifact_names(corpus);
    ParsedCorpus parsed;
    parsed.predictions.resize(corpus.documents.size());
    parsed.reports.resize(corpus.documents.size());

    std::vector<std::string> texts(corpus.documents.size());
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        const auto& doc = corpus.documents[i];
        const fs::path path = outputs_dir / (names.at(doc.id) + ".output.py");
        if (!fs::exists(path)) {
            throw DataError("no model output for document " + doc.id + ": " + path.string());
        }
        texts[i] = util::read_file(path);
        if (consumed) {
            consumed->push_back(path);
        }
    }
    util::parallel_for(corpus.documents.size(), max_concurrency, [&](std::size_t i) {
        const auto& doc = corpus.documents[i];
        parser::ParseOptions options;
        options.image_refs = doc.image_refs;
        options.strict_strings = strict_strings;
        options.document_id = doc.id;
        auto result = parser::parse_output(texts[i], corpus.schema, options);
        parsed.predictions[i] = {doc.id, std::move(result.annotations)};
        parsed.reports[i] = std::move(result.report);
    });
    return parsed;
}

json deviation_report_json(const parser::DeviationReport& report) {
    json deviations = json::array();
    for (const auto& d : report.deviations) {
        deviations.push_back({{"kind", parser::deviation_kind_name(d.kind)},
                              {"line", d.line},
                              {"detail", d.detail}});
    }
    json quarantine = json::array();
    for (const auto& q : report.quarantine) {
        quarantine.push_back({{"category", q.category}, {"line", q.line}, {"detail", q.detail}});
    }
    return {{"id", report.document_id}, {"deviations", deviations}, {"quarantine", quarantine}};
}

json hallucination_json(const std::vector<parser::DeviationReport>& reports,
                        const std::set<parser::DeviationKind>& kinds) {
    std::size_t flagged = 0;
    for (const auto& report : reports) {
        if (parser::has_hallucination(report, kinds)) {
            ++flagged;
        }
    }
    json out = {{"flagged", flagged}, {"total", reports.size()}};
    if (!reports.empty()) {
        out["hallucination_rate"] = eval::hallucination_rate(reports, kinds);
    }
    return out;
}

// Pairs gold documents with predictions by id; a document without a
// prediction scores against an empty annotation set.
eval::CorpusTally score_against(const io::Corpus& corpus,
                                const std::vector<io::Prediction>& predictions,
                                double grounding_threshold) {
    std::map<std::string, const core::AnnotationSet*> by_id;
    std::set<std::string> known;
    for (const auto& doc : corpus.documents) {
        known.insert(doc.id);
    }
    for (const auto& pred : predictions) {
        if (!known.count(pred.document_id)) {
            throw DataError("prediction for unknown document id " + pred.document_id);
        }
        if (!by_id.emplace(pred.document_id, &pred.annotations).second) {
            throw DataError("duplicate prediction for document id " + pred.document_id);
        }
    }
    eval::CorpusTally tally;
    const core::AnnotationSet empty;
    for (const auto& doc : corpus.documents) {
        if (!doc.gold) {
            throw DataError("document " + doc.id + " has no gold annotations to score against");
        }
        auto it = by_id.find(doc.id);
        const core::AnnotationSet& pred = it == by_id.end() ? empty : *it->second;
        tally.add_document(pred, *doc.gold, grounding_threshold);
    }
    tally.documents = corpus.documents.size();
    return tally;
}

int cmd_ingest(const GlobalArgs& globals,
               const std::string& input,
               const std::string& format,
               const std::string& schema_path,
               const std::string& split,
               const std::string& out_dir) {
    if (format != "jsonl") {
        throw DataError("no ingest adapter for format \"" + format + "\"; available: jsonl");
    }
    const auto config = effective_config(globals);
    const auto corpus = io::load_corpus(input, schema_path, io::split_from_name(split));

    const fs::path out(out_dir);
    io::save_corpus(corpus, out / "corpus.jsonl");
    io::save_schema(corpus.schema, out / "schema.json");
    std::vector<fs::path> inputs = {input};
    if (!schema_path.empty()) {
        inputs.push_back(schema_path);
    }
    write_run_manifest("ingest", config, inputs, out);
    std::cout << stats_json(io::corpus_stats(corpus)).dump(2) << "\n";
    return 0;
}

int cmd_gen_attrs(const GlobalArgs& globals,
                  const std::string& corpus_path,
                  const std::string& schema_path,
                  const std::string& out_dir) {
    const auto config = effective_config(globals);
    const auto corpus = io::load_corpus(corpus_path, schema_path);
    const auto client = build_client(config);
    const auto gen = generation_config(config, globals);

    std::vector<std::vector<core::AttributeRecord>> records(corpus.documents.size());
    std::vector<knowledge::GenerationStats> stats(corpus.documents.size());
    util::parallel_for(corpus.documents.size(), static_cast<std::size_t>(config.max_concurrency),
                       [&](std::size_t i) {
                           records[i] = knowledge::generate_attributes(
                               corpus.documents[i], corpus.schema, *client, gen, &stats[i]);
                       });

    std::string lines;
    knowledge::GenerationStats total;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        json recs = json::array();
        for (const auto& record : records[i]) {
            recs.push_back(record_to_json(record));
        }
        lines += json({{"id", corpus.documents[i].id}, {"records", recs}}).dump();
        lines += '\n';
        total.add(stats[i]);
    }
    const fs::path out(out_dir);
    util::write_file_atomic(out / "attributes.jsonl", lines);
    std::vector<fs::path> inputs = {corpus_path};
    if (!schema_path.empty()) {
        inputs.push_back(schema_path);
    }
    write_run_manifest("gen-attrs", config, inputs, out);
    print_warnings(total.warnings);
    std::cout << generation_stats_json(corpus.documents.size(), total).dump(2) << "\n";
    return 0;
}

int cmd_gen_sg(const GlobalArgs& globals,
               const std::string& corpus_path,
               const std::string& schema_path,
               const std::string& images_dir,
               const std::string& out_dir) {
    const auto config = effective_config(globals);
    const auto corpus = io::load_corpus(corpus_path, schema_path);
    const auto client = build_client(config);
    const auto gen = generation_config(config, globals, images_dir);

    std::vector<std::vector<core::SceneGraph>> graphs(corpus.documents.size());
    std::vector<knowledge::GenerationStats> stats(corpus.documents.size());
    util::parallel_for(corpus.documents.size(), static_cast<std::size_t>(config.max_concurrency),
                       [&](std::size_t i) {
                           graphs[i] = knowledge::generate_scene_graphs(corpus.documents[i],
                                                                        *client, gen, &stats[i]);
                       });

    std::string lines;
    knowledge::GenerationStats total;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
        json gs = json::array();
        for (const auto& graph : graphs[i]) {
            json triples = json::array();
            for (const auto& t : graph.triples) {
                triples.push_back(json::array({t.subject, t.object, t.relation}));
            }
            gs.push_back({{"image", graph.image_ref}, {"triples", triples}});
        }
        lines += json({{"id", corpus.documents[i].id}, {"graphs", gs}}).dump();
        lines += '\n';
        total.add(stats[i]);
    }
    const fs::path out(out_dir);
    util::write_file_atomic(out / "scene_graphs.jsonl", lines);
    std::vector<fs::path> inputs = {corpus_path};
    if (!schema_path.empty()) {
        inputs.push_back(schema_path);
    }
    write_run_manifest("gen-sg", config, inputs, out);
    print_warnings(total.warnings);
    std::cout << generation_stats_json(corpus.documents.size(), total).dump(2) << "\n";
    return 0;
}

int cmd_review(const GlobalArgs& globals,
               const std::string& attrs_path,
               const std::string& schema_path,
               const std::string& out_dir) {
    const auto config = effective_config(globals);
    const auto schema = schema_path.empty() ? core::EntityTypeSchema::with_default_attributes()
                                            : io::load_schema(schema_path);
    const auto by_doc = load_attribute_file(attrs_path);

    // Decision lines come from stdin, one per line, consumed in document
    // order. EDIT lines refine the current record; KEEP/DROP move on.
    std::vector<knowledge::ReviewDecision> decisions;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(std::cin, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        try {
            decisions.push_back(knowledge::parse_decision(line));
        } catch (const DataError& e) {
            throw DataError("stdin:" + std::to_string(line_no) + ": " + e.what());
        }
    }

    const fs::path out(out_dir);
    fs::create_directories(out);
    const fs::path journal = out / "review_journal.jsonl";

    std::string lines;
    std::size_t cursor = 0;
    std::size_t kept = 0;
    std::size_t rejected = 0;
    for (const auto& [id, records] : by_doc) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            std::string shown = "{";
            for (std::size_t k = 0; k < records[i].values.size(); ++k) {
                shown += (k ? ", " : "") + records[i].values[k].first + ": " +
                         records[i].values[k].second;
            }
            shown += "}";
            std::cout << "[" << id << "/" << i << "] " << records[i].etype << " " << shown
                      << "\n";
        }
        // Slice off exactly the decisions this document's records consume:
        // every non-EDIT decision settles one record.
        std::size_t taken = 0;
        std::size_t decided = 0;
        while (cursor + taken < decisions.size() && decided < records.size()) {
            if (decisions[cursor + taken].kind != knowledge::DecisionKind::EDIT) {
                ++decided;
            }
            ++taken;
        }
        const std::vector<knowledge::ReviewDecision> slice(
            decisions.begin() + static_cast<std::ptrdiff_t>(cursor),
            decisions.begin() + static_cast<std::ptrdiff_t>(cursor + taken));
        cursor += taken;
        for (const auto& decision : slice) {
            knowledge::append_journal(journal, decision);
        }
        const auto result = knowledge::review_session(records, slice, schema);
        for (const auto& rejection : result.rejected_edits) {
            std::cerr << "warning: rejected edit in " << id << ": " << rejection << "\n";
        }
        rejected += result.rejected_edits.size();
        kept += result.records.size();
        json recs = json::array();
        for (const auto& record : result.records) {
            recs.push_back(record_to_json(record));
        }
        lines += json({{"id", id}, {"records", recs}}).dump();
        lines += '\n';
    }
    if (cursor < decisions.size()) {
        std::cerr << "warning: " << decisions.size() - cursor << " unused review decisions\n";
    }
    util::write_file_atomic(out / "attributes.reviewed.jsonl", lines);
    write_run_manifest("review", config, {attrs_path}, out);
    std::cout << json({{"records_out", kept}, {"rejected_edits", rejected}}).dump(2) << "\n";
    return 0;
}

int cmd_build(const GlobalArgs& globals,
              const std::string& corpus_path,
              const std::string& schema_path,
              const std::string& attrs_path,
              const std::string& sg_path,
              const std::string& out_dir,
              std::size_t max_images) {
    const auto config = effective_config(globals);
    const auto corpus = io::load_corpus(corpus_path, schema_path);
    const auto names = artifact_names(corpus);
    AttributeFile attrs;
    if (!attrs_path.empty()) {
        attrs = load_attribute_file(attrs_path);
    }
    SceneGraphFile graphs;
    if (!sg_path.empty()) {
        graphs = load_scene_graph_file(sg_path);
    }

    templates::TemplateOptions options;
    options.max_scene_graph_images = max_images;

    const fs::path out(out_dir);
    std::size_t gold_outputs = 0;
    std::size_t truncated = 0;
    static const std::vector<core::AttributeRecord> kNoRecords;
    static const std::vector<core::SceneGraph> kNoGraphs;
    for (const auto& doc : corpus.documents) {
        const auto ait = attrs.find(doc.id);
        const auto git = graphs.find(doc.id);
        const auto tmpl = templates::build_input_template(
            doc, ait == attrs.end() ? kNoRecords : ait->second,
            git == graphs.end() ? kNoGraphs : git->second, corpus.schema, options);
        truncated += tmpl.truncated_images;
        util::write_file_atomic(out / "templates" / (names.at(doc.id) + ".input.py"), tmpl.text);
        if (doc.gold) {
            const auto gold = templates::render_gold_output(*doc.gold, doc, corpus.schema);
            util::write_file_atomic(out / "gold" / (names.at(doc.id) + ".output.py"), gold.text);
            ++gold_outputs;
        }
    }
    std::vector<fs::path> inputs = {corpus_path};
    for (const auto& extra : {schema_path, attrs_path, sg_path}) {
        if (!extra.empty()) {
            inputs.push_back(extra);
        }
    }
    write_run_manifest("build", config, inputs, out);
    std::cout << json({{"documents", corpus.documents.size()},
                       {"templates", corpus.documents.size()},
                       {"gold_outputs", gold_outputs},
                       {"truncated_images", truncated}})
                     .dump(2)
              << "\n";
    return 0;
}

int cmd_fuse(const GlobalArgs& globals,
             const std::vector<std::string>& embedding_paths,
             const std::string& out_dir,
             bool as_json) {
    const auto config = effective_config(globals);
    const fs::path out(out_dir);
    fs::create_directories(out);
    json files = json::array();
    for (const auto& path : embedding_paths) {
        const auto emb = visual::load_embeddings(path);
        const auto fused = visual::fuse(emb, visual::sinusoidal_positions(emb.q, emb.d_g));
        const std::string stem = fs::path(path).stem().string();
        const fs::path target = out / (stem + (as_json ? ".fused.json" : ".fused.cmeb"));
        if (as_json) {
            visual::PatchEmbeddings flat;
            flat.q = fused.q;
            flat.n_p = 1;
            flat.d_g = fused.d_g;
            flat.data = fused.data;
            visual::save_embeddings_json(target, flat);
        } else {
            visual::save_fused(target, fused);
        }
        files.push_back({{"input", path},
                         {"output", target.string()},
                         {"q", emb.q},
                         {"n_p", emb.n_p},
                         {"d_g", emb.d_g}});
    }
    std::vector<fs::path> inputs(embedding_paths.begin(), embedding_paths.end());
    write_run_manifest("fuse", config, inputs, out);
    std::cout << json({{"files", files}}).dump(2) << "\n";
    return 0;
}

int cmd_parse(const GlobalArgs& globals,
              const std::string& corpus_path,
              const std::string& schema_path,
              const std::string& outputs_dir,
              const std::string& out_dir,
              bool strict_strings) {
    const auto config = effective_config(globals);
    const auto corpus = io::load_corpus(corpus_path, schema_path);
    std::vector<fs::path> consumed;
    const auto parsed =
        parse_model_outputs(corpus, outputs_dir, strict_strings,
                            static_cast<std::size_t>(config.max_concurrency), &consumed);

    const fs::path out(out_dir);
    io::save_predictions(parsed.predictions, out / "predictions.jsonl");

    json docs = json::array();
    for (const auto& report : parsed.reports) {
        docs.push_back(deviation_report_json(report));
    }
    json deviations = hallucination_json(parsed.reports, config.hallucination_kinds);
    deviations["documents"] = docs;
    util::write_file_atomic(out / "deviations.json", deviations.dump(2) + "\n");

    std::vector<fs::path> inputs = {corpus_path};
    if (!schema_path.empty()) {
        inputs.push_back(schema_path);
    }
    inputs.insert(inputs.end(), consumed.begin(), consumed.end());
    write_run_manifest("parse", config, inputs, out);

    json summary = {{"documents", corpus.documents.size()},
                    {"flagged", deviations["flagged"]},
                    {"predictions", (out / "predictions.jsonl").string()}};
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_score(const GlobalArgs& globals,
              const std::string& corpus_path,
              const std::string& schema_path,
              const std::string& predictions_path,
              const std::string& deviations_path,
              const std::string& out_dir) {
    const auto config = effective_config(globals);
    const auto corpus = io::load_corpus(corpus_path, schema_path);
    const auto predictions = io::load_predictions(predictions_path);
    const auto tally = score_against(corpus, predictions, config.grounding_threshold);

    std::optional<double> rate;
    if (!deviations_path.empty()) {
        json deviations;
        try {
            deviations = json::parse(util::read_file(deviations_path));
        } catch (const json::exception& e) {
            throw DataError(deviations_path + ": invalid JSON: " + e.what());
        }
        if (auto it = deviations.find("hallucination_rate"); it != deviations.end()) {
            rate = it->get<double>();
        }
    }
    const json report = eval::score_report_json(eval::finalize(tally), rate);
    std::cout << report.dump(2) << "\n";
    if (!out_dir.empty()) {
        const fs::path out(out_dir);
        util::write_file_atomic(out / "score.json", report.dump(2) + "\n");
        std::vector<fs::path> inputs = {corpus_path, predictions_path};
        if (!schema_path.empty()) {
            inputs.push_back(schema_path);
        }
        if (!deviations_path.empty()) {
            inputs.push_back(deviations_path);
        }
        write_run_manifest("score", config, inputs, out);
    }
    return 0;
}

int cmd_errors(const GlobalArgs& globals,
               const std::string& corpus_path,
               const std::string& schema_path,
               const std::string& predictions_path,
               const std::string& out_dir) {
    const auto config = effective_config(globals);
    const auto corpus = io::load_corpus(corpus_path, schema_path);
    const auto predictions = io::load_predictions(predictions_path);
    const auto tally = score_against(corpus, predictions, config.grounding_threshold);
    const json full = eval::score_report_json(eval::finalize(tally));
    const json report = {{"documents", corpus.documents.size()}, {"errors", full.at("errors")}};
    std::cout << report.dump(2) << "\n";
    if (!out_dir.empty()) {
        const fs::path out(out_dir);
        util::write_file_atomic(out / "errors.json", report.dump(2) + "\n");
        std::vector<fs::path> inputs = {corpus_path, predictions_path};
        if (!schema_path.empty()) {
            inputs.push_back(schema_path);
        }
        write_run_manifest("errors", config, inputs, out);
    }
    return 0;
}

int cmd_halluc(const GlobalArgs& globals,
               const std::string& corpus_path,
               const std::string& schema_path,
               const std::string& outputs_dir,
               const std::string& out_dir,
               bool strict_strings) {
    const auto config = effective_config(globals);
    const auto corpus = io::load_corpus(corpus_path, schema_path);
    const auto parsed = parse_model_outputs(corpus, outputs_dir, strict_strings,
                                            static_cast<std::size_t>(config.max_concurrency));
    // The rate over zero samples is undefined; surface that instead of 0/0.
    if (parsed.reports.empty()) {
        throw DataError("hallucination rate: corpus has no documents");
    }
    const json report = hallucination_json(parsed.reports, config.hallucination_kinds);
    std::cout << report.dump(2) << "\n";
    if (!out_dir.empty()) {
        const fs::path out(out_dir);
        util::write_file_atomic(out / "halluc.json", report.dump(2) + "\n");
        std::vector<fs::path> inputs = {corpus_path};
        if (!schema_path.empty()) {
            inputs.push_back(schema_path);
        }
        write_run_manifest("halluc", config, inputs, out);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"code-style multimodal information extraction toolkit"};
    app.set_version_flag("--version", std::string(kToolkitVersion));
    app.require_subcommand(1);

    GlobalArgs globals;
    app.add_option("--config", globals.config_path, "JSON config file")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", globals.seed, "Generation seed");

    int rc = 0;

    // ingest
    std::string in_input, in_format = "jsonl", in_schema, in_split = "test", in_out = "run";
    auto* ingest = app.add_subcommand("ingest", "Convert a dataset dump to interchange JSONL");
    ingest->add_option("--input", in_input, "Source file")->required()->check(CLI::ExistingFile);
    ingest->add_option("--format", in_format, "Source format (adapters: jsonl)");
    ingest->add_option("--schema", in_schema, "Schema JSON")->check(CLI::ExistingFile);
    ingest->add_option("--split", in_split, "train|dev|test");
    ingest->add_option("--out", in_out, "Output directory");
    ingest->callback(
        [&] { rc = cmd_ingest(globals, in_input, in_format, in_schema, in_split, in_out); });

    // gen-attrs
    std::string ga_corpus, ga_schema, ga_out = "run";
    auto* gen_attrs =
        app.add_subcommand("gen-attrs", "Generate entity attributes via the completion backend");
    gen_attrs->add_option("--corpus", ga_corpus, "Corpus JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    gen_attrs->add_option("--schema", ga_schema, "Schema JSON")->check(CLI::ExistingFile);
    gen_attrs->add_option("--out", ga_out, "Output directory");
    gen_attrs->callback([&] { rc = cmd_gen_attrs(globals, ga_corpus, ga_schema, ga_out); });

    // gen-sg
    std::string gs_corpus, gs_schema, gs_images, gs_out = "run";
    auto* gen_sg =
        app.add_subcommand("gen-sg", "Generate per-image scene graphs via the vision backend");
    gen_sg->add_option("--corpus", gs_corpus, "Corpus JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    gen_sg->add_option("--schema", gs_schema, "Schema JSON")->check(CLI::ExistingFile);
    gen_sg->add_option("--images-dir", gs_images, "Directory with image files");
    gen_sg->add_option("--out", gs_out, "Output directory");
    gen_sg->callback([&] { rc = cmd_gen_sg(globals, gs_corpus, gs_schema, gs_images, gs_out); });

    // review
    std::string rv_attrs, rv_schema, rv_out = "run";
    auto* review =
        app.add_subcommand("review", "Curate generated attributes (decisions on stdin)");
    review->add_option("--attrs", rv_attrs, "attributes.jsonl")
        ->required()
        ->check(CLI::ExistingFile);
    review->add_option("--schema", rv_schema, "Schema JSON")->check(CLI::ExistingFile);
    review->add_option("--out", rv_out, "Output directory");
    review->callback([&] { rc = cmd_review(globals, rv_attrs, rv_schema, rv_out); });

    // build
    std::string bd_corpus, bd_schema, bd_attrs, bd_sg, bd_out = "run";
    std::size_t bd_max_images = 32;
    auto* build =
        app.add_subcommand("build", "Render input templates and gold outputs per document");
    build->add_option("--corpus", bd_corpus, "Corpus JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    build->add_option("--schema", bd_schema, "Schema JSON")->check(CLI::ExistingFile);
    build->add_option("--attrs", bd_attrs, "attributes.jsonl")->check(CLI::ExistingFile);
    build->add_option("--sg", bd_sg, "scene_graphs.jsonl")->check(CLI::ExistingFile);
    build->add_option("--out", bd_out, "Output directory");
    build->add_option("--max-images", bd_max_images, "Scene-graph image cap per template");
    build->callback([&] {
        rc = cmd_build(globals, bd_corpus, bd_schema, bd_attrs, bd_sg, bd_out, bd_max_images);
    });

    // fuse
    std::vector<std::string> fu_embeddings;
    std::string fu_out = "run";
    bool fu_json = false;
    auto* fuse = app.add_subcommand("fuse", "Fuse patch embeddings into global visual features");
    fuse->add_option("--embeddings", fu_embeddings, "Embedding container files")
        ->required()
        ->check(CLI::ExistingFile);
    fuse->add_option("--out", fu_out, "Output directory");
    fuse->add_flag("--json", fu_json, "Write the JSON container variant");
    fuse->callback([&] { rc = cmd_fuse(globals, fu_embeddings, fu_out, fu_json); });

    // parse
    std::string pa_corpus, pa_schema, pa_outputs, pa_out = "run";
    bool pa_strict = false;
    auto* parse =
        app.add_subcommand("parse", "Parse model outputs into predictions + deviation reports");
    parse->add_option("--corpus", pa_corpus, "Corpus JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    parse->add_option("--schema", pa_schema, "Schema JSON")->check(CLI::ExistingFile);
    parse->add_option("--outputs", pa_outputs, "Directory of <id>.output.py files")
        ->required()
        ->check(CLI::ExistingDirectory);
    parse->add_option("--out", pa_out, "Output directory");
    parse->add_flag("--strict-strings", pa_strict, "Reject unquoted string values");
    parse->callback(
        [&] { rc = cmd_parse(globals, pa_corpus, pa_schema, pa_outputs, pa_out, pa_strict); });

    // score
    std::string sc_corpus, sc_schema, sc_predictions, sc_deviations, sc_out;
    auto* score = app.add_subcommand("score", "Score predictions against gold annotations");
    score->add_option("--corpus", sc_corpus, "Gold corpus JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    score->add_option("--schema", sc_schema, "Schema JSON")->check(CLI::ExistingFile);
    score->add_option("--predictions", sc_predictions, "predictions.jsonl")
        ->required()
        ->check(CLI::ExistingFile);
    score->add_option("--deviations", sc_deviations, "deviations.json to fold the rate in")
        ->check(CLI::ExistingFile);
    score->add_option("--out", sc_out, "Output directory (also prints to stdout)");
    score->callback([&] {
        rc = cmd_score(globals, sc_corpus, sc_schema, sc_predictions, sc_deviations, sc_out);
    });

    // errors
    std::string er_corpus, er_schema, er_predictions, er_out;
    auto* errors = app.add_subcommand("errors", "Error-type breakdown for predictions");
    errors->add_option("--corpus", er_corpus, "Gold corpus JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    errors->add_option("--schema", er_schema, "Schema JSON")->check(CLI::ExistingFile);
    errors->add_option("--predictions", er_predictions, "predictions.jsonl")
        ->required()
        ->check(CLI::ExistingFile);
    errors->add_option("--out", er_out, "Output directory");
    errors->callback(
        [&] { rc = cmd_errors(globals, er_corpus, er_schema, er_predictions, er_out); });

    // halluc
    std::string ha_corpus, ha_schema, ha_outputs, ha_out;
    bool ha_strict = false;
    auto* halluc = app.add_subcommand("halluc", "Hallucination rate over raw model outputs");
    halluc->add_option("--corpus", ha_corpus, "Corpus JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    halluc->add_option("--schema", ha_schema, "Schema JSON")->check(CLI::ExistingFile);
    halluc->add_option("--outputs", ha_outputs, "Directory of <id>.output.py files")
        ->required()
        ->check(CLI::ExistingDirectory);
    halluc->add_option("--out", ha_out, "Output directory");
    halluc->add_flag("--strict-strings", ha_strict, "Reject unquoted string values");
    halluc->callback([&] {
        rc = cmd_halluc(globals, ha_corpus, ha_schema, ha_outputs, ha_out, ha_strict);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
