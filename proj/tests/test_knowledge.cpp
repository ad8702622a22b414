#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "codemie/core/validate.hpp"
#include "codemie/error.hpp"
#include "codemie/knowledge/client.hpp"
#include "codemie/knowledge/pipeline.hpp"
#include "codemie/knowledge/prompts.hpp"
#include "codemie/knowledge/review.hpp"
#include "codemie/knowledge/tuples.hpp"
#include "codemie/util/files.hpp"

#include "generators.hpp"
#include "temp_dir.hpp"

#include <atomic>
#include <memory>
#include <random>
#include <string>
#include <vector>

using namespace codemie;
using namespace codemie::knowledge;

namespace {

const core::EntityTypeSchema kSchema = testgen::test_schema();

core::Document sample_document() {
    core::Document doc;
    doc.id = "doc-1";
    doc.text = "Bob Hope was born in 1903 .";
    doc.language = core::Language::EN;
    doc.image_refs = {"Img_1", "Img_2"};
    return doc;
}

RawTupleRow row(std::vector<std::string> values) {
    RawTupleRow out;
    out.values = std::move(values);
    return out;
}

} // namespace

TEST_CASE("attribute prompts carry text, type, attributes and sentinel") {
    const auto& attrs = kSchema.attributes_for("PER");
    const auto en = build_attribute_prompt("Bob Hope was born in 1903 .", "PER", attrs);
    CHECK(en.find("Bob Hope was born in 1903 .") != std::string::npos);
    CHECK(en.find("PER") != std::string::npos);
    CHECK(en.find("name, occupation") != std::string::npos);
    CHECK(en.find("not mentioned") != std::string::npos);
    CHECK(en.find("as many results as possible") != std::string::npos);
    CHECK(en.find("{}") == std::string::npos);

    const auto zh =
        build_attribute_prompt("张伟出生于北京。", "PER", attrs, core::Language::ZH);
    CHECK(zh.find("张伟出生于北京。") != std::string::npos);
    CHECK(zh.find("未提及") != std::string::npos);
    CHECK(zh.find("{}") == std::string::npos);

    CHECK_THROWS_AS(build_attribute_prompt("text", "MISC", {}), DataError);
}

TEST_CASE("scene graph prompt fixes the triple format") {
    const auto en = build_scene_graph_prompt();
    CHECK(en.find("(subject, object, relation)") != std::string::npos);
    const auto zh = build_scene_graph_prompt(core::Language::ZH);
    CHECK(zh.find("(subject, object, relation)") != std::string::npos);
    CHECK(zh.find("未提及") == std::string::npos);
}

TEST_CASE("tuple line parsing") {
    SUBCASE("rows, skipped lines, arity drops") {
        const auto parsed =
            parse_tuple_lines("(a, b)\nnot a tuple line\n(c, d, e)\n\n", 2);
        REQUIRE(parsed.rows.size() == 1);
        CHECK(parsed.rows[0].values == std::vector<std::string>{"a", "b"});
        CHECK(parsed.skipped_lines == 1);
        CHECK(parsed.arity_dropped == 1);
    }
    SUBCASE("no arity constraint keeps every row") {
        const auto parsed = parse_tuple_lines("(a, b)\n(c, d, e)\n");
        CHECK(parsed.rows.size() == 2);
        CHECK(parsed.arity_dropped == 0);
    }
    SUBCASE("values are trimmed and numbering prefixes ignored") {
        const auto parsed = parse_tuple_lines("1. ( Bob Hope ,  actor )\n", 2);
        REQUIRE(parsed.rows.size() == 1);
        CHECK(parsed.rows[0].values == std::vector<std::string>{"Bob Hope", "actor"});
    }
    SUBCASE("empty input") {
        const auto parsed = parse_tuple_lines("");
        CHECK(parsed.rows.empty());
        CHECK(parsed.skipped_lines == 0);
    }
}

TEST_CASE("row deduplication is whitespace-insensitive but case-sensitive") {
    const std::vector<RawTupleRow> rows = {row({"A", "b"}), row({"a", "b"}),
                                           row({" a ", "b"})};
    const auto unique = dedup_rows(rows);
    REQUIRE(unique.size() == 2);
    CHECK(unique[0].values[0] == "A");
    CHECK(unique[1].values[0] == "a");
}

TEST_CASE("triplicate protocol unions three runs") {
    SUBCASE("rows are united, deduplicated and stamped with their first run") {
        FunctionClient client([](const CompletionRequest& request) -> std::string {
            if (request.prompt == "run1") {
                return "(a, b)\n(c, d)\n";
            }
            if (request.prompt == "run2") {
                return "(a, b)\n(e, f)\n";
            }
            return "(g, h)\n";
        });
        const auto result = run_triplicate(
            [](int run) {
                CompletionRequest request;
                request.prompt = "run" + std::to_string(run);
                return request;
            },
            client, 2);
        REQUIRE(result.rows.size() == 4);
        CHECK(result.rows[0].values == std::vector<std::string>{"a", "b"});
        CHECK(result.rows[0].source_run == 1);
        CHECK(result.rows[2].values == std::vector<std::string>{"e", "f"});
        CHECK(result.rows[2].source_run == 2);
        CHECK(result.rows[3].source_run == 3);
        CHECK(result.failed_runs == 0);
    }
    SUBCASE("a failing run is absorbed with a warning") {
        FunctionClient client([](const CompletionRequest& request) -> std::string {
            if (request.prompt == "run2") {
                throw TransportError("socket reset");
            }
            return "(a, b)\n";
        });
        const auto result = run_triplicate(
            [](int run) {
                CompletionRequest request;
                request.prompt = "run" + std::to_string(run);
                return request;
            },
            client, 2);
        CHECK(result.rows.size() == 1);
        CHECK(result.failed_runs == 1);
        REQUIRE(result.warnings.size() == 1);
        CHECK(result.warnings[0].find("socket reset") != std::string::npos);
    }
    SUBCASE("all runs failing raises a transport error") {
        FunctionClient client(
            [](const CompletionRequest&) -> std::string { throw TransportError("down"); });
        CHECK_THROWS_AS(run_triplicate(
                            [](int) {
                                CompletionRequest request;
                                request.prompt = "x";
                                return request;
                            },
                            client, 2),
                        TransportError);
    }
}

TEST_CASE("attribute post-processing rules") {
    const auto& attrs = kSchema.attributes_for("PER"); // 7 attributes, name first
    const std::string nm = "not mentioned";

    SUBCASE("sentinel and empty values are stripped, survivors keep attribute order") {
        const auto result = postprocess_attributes(
            {row({"Bob Hope", "actor", "male", nm, nm, "", nm})}, "PER", attrs, kSchema);
        REQUIRE(result.records.size() == 1);
        const auto& record = result.records[0];
        CHECK(record.etype == "PER");
        CHECK(record.provenance == core::Provenance::GENERATED);
        REQUIRE(record.values.size() == 3);
        CHECK(record.values[0] == std::pair<std::string, std::string>{"name", "Bob Hope"});
        CHECK(record.values[1] == std::pair<std::string, std::string>{"occupation", "actor"});
        CHECK(record.values[2] == std::pair<std::string, std::string>{"gender", "male"});
    }
    SUBCASE("records without a name are dropped") {
        const auto result = postprocess_attributes(
            {row({nm, "actor", "male", nm, nm, nm, nm})}, "PER", attrs, kSchema);
        CHECK(result.records.empty());
        CHECK(result.dropped_no_name == 1);
    }
    SUBCASE("a lone name is not enough") {
        const auto result = postprocess_attributes(
            {row({"Bob Hope", nm, nm, nm, nm, nm, nm})}, "PER", attrs, kSchema);
        CHECK(result.records.empty());
        CHECK(result.dropped_too_few == 1);
    }
    SUBCASE("repeated rows collapse") {
        const auto result = postprocess_attributes(
            {row({"Bob Hope", "actor", nm, nm, nm, nm, nm}),
             row({"Bob  Hope", "actor", nm, nm, nm, nm, nm})},
            "PER", attrs, kSchema);
        CHECK(result.records.size() == 1);
        CHECK(result.dropped_duplicates == 1);
    }
    SUBCASE("a name colliding with a known entity of another type is flagged") {
        PostprocessOptions options;
        options.known_entities = {{"Luftwaffe", "ORG"}, {"Bob Hope", "PER"}};
        const auto result = postprocess_attributes(
            {row({"Bob Hope", "actor", nm, nm, nm, nm, nm}),
             row({"Luftwaffe", "pilot", nm, nm, nm, nm, nm})},
            "PER", attrs, kSchema, options);
        REQUIRE(result.records.size() == 2);
        REQUIRE(result.flagged.size() == 1);
        CHECK(result.flagged[0] == 1);
    }
    SUBCASE("schema violations are hard errors") {
        CHECK_THROWS_AS(
            postprocess_attributes({row({"a", "b"})}, "EVENT", {"name"}, kSchema),
            DataError);
        CHECK_THROWS_AS(
            postprocess_attributes({row({"a", "b"})}, "PER", {"name", "salary"}, kSchema),
            DataError);
        CHECK_THROWS_AS(postprocess_attributes({row({"a", "b"})}, "PER", attrs, kSchema),
                        DataError); // arity 2 vs 7 attributes
    }
    SUBCASE("every surviving record satisfies the record invariants") {
        std::mt19937 rng(20260814);
        std::uniform_int_distribution<int> pick(0, 3);
        const std::vector<std::string> pool = {"Bob", nm, "", "x y"};
        std::vector<RawTupleRow> rows;
        for (int i = 0; i < 200; ++i) {
            RawTupleRow r;
            for (std::size_t j = 0; j < attrs.size(); ++j) {
                r.values.push_back(pool[static_cast<std::size_t>(pick(rng))]);
            }
            rows.push_back(std::move(r));
        }
        const auto result = postprocess_attributes(rows, "PER", attrs, kSchema);
        for (const auto& record : result.records) {
            CHECK(core::attribute_record_violations(record, kSchema).empty());
        }
    }
}

TEST_CASE("scene graph post-processing") {
    const auto graph = postprocess_scene_graph(
        {row({"person", "boat", "stand"}), row({"person ", "boat", "stand"}),
         row({"mother", "infant", "hold"})},
        "Img_1");
    CHECK(graph.image_ref == "Img_1");
    REQUIRE(graph.triples.size() == 2);
    CHECK(graph.triples[0].subject == "person");
    CHECK(graph.triples[1].relation == "hold");

    CHECK_THROWS_AS(postprocess_scene_graph({row({"a", "b"})}, "Img_1"), DataError);
}

TEST_CASE("mock backend is deterministic and format-aware") {
    MockClient client;
    CompletionRequest request;
    request.prompt = build_attribute_prompt("text", "PER", kSchema.attributes_for("PER"));
    request.model_name = "text-model";

    const auto first = client.complete(request);
    const auto second = client.complete(request);
    CHECK(first == second);
    CHECK_FALSE(first.empty());

    const auto parsed = parse_tuple_lines(first, kSchema.attributes_for("PER").size());
    CHECK_FALSE(parsed.rows.empty());
    CHECK(parsed.arity_dropped == 0);

    CompletionRequest other = request;
    other.seed = 42;
    CHECK(client.complete(other) != first);

    CompletionRequest vision;
    vision.prompt = build_scene_graph_prompt();
    vision.images_b64 = {"aW1hZ2U="};
    const auto graph_text = client.complete(vision);
    const auto triples = parse_tuple_lines(graph_text, 3);
    CHECK_FALSE(triples.rows.empty());

    CompletionRequest formatless;
    formatless.prompt = "no tuple format here";
    CHECK(client.complete(formatless).empty());
}

TEST_CASE("caching client memoizes by request content") {
    testutil::TempDir dir;
    std::atomic<int> calls{0};
    auto inner = std::make_unique<FunctionClient>([&](const CompletionRequest&) {
        ++calls;
        return std::string("(a, b)\n");
    });
    CachingClient cached(std::move(inner), dir.path);

    CompletionRequest request;
    request.prompt = "p";
    request.model_name = "m";

    CHECK(cached.complete(request) == "(a, b)\n");
    CHECK(cached.complete(request) == "(a, b)\n");
    CHECK(calls.load() == 1);

    CompletionRequest other = request;
    other.temperature = 0.1;
    cached.complete(other);
    CHECK(calls.load() == 2);

    CHECK(CachingClient::cache_key(request) == CachingClient::cache_key(request));
    CHECK(CachingClient::cache_key(request) != CachingClient::cache_key(other));

    SUBCASE("a corrupt cache entry is a data error") {
        const auto key = CachingClient::cache_key(request);
        util::write_file_atomic(dir.path / (key + ".json"), "{broken");
        CHECK_THROWS_AS(cached.complete(request), DataError);
    }
}

TEST_CASE("client factory") {
    ClientConfig config;
    config.endpoint = "mock:";
    auto client = make_client(config);
    REQUIRE(client != nullptr);

    CompletionRequest request;
    request.prompt = build_scene_graph_prompt();
    CHECK_FALSE(client->complete(request).empty());

    SUBCASE("with a cache directory the mock is wrapped") {
        testutil::TempDir dir;
        config.cache_dir = dir.path.string();
        auto caching = make_client(config);
        const auto a = caching->complete(request);
        const auto b = caching->complete(request);
        CHECK(a == b);
        CHECK_FALSE(std::filesystem::is_empty(dir.path));
    }
}

TEST_CASE("http client reports unreachable endpoints as transport errors") {
    HttpClientConfig config;
    config.endpoint = "http://127.0.0.1:1";
    config.max_attempts = 1;
    config.backoff_ms = 1;
    config.timeout_sec = 1;
    HttpCompletionClient client(config);

    CompletionRequest request;
    request.prompt = "p";
    request.model_name = "m";
    CHECK_THROWS_AS(client.complete(request), TransportError);
}

TEST_CASE("attribute generation drives the triplicate protocol per type") {
    MockClient client;
    GenerationConfig config;
    config.seed = 7;
    GenerationStats stats;

    const auto doc = sample_document();
    const auto records = generate_attributes(doc, kSchema, client, config, &stats);

    CHECK(stats.requests == 12); // 4 attribute-bearing types x 3 runs
    CHECK_FALSE(records.empty());
    for (const auto& record : records) {
        CHECK(kSchema.has_type(record.etype));
        CHECK(record.provenance == core::Provenance::GENERATED);
        CHECK(core::attribute_record_violations(record, kSchema).empty());
    }

    GenerationStats again_stats;
    const auto again = generate_attributes(doc, kSchema, client, config, &again_stats);
    CHECK(again == records);
    CHECK(again_stats.requests == stats.requests);
    CHECK(again_stats.rows_kept == stats.rows_kept);
}

TEST_CASE("scene graph generation emits one graph per image in order") {
    MockClient client;
    GenerationConfig config;
    config.seed = 7;
    GenerationStats stats;

    const auto doc = sample_document();
    const auto graphs = generate_scene_graphs(doc, client, config, &stats);
    REQUIRE(graphs.size() == 2);
    CHECK(graphs[0].image_ref == "Img_1");
    CHECK(graphs[1].image_ref == "Img_2");
    CHECK_FALSE(graphs[0].triples.empty());
    CHECK(stats.requests == 6);

    core::Document no_images = doc;
    no_images.image_refs.clear();
    GenerationStats empty_stats;
    CHECK(generate_scene_graphs(no_images, client, config, &empty_stats).empty());
    CHECK(empty_stats.requests == 0);
}

TEST_CASE("generation stats accumulate") {
    GenerationStats a;
    a.requests = 3;
    a.rows_kept = 2;
    a.warnings = {"w1"};
    GenerationStats b;
    b.requests = 1;
    b.flagged = 4;
    b.warnings = {"w2"};
    a.add(b);
    CHECK(a.requests == 4);
    CHECK(a.rows_kept == 2);
    CHECK(a.flagged == 4);
    REQUIRE(a.warnings.size() == 2);
    CHECK(a.warnings[1] == "w2");
}

TEST_CASE("review session applies keep, drop and edit") {
    core::AttributeRecord first;
    first.etype = "PER";
    first.values = {{"name", "Bob Hope"}, {"occupation", "ator"}};
    core::AttributeRecord second;
    second.etype = "PER";
    second.values = {{"name", "Mary"}, {"gender", "female"}};
    core::AttributeRecord third;
    third.etype = "ORG";
    third.values = {{"name", "Acme"}, {"domain", "tools"}};

    SUBCASE("edit then keep, then drop; the tail passes through") {
        const std::vector<ReviewDecision> decisions = {
            {DecisionKind::EDIT, "occupation", "actor"},
            {DecisionKind::KEEP, {}, {}},
            {DecisionKind::DROP, {}, {}},
        };
        const auto result = review_session({first, second, third}, decisions, kSchema);
        REQUIRE(result.records.size() == 2);
        CHECK(result.decided == 2);
        CHECK(result.records[0].provenance == core::Provenance::REVIEWED);
        CHECK(*result.records[0].find("occupation") == "actor");
        CHECK(result.records[1].etype == "ORG");
        CHECK(result.records[1].provenance == core::Provenance::GENERATED);
        CHECK(result.rejected_edits.empty());
    }
    SUBCASE("an edit erasing the name is rejected and the record survives") {
        const std::vector<ReviewDecision> decisions = {
            {DecisionKind::EDIT, "name", ""},
            {DecisionKind::KEEP, {}, {}},
        };
        const auto result = review_session({first}, decisions, kSchema);
        REQUIRE(result.rejected_edits.size() == 1);
        REQUIRE(result.records.size() == 1);
        CHECK(*result.records[0].find("name") == "Bob Hope");
    }
    SUBCASE("an edit can remove a non-essential field") {
        core::AttributeRecord rich = first;
        rich.values.push_back({"gender", "male"});
        const std::vector<ReviewDecision> decisions = {
            {DecisionKind::EDIT, "gender", ""},
            {DecisionKind::KEEP, {}, {}},
        };
        const auto result = review_session({rich}, decisions, kSchema);
        CHECK(result.rejected_edits.empty());
        CHECK(result.records[0].find("gender") == nullptr);
    }
    SUBCASE("decisions beyond the record list are ignored") {
        const std::vector<ReviewDecision> decisions = {
            {DecisionKind::KEEP, {}, {}},
            {DecisionKind::KEEP, {}, {}},
            {DecisionKind::DROP, {}, {}},
        };
        const auto result = review_session({first}, decisions, kSchema);
        CHECK(result.records.size() == 1);
        CHECK(result.decided == 1);
    }
}

TEST_CASE("review journal round-trips decisions") {
    testutil::TempDir dir;
    const auto path = dir / "journal.jsonl";

    CHECK(load_journal(path).empty()); // missing file reads as empty

    append_journal(path, {DecisionKind::KEEP, {}, {}});
    append_journal(path, {DecisionKind::EDIT, "occupation", "actor"});
    append_journal(path, {DecisionKind::DROP, {}, {}});

    const auto loaded = load_journal(path);
    REQUIRE(loaded.size() == 3);
    CHECK(loaded[0].kind == DecisionKind::KEEP);
    CHECK(loaded[1].kind == DecisionKind::EDIT);
    CHECK(loaded[1].field == "occupation");
    CHECK(loaded[1].value == "actor");
    CHECK(loaded[2].kind == DecisionKind::DROP);

    util::append_line(path, "{not json");
    CHECK_THROWS_AS(load_journal(path), DataError);
}

TEST_CASE("interactive decision syntax") {
    CHECK(parse_decision("keep").kind == DecisionKind::KEEP);
    CHECK(parse_decision("K").kind == DecisionKind::KEEP);
    CHECK(parse_decision("drop").kind == DecisionKind::DROP);
    CHECK(parse_decision("d").kind == DecisionKind::DROP);

    const auto edit = parse_decision("edit occupation=actor");
    CHECK(edit.kind == DecisionKind::EDIT);
    CHECK(edit.field == "occupation");
    CHECK(edit.value == "actor");

    const auto spaced = parse_decision("edit marital status=married");
    CHECK(spaced.field == "marital status");
    CHECK(spaced.value == "married");

    CHECK_THROWS_AS(parse_decision("edit occupation"), DataError);
    CHECK_THROWS_AS(parse_decision("maybe"), DataError);
}
