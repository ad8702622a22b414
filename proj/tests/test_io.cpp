#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "codemie/error.hpp"
#include "codemie/io/config.hpp"
#include "codemie/io/corpus.hpp"
#include "codemie/io/manifest.hpp"
#include "codemie/util/files.hpp"
#include "codemie/util/hash.hpp"
#include "codemie/util/parallel.hpp"

#include "generators.hpp"
#include "temp_dir.hpp"

#include <atomic>
#include <string>
#include <vector>

using namespace codemie;
using namespace codemie::io;
using doctest::Approx;

namespace {

std::string data_path(const std::string& relative) {
    return std::string(CODEMIE_DATA_DIR) + "/" + relative;
}

core::Document make_document() {
    core::Document doc;
    doc.id = "doc-9";
    doc.text = "Bob Hope was born in 1903 .";
    doc.language = core::Language::ZH;
    doc.image_refs = {"a.jpg", "b.jpg"};
    core::AnnotationSet gold;
    gold.entities = {{"Bob Hope", "PER"}, {"1903", "TIME"}};
    gold.chains = {{0, {"Bob Hope"}, "PER"}, {1, {"1903"}, "TIME"}};
    gold.relations = {{"born in", 0, 1}};
    gold.regions = {{"a.jpg", "PER", 0.5, 0.5, 0.4, 0.4}};
    doc.gold = gold;
    return doc;
}

} // namespace

TEST_CASE("split names round-trip") {
    CHECK(split_name(Split::TRAIN) == "train");
    CHECK(split_from_name("train") == Split::TRAIN);
    CHECK(split_from_name("DEV") == Split::DEV);
    CHECK(split_from_name("TEST") == Split::TEST);
    CHECK_THROWS_AS(split_from_name("Test"), DataError); // exact case only
    CHECK_THROWS_AS(split_from_name("validation"), DataError);
}

TEST_CASE("document json round-trip") {
    const auto doc = make_document();
    const auto j = document_to_json(doc);
    CHECK(j["id"] == "doc-9");
    CHECK(j["language"] == "zh");
    CHECK(j["image_refs"].size() == 2);
    CHECK(j["gold"]["entities"][0]["surface"] == "Bob Hope");
    CHECK(j["gold"]["relations"][0]["subject"] == 0);
    CHECK(j["gold"]["regions"][0]["image"] == "a.jpg");

    const auto back = document_from_json(j);
    CHECK(back == doc);

    core::Document bare;
    bare.id = "x";
    bare.text = "Text .";
    const auto bare_json = document_to_json(bare);
    CHECK_FALSE(bare_json.contains("gold"));
    CHECK(document_from_json(bare_json) == bare);
}

TEST_CASE("annotation json treats absent arrays as empty") {
    const auto empty = annotation_set_from_json(nlohmann::json::object());
    CHECK(empty.empty());

    const auto with_null = annotation_set_from_json({{"entities", nullptr}});
    CHECK(with_null.entities.empty());

    const auto j = annotation_set_to_json(core::AnnotationSet{});
    CHECK(j.contains("entities"));
    CHECK(j.contains("chains"));
    CHECK(j.contains("relations"));
    CHECK(j.contains("regions"));
}

TEST_CASE("schema json round-trip and rejection rules") {
    const auto schema = testgen::test_schema();
    const auto j = schema_to_json(schema);
    CHECK(j["entity_types"].size() == schema.types.size());
    CHECK(j["attributes"].contains("PER"));
    CHECK(j["relation_types"].size() == schema.relation_types.size());
    CHECK(schema_from_json(j) == schema);

    SUBCASE("attributes for an unknown type") {
        auto bad = j;
        bad["attributes"]["EVENT"] = {"name"};
        CHECK_THROWS_AS(schema_from_json(bad), DataError);
    }
    SUBCASE("duplicate entity types") {
        auto bad = j;
        bad["entity_types"].push_back("PER");
        CHECK_THROWS_AS(schema_from_json(bad), DataError);
    }
}

TEST_CASE("bundled corpus loads with the expected tallies") {
    const auto corpus = load_corpus(data_path("corpus/tiny3/corpus.jsonl"));
    CHECK(corpus.documents.size() == 3);
    // the adjacent schema.json is picked up automatically
    CHECK_FALSE(corpus.schema.relation_types.empty());

    const auto stats = corpus_stats(corpus);
    CHECK(stats == CorpusStats{3, 4, 8, 7, 3, 3});
}

TEST_CASE("corpus loader failure modes") {
    testutil::TempDir dir;
    const auto path = dir / "corpus.jsonl";

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_corpus(path), DataError);
    }
    SUBCASE("empty file yields an empty corpus") {
        util::write_file_atomic(path, "");
        CHECK(load_corpus(path).documents.empty());
    }
    SUBCASE("whitespace-only lines are skipped") {
        save_schema(testgen::test_schema(), dir / "schema.json");
        util::write_file_atomic(path, "\n  \n" + document_to_json(make_document()).dump() + "\n");
        CHECK(load_corpus(path).documents.size() == 1);
    }
    SUBCASE("invalid json names the line") {
        save_schema(testgen::test_schema(), dir / "schema.json");
        util::write_file_atomic(path, document_to_json(make_document()).dump() + "\n{oops\n");
        CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains(":2:"), DataError);
    }
    SUBCASE("duplicate document ids are rejected") {
        save_schema(testgen::test_schema(), dir / "schema.json");
        const auto line = document_to_json(make_document()).dump();
        util::write_file_atomic(path, line + "\n" + line + "\n");
        CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("duplicate"), DataError);
    }
    SUBCASE("invalid gold annotations name the document") {
        save_schema(testgen::test_schema(), dir / "schema.json");
        auto doc = make_document();
        doc.gold->entities.push_back({"", "PER"}); // empty surface is a hard violation
        util::write_file_atomic(path, document_to_json(doc).dump() + "\n");
        CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("doc-9"), DataError);
    }
    SUBCASE("without an adjacent schema the default types apply") {
        // the default schema has no relation vocabulary, so use a
        // relation-free document
        auto doc = make_document();
        doc.gold->relations.clear();
        util::write_file_atomic(path, document_to_json(doc).dump() + "\n");
        const auto corpus = load_corpus(path);
        CHECK(corpus.schema.has_type("PER"));
    }
    SUBCASE("an explicit schema path wins") {
        util::write_file_atomic(path, document_to_json(make_document()).dump() + "\n");
        const auto schema_path = dir / "other_schema.json";
        save_schema(testgen::test_schema(), schema_path);
        const auto corpus = load_corpus(path, schema_path);
        CHECK(corpus.schema == testgen::test_schema());
    }
}

TEST_CASE("corpus save and load round-trip") {
    testutil::TempDir dir;
    Corpus corpus;
    corpus.documents = {make_document()};
    corpus.schema = testgen::test_schema();
    corpus.split = Split::DEV;

    const auto path = dir / "c.jsonl";
    save_corpus(corpus, path);
    save_schema(corpus.schema, dir / "schema.json");

    const auto back = load_corpus(path, {}, Split::DEV);
    CHECK(back.documents == corpus.documents);
    CHECK(back.schema == corpus.schema);
    CHECK(back.split == Split::DEV);
}

TEST_CASE("predictions round-trip") {
    testutil::TempDir dir;
    const auto path = dir / "pred.jsonl";

    std::vector<Prediction> preds(2);
    preds[0].document_id = "doc-1";
    preds[0].annotations.entities = {{"Bob", "PER"}};
    preds[1].document_id = "doc-2";

    save_predictions(preds, path);
    const auto back = load_predictions(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].document_id == "doc-1");
    CHECK(back[0].annotations.entities == preds[0].annotations.entities);
    CHECK(back[1].annotations.empty());

    CHECK_THROWS_AS(load_predictions(dir / "absent.jsonl"), DataError);
}

TEST_CASE("sentence counting") {
    CHECK(count_sentences("") == 0);
    CHECK(count_sentences("One sentence .") == 1);
    CHECK(count_sentences("First . Second !") == 2);
    CHECK(count_sentences("Question ? Unterminated tail") == 2);
    CHECK(count_sentences("!!!") == 0);
    CHECK(count_sentences("张伟出生于北京。他是一名医生。") == 2);
    CHECK(count_sentences("中文！句子？") == 2);
    CHECK(count_sentences("   ") == 0);
}

TEST_CASE("config defaults and serialization") {
    const Config defaults;
    CHECK(defaults.endpoint == "mock:");
    CHECK(defaults.max_concurrency == 4);
    CHECK(defaults.grounding_threshold == 0.5);
    CHECK_NOTHROW(validate_config(defaults));

    const auto j = config_to_json(defaults);
    CHECK(j["endpoint"] == "mock:");
    CHECK(j["model"] == "text-model");
    CHECK(j["vision_model"] == "vision-model");
    CHECK(j["language"] == "en");
    CHECK(j["hallucination_kinds"].is_array());

    const auto back = config_from_json(j);
    CHECK(back.endpoint == defaults.endpoint);
    CHECK(back.hallucination_kinds == defaults.hallucination_kinds);
}

TEST_CASE("config parsing rules") {
    SUBCASE("partial configs keep defaults for missing fields") {
        const auto config = config_from_json({{"temperature", 0.2}});
        CHECK(config.temperature == Approx(0.2));
        CHECK(config.endpoint == "mock:");
    }
    SUBCASE("unknown keys are rejected") {
        CHECK_THROWS_WITH_AS(config_from_json({{"modle", "typo"}}),
                             doctest::Contains("unknown key"), DataError);
    }
    SUBCASE("api keys in config files are refused with a pointer to the env var") {
        CHECK_THROWS_WITH_AS(config_from_json({{"api_key", "sk-123"}}),
                             doctest::Contains("CODEMIE_API_KEY"), DataError);
        CHECK_THROWS_AS(config_from_json({{"token", "x"}}), DataError);
        CHECK_THROWS_AS(config_from_json({{"secret", "x"}}), DataError);
    }
    SUBCASE("bounds are enforced") {
        CHECK_THROWS_AS(config_from_json({{"grounding_threshold", 0.0}}), DataError);
        CHECK_THROWS_AS(config_from_json({{"grounding_threshold", 1.0}}), DataError);
        CHECK_THROWS_AS(config_from_json({{"max_concurrency", 0}}), DataError);
        CHECK_THROWS_AS(config_from_json({{"temperature", -0.1}}), DataError);
        CHECK_THROWS_AS(config_from_json({{"endpoint", ""}}), DataError);
    }
    SUBCASE("hallucination kinds parse by name") {
        const auto config =
            config_from_json({{"hallucination_kinds", {"PROSE_CONTAMINATION"}}});
        CHECK(config.hallucination_kinds.size() == 1);
        CHECK_THROWS_AS(config_from_json({{"hallucination_kinds", {"NOT_A_KIND"}}}),
                        DataError);
    }
    SUBCASE("type mismatches are rejected") {
        CHECK_THROWS_AS(config_from_json({{"temperature", "hot"}}), DataError);
        CHECK_THROWS_AS(config_from_json({{"max_concurrency", 1.5}}), DataError);
    }
}

TEST_CASE("config files load with path context") {
    testutil::TempDir dir;
    const auto path = dir / "config.json";
    util::write_file_atomic(path, "{\"temperature\": 0.3}\n");
    CHECK(load_config(path).temperature == Approx(0.3));

    util::write_file_atomic(path, "{nope");
    CHECK_THROWS_WITH_AS(load_config(path), doctest::Contains("config.json"), DataError);
    CHECK_THROWS_AS(load_config(dir / "absent.json"), DataError);
}

TEST_CASE("config hashing is stable and content-sensitive") {
    const Config defaults;
    CHECK(config_sha256(defaults) == config_sha256(Config{}));
    CHECK(config_sha256(defaults).size() == 64);

    Config other;
    other.temperature = 0.1;
    CHECK(config_sha256(other) != config_sha256(defaults));
}

TEST_CASE("run manifests record hashes, not timestamps") {
    testutil::TempDir dir;
    const auto input = dir / "input.txt";
    util::write_file_atomic(input, "payload");

    const Config config;
    const auto manifest = make_manifest("score", config, {input});
    CHECK(manifest.command == "score");
    CHECK(manifest.config_sha256 == config_sha256(config));
    REQUIRE(manifest.input_hashes.size() == 1);
    CHECK(manifest.input_hashes.begin()->second == util::sha256_hex("payload"));

    const auto j = manifest_to_json(manifest);
    const std::vector<std::string> keys = {"command", "toolkit_version", "config_sha256",
                                           "inputs"};
    CHECK(j.size() == keys.size());
    for (const auto& key : keys) {
        CHECK(j.contains(key));
    }
    CHECK(manifest_from_json(j) == manifest);

    const auto path = dir / "manifest.json";
    write_manifest(manifest, path);
    const auto first_bytes = util::read_file(path);
    write_manifest(manifest, path);
    CHECK(util::read_file(path) == first_bytes); // reruns are byte-identical
    CHECK(load_manifest(path) == manifest);
}

TEST_CASE("hashing utilities match known vectors") {
    CHECK(util::sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(util::sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

    CHECK(util::base64_encode("") == "");
    CHECK(util::base64_encode("f") == "Zg==");
    CHECK(util::base64_encode("fo") == "Zm8=");
    CHECK(util::base64_encode("foo") == "Zm9v");
    CHECK(util::base64_encode("foobar") == "Zm9vYmFy");

    testutil::TempDir dir;
    const auto path = dir / "f.bin";
    util::write_file_atomic(path, "abc");
    CHECK(util::sha256_file_hex(path) == util::sha256_hex("abc"));
}

TEST_CASE("file utilities") {
    testutil::TempDir dir;

    SUBCASE("atomic writes create parent directories") {
        const auto nested = dir.path / "a" / "b" / "f.txt";
        util::write_file_atomic(nested, "x");
        CHECK(util::read_file(nested) == "x");
    }
    SUBCASE("append_line adds a trailing newline") {
        const auto path = dir / "log.txt";
        util::append_line(path, "one");
        util::append_line(path, "two");
        CHECK(util::read_file(path) == "one\ntwo\n");
    }
    SUBCASE("read_file on a missing path is a data error") {
        CHECK_THROWS_AS(util::read_file(dir / "absent"), DataError);
    }
}

TEST_CASE("bounded parallel loop") {
    SUBCASE("covers every index with at most the requested workers") {
        std::vector<int> outputs(100, -1);
        std::atomic<int> active{0};
        std::atomic<int> peak{0};
        util::parallel_for(100, 4, [&](std::size_t i) {
            const int now = ++active;
            int snapshot = peak.load();
            while (now > snapshot && !peak.compare_exchange_weak(snapshot, now)) {
            }
            outputs[i] = static_cast<int>(i) * 2;
            --active;
        });
        for (int i = 0; i < 100; ++i) {
            CHECK(outputs[static_cast<std::size_t>(i)] == i * 2);
        }
        CHECK(peak.load() <= 4);
    }
    SUBCASE("the first worker exception reaches the caller") {
        CHECK_THROWS_AS(util::parallel_for(8, 3,
                                           [](std::size_t i) {
                                               if (i == 5) {
                                                   throw DataError("boom");
                                               }
                                           }),
                        DataError);
    }
    SUBCASE("zero items is a no-op") {
        bool ran = false;
        util::parallel_for(0, 4, [&](std::size_t) { ran = true; });
        CHECK_FALSE(ran);
    }
}
