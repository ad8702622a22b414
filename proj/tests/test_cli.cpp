#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "codemie/util/files.hpp"
#include "codemie/visual/embedding_io.hpp"
#include "codemie/visual/features.hpp"

#include "temp_dir.hpp"

#include <json.hpp>

#include <cstdlib>
#include <string>
#include <sys/wait.h>

using nlohmann::json;
using codemie::util::read_file;
using codemie::util::write_file_atomic;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs the installed binary through the shell, capturing both streams.
RunResult run_cli(const std::string& args, const std::string& stdin_data = "") {
    static int counter = 0;
    const auto base = std::filesystem::temp_directory_path() /
                      ("codemie-cli-io-" + std::to_string(getpid()) + "-" +
                       std::to_string(counter++));
    const auto out_path = base.string() + ".out";
    const auto err_path = base.string() + ".err";
    const auto in_path = base.string() + ".in";
    write_file_atomic(in_path, stdin_data);

    const std::string command = std::string(CODEMIE_CLI_PATH) + " " + args + " < " + in_path +
                                " > " + out_path + " 2> " + err_path;
    const int status = std::system(command.c_str());

    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    std::filesystem::remove(out_path);
    std::filesystem::remove(err_path);
    std::filesystem::remove(in_path);
    return result;
}

std::string data_path(const std::string& relative) {
    return std::string(CODEMIE_DATA_DIR) + "/" + relative;
}

// Some commands print human-readable lines before their summary object;
// parse only the trailing pretty-printed JSON.
json last_json(const std::string& out) {
    const auto pos = out.rfind("\n{");
    return json::parse(pos == std::string::npos ? out : out.substr(pos + 1));
}

const std::string kTiny3 = data_path("corpus/tiny3/corpus.jsonl");

} // namespace

TEST_CASE("version and argument errors") {
    const auto version = run_cli("--version");
    CHECK(version.exit_code == 0);
    CHECK(version.out.find("0.1.0") != std::string::npos);

    CHECK(run_cli("").exit_code == 1);
    CHECK(run_cli("--no-such-flag").exit_code == 1);
    CHECK(run_cli("frobnicate").exit_code == 1);
    CHECK(run_cli("score --corpus " + kTiny3 + " --predictions /no/such/file.jsonl").exit_code ==
          1);
}

TEST_CASE("ingest reports corpus statistics and writes artifacts") {
    testutil::TempDir dir;
    const auto out = (dir / "run").string();
    const auto result = run_cli("ingest --input " + kTiny3 + " --out " + out);
    REQUIRE(result.exit_code == 0);

    const auto stats = json::parse(result.out);
    CHECK(stats["documents"] == 3);
    CHECK(stats["sentences"] == 4);
    CHECK(stats["entities"] == 8);
    CHECK(stats["chains"] == 7);
    CHECK(stats["relations"] == 3);
    CHECK(stats["groundings"] == 3);

    CHECK(std::filesystem::exists(out + "/corpus.jsonl"));
    CHECK(std::filesystem::exists(out + "/schema.json"));
    const auto manifest = json::parse(read_file(out + "/manifest.json"));
    CHECK(manifest["command"] == "ingest");
    CHECK(manifest["inputs"].size() >= 1);

    const auto unknown = run_cli("ingest --input " + kTiny3 + " --format csv --out " + out);
    CHECK(unknown.exit_code == 1);
    CHECK(unknown.err.find("no ingest adapter") != std::string::npos);
}

TEST_CASE("api keys are rejected in config files") {
    testutil::TempDir dir;
    const auto config = dir / "config.json";
    write_file_atomic(config, "{\"api_key\": \"sk-nope\"}\n");
    const auto result =
        run_cli("--config " + config.string() + " ingest --input " + kTiny3 + " --out " +
                (dir / "run").string());
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("CODEMIE_API_KEY") != std::string::npos);
}

TEST_CASE("template, parse, score round-trip on the bundled corpus") {
    testutil::TempDir dir;
    const auto build_out = (dir / "build").string();
    const auto built = run_cli("build --corpus " + kTiny3 + " --out " + build_out);
    REQUIRE(built.exit_code == 0);
    const auto build_stats = json::parse(built.out);
    CHECK(build_stats["templates"] == 3);
    CHECK(build_stats["gold_outputs"] == 3);

    SUBCASE("rendered artifacts are stable across reruns") {
        const auto first = read_file(build_out + "/templates/doc-001.input.py");
        const auto manifest_first = read_file(build_out + "/manifest.json");
        REQUIRE(run_cli("build --corpus " + kTiny3 + " --out " + build_out).exit_code == 0);
        CHECK(read_file(build_out + "/templates/doc-001.input.py") == first);
        CHECK(read_file(build_out + "/manifest.json") == manifest_first);
    }

    SUBCASE("parsing the gold renders scores perfectly") {
        const auto parse_out = (dir / "parse").string();
        const auto parsed = run_cli("parse --corpus " + kTiny3 + " --outputs " + build_out +
                                    "/gold --out " + parse_out);
        REQUIRE(parsed.exit_code == 0);
        const auto parse_stats = json::parse(parsed.out);
        CHECK(parse_stats["flagged"] == 0);
        CHECK(parse_stats["documents"] == 3);

        const auto deviations = json::parse(read_file(parse_out + "/deviations.json"));
        CHECK(deviations["total"] == 3);
        CHECK(deviations["hallucination_rate"] == 0.0);
        CHECK(deviations["documents"].size() == 3);

        const auto scored = run_cli("score --corpus " + kTiny3 + " --predictions " + parse_out +
                                    "/predictions.jsonl --deviations " + parse_out +
                                    "/deviations.json");
        REQUIRE(scored.exit_code == 0);
        const auto report = json::parse(scored.out);
        CHECK(report["entities"]["f1"] == 1.0);
        CHECK(report["chains"]["mean"]["f1"] == 1.0);
        CHECK(report["relations"]["f1"] == 1.0);
        CHECK(report["grounding"]["f1"] == 1.0);
        CHECK(report["hallucination_rate"] == 0.0);
        CHECK(report["documents"] == 3);

        const auto errors = run_cli("errors --corpus " + kTiny3 + " --predictions " + parse_out +
                                    "/predictions.jsonl");
        REQUIRE(errors.exit_code == 0);
        const auto error_report = json::parse(errors.out);
        CHECK(error_report["errors"]["entities"]["boundary_incorrect"] == 0);

        const auto halluc =
            run_cli("halluc --corpus " + kTiny3 + " --outputs " + build_out + "/gold");
        REQUIRE(halluc.exit_code == 0);
        CHECK(json::parse(halluc.out)["hallucination_rate"] == 0.0);
    }
}

TEST_CASE("generation is deterministic under the offline backend") {
    testutil::TempDir dir;
    const auto config = dir / "config.json";
    write_file_atomic(config, "{\"cache_dir\": \"" + (dir / "cache").string() + "\"}\n");

    const auto out_a = (dir / "a").string();
    const auto out_b = (dir / "b").string();
    const std::string base = "--config " + config.string() + " --seed 7 gen-attrs --corpus " +
                             kTiny3 + " --out ";
    REQUIRE(run_cli(base + out_a).exit_code == 0);
    REQUIRE(run_cli(base + out_b).exit_code == 0);
    CHECK(read_file(out_a + "/attributes.jsonl") == read_file(out_b + "/attributes.jsonl"));
    CHECK_FALSE(std::filesystem::is_empty(dir / "cache"));

    const auto stats = json::parse(run_cli(base + (dir / "c").string()).out);
    CHECK(stats["requests"] == 36); // 3 documents x 4 attribute types x 3 runs

    const auto sg_out = (dir / "sg").string();
    const auto sg = run_cli("--config " + config.string() + " --seed 7 gen-sg --corpus " +
                            kTiny3 + " --out " + sg_out);
    REQUIRE(sg.exit_code == 0);
    CHECK(json::parse(sg.out)["requests"] == 9); // 3 images across the corpus x 3 runs
    CHECK(std::filesystem::exists(sg_out + "/scene_graphs.jsonl"));
}

TEST_CASE("unreachable endpoints exit with the transport code") {
    testutil::TempDir dir;
    const auto config = dir / "config.json";
    write_file_atomic(config, "{\"endpoint\": \"http://127.0.0.1:1\"}\n");

    const auto corpus = dir / "one.jsonl";
    write_file_atomic(corpus,
                      "{\"id\": \"d1\", \"text\": \"Short .\", \"language\": \"en\"}\n");

    const auto result = run_cli("--config " + config.string() + " gen-attrs --corpus " +
                                corpus.string() + " --out " + (dir / "out").string());
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("transport error") != std::string::npos);
}

TEST_CASE("review applies stdin decisions and journals them") {
    testutil::TempDir dir;
    const auto attrs = dir / "attributes.jsonl";
    const json record_a = {{"type", "PER"},
                           {"values", json::array({json::array({"name", "Bob Hope"}),
                                                   json::array({"occupation", "ator"})})},
                           {"provenance", "GENERATED"}};
    const json record_b = {{"type", "PER"},
                           {"values", json::array({json::array({"name", "Mary"}),
                                                   json::array({"gender", "female"})})},
                           {"provenance", "GENERATED"}};
    const json line = {{"id", "doc-001"}, {"records", json::array({record_a, record_b})}};
    write_file_atomic(attrs, line.dump() + "\n");

    const auto out = (dir / "reviewed").string();
    const auto result = run_cli("review --attrs " + attrs.string() + " --out " + out,
                                "edit occupation=actor\nkeep\ndrop\n");
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.find("[doc-001/0] PER") != std::string::npos);
    const auto summary = last_json(result.out);
    CHECK(summary["records_out"] == 1);
    CHECK(summary["rejected_edits"] == 0);

    const auto reviewed = json::parse(read_file(out + "/attributes.reviewed.jsonl"));
    REQUIRE(reviewed["records"].size() == 1);
    CHECK(reviewed["records"][0]["provenance"] == "REVIEWED");
    bool found_edit = false;
    for (const auto& pair : reviewed["records"][0]["values"]) {
        if (pair[0] == "occupation") {
            CHECK(pair[1] == "actor");
            found_edit = true;
        }
    }
    CHECK(found_edit);

    const auto journal = read_file(out + "/review_journal.jsonl");
    CHECK(journal.find("EDIT") != std::string::npos);
    CHECK(journal.find("KEEP") != std::string::npos);
    CHECK(journal.find("DROP") != std::string::npos);
}

TEST_CASE("fuse matches the library computation") {
    testutil::TempDir dir;

    codemie::visual::PatchEmbeddings emb;
    emb.q = 2;
    emb.n_p = 3;
    emb.d_g = 4;
    emb.data.resize(24);
    for (std::size_t i = 0; i < emb.data.size(); ++i) {
        emb.data[i] = static_cast<float>(i) * 0.25f - 2.0f;
    }
    const auto input = dir / "patches.cmeb";
    codemie::visual::save_embeddings_binary(input, emb);

    const auto out = (dir / "fused").string();
    const auto result = run_cli("fuse --embeddings " + input.string() + " --out " + out);
    REQUIRE(result.exit_code == 0);
    const auto info = json::parse(result.out);
    CHECK(info["files"][0]["q"] == 2);
    CHECK(info["files"][0]["n_p"] == 3);
    CHECK(info["files"][0]["d_g"] == 4);

    const auto fused_file = codemie::visual::load_embeddings(out + "/patches.fused.cmeb");
    const auto expected =
        codemie::visual::fuse(emb, codemie::visual::sinusoidal_positions(emb.q, emb.d_g));
    CHECK(fused_file.q == expected.q);
    CHECK(fused_file.n_p == 1);
    CHECK(fused_file.data == expected.data);
}
