#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "codemie/error.hpp"
#include "codemie/util/files.hpp"
#include "codemie/visual/embedding_io.hpp"
#include "codemie/visual/features.hpp"

#include "temp_dir.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace codemie;
using namespace codemie::visual;
using doctest::Approx;

namespace {

PatchEmbeddings make_embeddings(std::size_t q, std::size_t n_p, std::size_t d_g,
                                unsigned seed = 7) {
    PatchEmbeddings emb;
    emb.q = q;
    emb.n_p = n_p;
    emb.d_g = d_g;
    emb.data.resize(q * n_p * d_g);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> dist(-2.0f, 2.0f);
    for (auto& v : emb.data) {
        v = dist(rng);
    }
    return emb;
}

} // namespace

TEST_CASE("position encoding shape and first row") {
    const std::size_t q = 5;
    const std::size_t d_g = 8;
    const auto pos = sinusoidal_positions(q, d_g);
    REQUIRE(pos.size() == q * d_g);

    // index 0 encodes as alternating sin(0), cos(0)
    for (std::size_t k = 0; k < d_g / 2; ++k) {
        CHECK(pos[2 * k] == Approx(0.0f));
        CHECK(pos[2 * k + 1] == Approx(1.0f));
    }
    for (const float v : pos) {
        CHECK(v >= -1.0f);
        CHECK(v <= 1.0f);
    }

    // explicit formula spot-check for row 3
    for (std::size_t k = 0; k < d_g / 2; ++k) {
        const double rate = std::pow(10000.0, -2.0 * static_cast<double>(k) / 8.0);
        CHECK(pos[3 * d_g + 2 * k] == Approx(std::sin(3.0 * rate)).epsilon(1e-6));
        CHECK(pos[3 * d_g + 2 * k + 1] == Approx(std::cos(3.0 * rate)).epsilon(1e-6));
    }
}

TEST_CASE("position encoding distinguishes rows") {
    const auto pos = sinusoidal_positions(3, 16);
    bool row1_differs_row2 = false;
    for (std::size_t d = 0; d < 16; ++d) {
        if (pos[1 * 16 + d] != pos[2 * 16 + d]) {
            row1_differs_row2 = true;
        }
    }
    CHECK(row1_differs_row2);
}

TEST_CASE("position encoding rejects bad shapes") {
    CHECK_THROWS_AS(sinusoidal_positions(0, 8), DataError);
    CHECK_THROWS_AS(sinusoidal_positions(2, 7), DataError);
    CHECK_THROWS_AS(sinusoidal_positions(2, 0), DataError);
}

TEST_CASE("fusion is patch mean plus position row") {
    SUBCASE("constant patches with zero positions reproduce the constant") {
        PatchEmbeddings emb;
        emb.q = 2;
        emb.n_p = 5;
        emb.d_g = 4;
        emb.data.assign(2 * 5 * 4, 1.5f);
        const std::vector<float> zeros(2 * 4, 0.0f);
        const auto fused = fuse(emb, zeros);
        CHECK(fused.q == 2);
        CHECK(fused.d_g == 4);
        for (const float v : fused.data) {
            CHECK(v == Approx(1.5f));
        }
    }
    SUBCASE("zero patches reproduce the positions") {
        PatchEmbeddings emb;
        emb.q = 3;
        emb.n_p = 2;
        emb.d_g = 6;
        emb.data.assign(3 * 2 * 6, 0.0f);
        const auto pos = sinusoidal_positions(3, 6 /* even */);
        const auto fused = fuse(emb, pos);
        for (std::size_t i = 0; i < fused.data.size(); ++i) {
            CHECK(fused.data[i] == Approx(pos[i]));
        }
    }
    SUBCASE("2x3x4 tensor against a direct double-loop oracle") {
        const auto emb = make_embeddings(2, 3, 4);
        const auto pos = sinusoidal_positions(2, 4);
        const auto fused = fuse(emb, pos);
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t d = 0; d < 4; ++d) {
                double sum = 0.0;
                for (std::size_t j = 0; j < 3; ++j) {
                    sum += emb.at(i, j, d);
                }
                const double want = sum / 3.0 + pos[i * 4 + d];
                CHECK(fused.at(i, d) == Approx(want).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("fusion input validation") {
    auto emb = make_embeddings(2, 3, 4);
    const auto pos = sinusoidal_positions(2, 4);

    SUBCASE("data size must match the declared shape") {
        emb.data.pop_back();
        CHECK_THROWS_AS(fuse(emb, pos), DataError);
    }
    SUBCASE("positions length must be q * d_g") {
        CHECK_THROWS_AS(fuse(emb, std::vector<float>(7, 0.0f)), DataError);
    }
    SUBCASE("non-finite patch values are rejected") {
        emb.data[5] = std::numeric_limits<float>::quiet_NaN();
        CHECK_THROWS_AS(fuse(emb, pos), DataError);
        emb.data[5] = std::numeric_limits<float>::infinity();
        CHECK_THROWS_AS(fuse(emb, pos), DataError);
    }
    SUBCASE("non-finite position values are rejected") {
        auto bad = pos;
        bad[0] = std::numeric_limits<float>::quiet_NaN();
        CHECK_THROWS_AS(fuse(emb, bad), DataError);
    }
}

TEST_CASE("embedding containers round-trip") {
    testutil::TempDir dir;
    const auto emb = make_embeddings(3, 4, 6);

    SUBCASE("binary") {
        const auto path = dir / "emb.cmeb";
        save_embeddings_binary(path, emb);
        const auto loaded = load_embeddings(path);
        CHECK(loaded.q == emb.q);
        CHECK(loaded.n_p == emb.n_p);
        CHECK(loaded.d_g == emb.d_g);
        CHECK(loaded.data == emb.data); // bit-exact
    }
    SUBCASE("json") {
        const auto path = dir / "emb.json";
        save_embeddings_json(path, emb);
        const auto loaded = load_embeddings(path);
        CHECK(loaded.q == emb.q);
        CHECK(loaded.data.size() == emb.data.size());
        for (std::size_t i = 0; i < emb.data.size(); ++i) {
            CHECK(loaded.data[i] == Approx(emb.data[i]).epsilon(1e-6));
        }
    }
    SUBCASE("format is sniffed, not taken from the extension") {
        const auto path = dir / "emb.bin"; // json content under a binary-ish name
        save_embeddings_json(path, emb);
        const auto loaded = load_embeddings(path);
        CHECK(loaded.q == emb.q);
    }
    SUBCASE("unrecognized content is rejected") {
        const auto path = dir / "junk";
        util::write_file_atomic(path, "neither magic nor json");
        CHECK_THROWS_AS(load_embeddings(path), DataError);
    }
    SUBCASE("trailing bytes after the tensor are rejected") {
        const auto path = dir / "emb.cmeb";
        save_embeddings_binary(path, emb);
        auto bytes = util::read_file(path);
        bytes += "xx";
        util::write_file_atomic(path, bytes);
        CHECK_THROWS_AS(load_embeddings(path), DataError);
    }
    SUBCASE("truncated tensor is rejected") {
        const auto path = dir / "emb.cmeb";
        save_embeddings_binary(path, emb);
        auto bytes = util::read_file(path);
        bytes.resize(bytes.size() - 3);
        util::write_file_atomic(path, bytes);
        CHECK_THROWS_AS(load_embeddings(path), DataError);
    }
    SUBCASE("missing file is rejected") {
        CHECK_THROWS_AS(load_embeddings(dir / "absent.cmeb"), DataError);
    }
}

TEST_CASE("fused output is stored as a single-patch container") {
    testutil::TempDir dir;
    const auto emb = make_embeddings(2, 3, 4);
    const auto fused = fuse(emb, sinusoidal_positions(2, 4));

    const auto path = dir / "out.fused.cmeb";
    save_fused(path, fused);
    const auto loaded = load_embeddings(path);
    CHECK(loaded.q == fused.q);
    CHECK(loaded.n_p == 1);
    CHECK(loaded.d_g == fused.d_g);
    CHECK(loaded.data == fused.data);
}
