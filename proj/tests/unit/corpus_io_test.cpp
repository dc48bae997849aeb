#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "topoprune/corpus_io.hpp"
#include "topoprune/errors.hpp"
#include "topoprune/rng.hpp"

using namespace topoprune;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("tp_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path operator/(const std::string& name) const { return path / name; }
};

void write_text(const fs::path& p, const std::string& body) { std::ofstream(p, std::ios::binary) << body; }

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

EmbeddingMatrix random_embeddings(std::size_t n, std::size_t d, std::uint64_t seed) {
    EmbeddingMatrix z{n, d, std::vector<float>(n * d)};
    auto rng = SplitMix64::keyed(seed, {});
    for (float& v : z.data) v = static_cast<float>(rng.normal() * 3.0);
    return z;
}

}  // namespace

TEST_CASE("csv body parses into matrix and labels") {
    TempDir dir;
    write_text(dir / "a.csv", "1.0,2.0,0\n3.0,4.0,1");
    const auto [z, labels] = load_embeddings(dir / "a.csv", EmbeddingFormat::csv);
    CHECK(z.n_samples == 2);
    CHECK(z.dim == 2);
    CHECK(z.data == std::vector<float>{1, 2, 3, 4});
    CHECK(labels.labels == std::vector<index_t>{0, 1});
    CHECK(labels.num_classes == 2);
}

TEST_CASE("csv rejects NaN, short rows and junk") {
    TempDir dir;
    write_text(dir / "nan.csv", "1.0,NaN,0\n");
    CHECK_THROWS_AS(load_embeddings(dir / "nan.csv", EmbeddingFormat::csv), DataError);
    write_text(dir / "short.csv", "1.0,2.0,0\n3.0,1\n");
    CHECK_THROWS_AS(load_embeddings(dir / "short.csv", EmbeddingFormat::csv), ShapeError);
    write_text(dir / "junk.csv", "1.0,abc,0\n");
    CHECK_THROWS_AS(load_embeddings(dir / "junk.csv", EmbeddingFormat::csv), FormatError);
    CHECK_THROWS_AS(load_embeddings(dir / "missing.csv", EmbeddingFormat::csv), IoError);
}

TEST_CASE("binary and csv round trips are bitwise exact") {
    TempDir dir;
    const auto z = random_embeddings(17, 5, 3);
    LabelVector labels{{0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1}, 3};
    for (const auto& [name, fmt] : {std::pair{"e.tprn", EmbeddingFormat::binary}, {"e.csv", EmbeddingFormat::csv}}) {
        save_embeddings(z, labels, dir / name, fmt);
        const auto [z2, l2] = load_embeddings(dir / name, fmt);
        CHECK(z2 == z);
        CHECK(l2 == labels);
    }
    CHECK(format_from_path("x.csv") == EmbeddingFormat::csv);
    CHECK(format_from_path("x.bin") == EmbeddingFormat::binary);
}

TEST_CASE("binary header is validated") {
    TempDir dir;
    write_text(dir / "bad.tprn", "XXXX\x01\0\0\0");
    CHECK_THROWS_AS(load_embeddings(dir / "bad.tprn", EmbeddingFormat::binary), FormatError);
    const auto z = random_embeddings(4, 3, 1);
    save_embeddings(z, {{0, 0, 1, 1}, 2}, dir / "ok.tprn", EmbeddingFormat::binary);
    std::string bytes = read_text(dir / "ok.tprn");
    CHECK(bytes.substr(0, 4) == "TPRN");
    CHECK(bytes.size() == 4 + 4 + 3 * 8 + 4 * 3 * 4 + 4 * 4);
    write_text(dir / "trunc.tprn", bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(load_embeddings(dir / "trunc.tprn", EmbeddingFormat::binary), DataError);
}

TEST_CASE("score file format") {
    TempDir dir;
    save_scores({{0.5, 0.25}, ScoreKind::density, false}, dir / "s.csv");
    CHECK(read_text(dir / "s.csv") == "0,0.5\n1,0.25\n");
    CHECK(load_score_values(dir / "s.csv", 2) == std::vector<double>{0.5, 0.25});
    CHECK_THROWS_AS(load_score_values(dir / "s.csv", 3), ShapeError);
    write_text(dir / "shuffled.csv", "1,7\n0,-2.5\n");
    CHECK(load_score_values(dir / "shuffled.csv", 2) == std::vector<double>{-2.5, 7});
    write_text(dir / "dup.csv", "0,1\n0,2\n");
    CHECK_THROWS_AS(load_score_values(dir / "dup.csv", 2), ShapeError);
}

TEST_CASE("coordinates round trip at full precision") {
    TempDir dir;
    Matrix y(3, 2, {0.1, -1e-300, 1.0 / 3.0, 12345.678901234567, -0.0, 2.0});
    LabelVector labels{{0, 1, 1}, 2};
    save_coordinates(y, labels, dir / "y.csv");
    const auto [y2, l2] = load_coordinates(dir / "y.csv");
    CHECK(y2 == y);
    CHECK(l2 == labels);
}

TEST_CASE("selection json round trip and precondition") {
    TempDir dir;
    SelectionResult r{{1, 4, 9}, 0.7, {{0, 2}, {1, 1}}};
    save_selection(r, dir / "sel.json");
    CHECK(load_selection(dir / "sel.json") == r);
    SelectionResult bad{{}, 1.5, {}};
    CHECK_THROWS_AS(save_selection(bad, dir / "bad.json"), ParameterError);
    CHECK_FALSE(fs::exists(dir / "bad.json"));
}

TEST_CASE("perturbation contract") {
    const auto z = random_embeddings(6, 1000, 11);
    CHECK(perturb_embeddings(z, 0.0, 5) == z);
    CHECK(perturb_embeddings(z, 1.0, 5) == perturb_embeddings(z, 1.0, 5));
    CHECK_FALSE(perturb_embeddings(z, 1.0, 5) == perturb_embeddings(z, 1.0, 6));

    EmbeddingMatrix flat{2, 3, {2, 2, 2, 1, 5, 9}};
    const auto noisy = perturb_embeddings(flat, 4.0, 1);
    CHECK(std::vector<float>(noisy.data.begin(), noisy.data.begin() + 3) == std::vector<float>{2, 2, 2});

    // c = 1: empirical std of the added noise is within 5% of the row std.
    const auto out = perturb_embeddings(z, 1.0, 9);
    for (std::size_t i = 0; i < z.n_samples; ++i) {
        double mean = 0, var = 0, nm = 0, nv = 0;
        for (std::size_t d = 0; d < z.dim; ++d) mean += z.row(i)[d];
        mean /= static_cast<double>(z.dim);
        for (std::size_t d = 0; d < z.dim; ++d) var += std::pow(z.row(i)[d] - mean, 2);
        const double sigma = std::sqrt(var / static_cast<double>(z.dim));
        for (std::size_t d = 0; d < z.dim; ++d) nm += static_cast<double>(out.row(i)[d]) - z.row(i)[d];
        nm /= static_cast<double>(z.dim);
        for (std::size_t d = 0; d < z.dim; ++d) nv += std::pow(static_cast<double>(out.row(i)[d]) - z.row(i)[d] - nm, 2);
        CHECK(std::sqrt(nv / static_cast<double>(z.dim)) == doctest::Approx(sigma).epsilon(0.05));
    }
}
