#include <doctest.h>

#include "../support/fixtures.hpp"
#include "topoprune/errors.hpp"
#include "topoprune/neighbors.hpp"

using namespace topoprune;

TEST_CASE("points on a line") {
    const auto g = knn_graph(Matrix(3, 1, {0, 1, 3}), 1, Metric::euclidean);
    CHECK(g.indices == std::vector<index_t>{1, 0, 1});
    CHECK(g.distances == std::vector<double>{1, 1, 2});
}

TEST_CASE("collinear vectors are at cosine distance zero") {
    const auto g = knn_graph(Matrix(3, 2, {1, 0, 2, 0, 0, 1}), 1, Metric::cosine);
    CHECK(g.neighbor(0, 0) == 1);
    CHECK(g.distance(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("duplicate points break ties by index") {
    Matrix x = fixtures::uniform_cloud(6, 2, 8);
    x(5, 0) = x(2, 0);
    x(5, 1) = x(2, 1);
    const auto g = knn_graph(x, 1, Metric::euclidean);
    CHECK(g.neighbor(5, 0) == 2);
    CHECK(g.neighbor(2, 0) == 5);
}

TEST_CASE("zero rows sit at cosine distance one") {
    const Matrix x(2, 2, {0, 0, 1, 1});
    CHECK(row_distance(x.row(0), x.row(1), Metric::cosine) == 1.0);
    CHECK(row_distance(x.row(1), Matrix(1, 2, {-1, -1}).row(0), Metric::cosine) == doctest::Approx(2.0));
}

TEST_CASE("k must be below n") {
    const Matrix x(3, 1, {0, 1, 2});
    CHECK_THROWS_AS(knn_graph(x, 3, Metric::euclidean), ParameterError);
    CHECK_THROWS_AS(knn_graph(x, 0, Metric::euclidean), ParameterError);
}

TEST_CASE("rows exclude self, sorted, and permute with the input") {
    const Matrix x = fixtures::uniform_cloud(40, 5, 2, -1, 1);
    const auto g = knn_graph(x, 7, Metric::cosine);
    std::vector<index_t> perm(40);
    for (std::size_t i = 0; i < 40; ++i) perm[i] = static_cast<index_t>((i * 17 + 3) % 40);
    const auto gp = knn_graph(x.select_rows(perm), 7, Metric::cosine);
    std::vector<index_t> inverse(40);
    for (std::size_t i = 0; i < 40; ++i) inverse[static_cast<std::size_t>(perm[i])] = static_cast<index_t>(i);
    for (std::size_t i = 0; i < 40; ++i) {
        for (std::size_t s = 0; s < 7; ++s) {
            CHECK(g.neighbor(i, s) != static_cast<index_t>(i));
            if (s > 0) CHECK(g.distance(i, s - 1) <= g.distance(i, s));
            CHECK(g.distance(i, s) >= 0.0);
            CHECK(g.distance(i, s) <= 2.0);
        }
        const std::size_t pi = static_cast<std::size_t>(inverse[i]);
        for (std::size_t s = 0; s < 7; ++s) CHECK(perm[static_cast<std::size_t>(gp.neighbor(pi, s))] == g.neighbor(i, s));
    }
}

TEST_CASE("metric names") {
    CHECK(parse_metric("cosine") == Metric::cosine);
    CHECK(parse_metric("euclidean") == Metric::euclidean);
    CHECK_THROWS_AS(parse_metric("manhattan"), ConfigError);
}
