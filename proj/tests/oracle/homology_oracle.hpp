#pragma once
// Brute-force persistence of small Rips complexes. Persistent Betti numbers
// beta^{i,j} = rank(H_k(K_i) -> H_k(K_j)) come from ranks of Z/2 boundary
// matrices; bar multiplicities follow by inclusion-exclusion on the grid of
// distinct edge lengths. Shares no code with the library's reduction.

#include <algorithm>
#include <bitset>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace oracle {

struct Bar {
    double birth;
    double death;  // +inf when essential
    auto operator<=>(const Bar&) const = default;
};

struct Diagram {
    std::vector<Bar> h0;
    std::vector<Bar> h1;
};

using Column = std::bitset<64>;

inline std::size_t rank_z2(std::vector<Column> rows) {
    std::size_t rank = 0;
    for (std::size_t bit = 0; bit < 64 && rank < rows.size(); ++bit) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && !rows[pivot][bit]) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && rows[r][bit]) rows[r] ^= rows[rank];
        }
        ++rank;
    }
    return rank;
}

/// points: n rows of d coordinates, n <= 8 so that C(n,2) <= 28 edges fit a column.
inline Diagram rips_diagram(const std::vector<std::vector<double>>& points) {
    const std::size_t n = points.size();
    const double inf = std::numeric_limits<double>::infinity();
    auto dist = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t c = 0; c < points[a].size(); ++c) {
            const double t = points[a][c] - points[b][c];
            s += t * t;
        }
        return std::sqrt(s);
    };

    struct E { std::size_t u, v; double len; };
    struct T { std::size_t e0, e1, e2; double val; };
    std::vector<E> edges;
    std::vector<std::vector<std::size_t>> edge_id(n, std::vector<std::size_t>(n));
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) {
            edge_id[u][v] = edges.size();
            edges.push_back({u, v, dist(u, v)});
        }
    std::vector<T> tris;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c) {
                const std::size_t e0 = edge_id[a][b], e1 = edge_id[a][c], e2 = edge_id[b][c];
                tris.push_back({e0, e1, e2, std::max({edges[e0].len, edges[e1].len, edges[e2].len})});
            }

    std::vector<double> grid{0.0};
    for (const auto& e : edges) grid.push_back(e.len);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const std::size_t m = grid.size();

    // rank of the vertex-edge boundary restricted to edges present at grid[j]
    auto rank_d1 = [&](std::size_t j) {
        std::vector<Column> cols;
        for (const auto& e : edges)
            if (e.len <= grid[j]) {
                Column c;
                c.set(e.u);
                c.set(e.v);
                cols.push_back(c);
            }
        return rank_z2(cols);
    };
    // rank of triangle boundaries at grid[j], optionally projected away from edges present at grid[i]
    auto rank_d2 = [&](std::size_t j, std::ptrdiff_t i) {
        std::vector<Column> cols;
        for (const auto& t : tris)
            if (t.val <= grid[j]) {
                Column c;
                for (std::size_t e : {t.e0, t.e1, t.e2})
                    if (i < 0 || edges[e].len > grid[static_cast<std::size_t>(i)]) c.set(e);
                cols.push_back(c);
            }
        return rank_z2(cols);
    };
    auto count_edges = [&](std::size_t j) {
        return static_cast<std::size_t>(
            std::count_if(edges.begin(), edges.end(), [&](const E& e) { return e.len <= grid[j]; }));
    };

    // beta[k][i][j] for i <= j
    std::vector<std::vector<long>> b0(m, std::vector<long>(m, 0)), b1(m, std::vector<long>(m, 0));
    std::vector<std::size_t> r1(m), ne(m);
    for (std::size_t j = 0; j < m; ++j) {
        r1[j] = rank_d1(j);
        ne[j] = count_edges(j);
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            b0[i][j] = static_cast<long>(n - r1[j]);
            const long cycles = static_cast<long>(ne[i] - r1[i]);
            const long bound_in_ki = static_cast<long>(rank_d2(j, -1)) -
                                     static_cast<long>(rank_d2(j, static_cast<std::ptrdiff_t>(i)));
            b1[i][j] = cycles - bound_in_ki;
        }

    auto bars = [&](const std::vector<std::vector<long>>& beta) {
        std::vector<Bar> out;
        auto at = [&](std::ptrdiff_t i, std::size_t j) { return i < 0 ? 0L : beta[static_cast<std::size_t>(i)][j]; };
        for (std::size_t i = 0; i < m; ++i) {
            const auto ii = static_cast<std::ptrdiff_t>(i);
            for (std::size_t j = i + 1; j < m; ++j) {
                const long mu = at(ii, j - 1) - at(ii, j) - at(ii - 1, j - 1) + at(ii - 1, j);
                for (long r = 0; r < mu; ++r) out.push_back({grid[i], grid[j]});
            }
            const long ess = at(ii, m - 1) - at(ii - 1, m - 1);
            for (long r = 0; r < ess; ++r) out.push_back({grid[i], inf});
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    return {bars(b0), bars(b1)};
}

}  // namespace oracle
