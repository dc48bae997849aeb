#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>

#include "topoprune/errors.hpp"
#include "topoprune/persistence.hpp"

namespace topoprune {

std::vector<Interval> PersistenceDiagram::intervals(int degree) const {
    std::vector<Interval> out;
    for (const auto& p : pairs) {
        if (p.degree == degree) out.push_back({p.birth, p.death});
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> PersistenceDiagram::essential_births(int degree) const {
    std::vector<double> out;
    for (const auto& p : essentials) {
        if (p.degree == degree) out.push_back(p.birth);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Filtration build_rips_filtration(const Matrix& points, double max_edge) {
    if (points.rows() == 0) throw ParameterError("rips filtration needs at least one point");
    if (std::isnan(max_edge) || max_edge < 0.0) throw ParameterError("max_edge must be nonnegative");
    Filtration f;
    f.n = points.rows();
    f.max_edge = max_edge;
    f.distances.assign(f.n * f.n, 0.0);
    for (std::size_t i = 0; i < f.n; ++i) {
        const auto pi = points.row(i);
        for (std::size_t j = i + 1; j < f.n; ++j) {
            const auto pj = points.row(j);
            double s = 0.0;
            for (std::size_t c = 0; c < pi.size(); ++c) {
                const double d = pi[c] - pj[c];
                s += d * d;
            }
            const double d = std::sqrt(s);
            if (!std::isfinite(d)) throw NumericError("non-finite point coordinates in rips filtration");
            f.distances[i * f.n + j] = d;
            f.distances[j * f.n + i] = d;
            if (d <= max_edge) {
                f.edges.push_back({d, static_cast<index_t>(i), static_cast<index_t>(j)});
            }
        }
    }
    std::sort(f.edges.begin(), f.edges.end(), [](const FilteredEdge& a, const FilteredEdge& b) {
        if (a.length != b.length) return a.length < b.length;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });
    return f;
}

namespace {

struct Triangle {
    double value;
    index_t a, b, c;  // a < b < c

    bool operator==(const Triangle& o) const { return a == o.a && b == o.b && c == o.c; }
};

bool precedes(const Triangle& x, const Triangle& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    return x.c < y.c;
}

struct LaterFirst {
    bool operator()(const Triangle& x, const Triangle& y) const { return precedes(y, x); }
};

using Column = std::priority_queue<Triangle, std::vector<Triangle>, LaterFirst>;

bool edge_precedes(double la, index_t ua, index_t va, double lb, index_t ub, index_t vb) {
    if (la != lb) return la < lb;
    if (ua != ub) return ua < ub;
    return va < vb;
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    index_t find(index_t x) {
        while (parent_[static_cast<std::size_t>(x)] != x) {
            auto& p = parent_[static_cast<std::size_t>(x)];
            p = parent_[static_cast<std::size_t>(p)];
            x = p;
        }
        return x;
    }

    /// Links the larger root under the smaller one. Roots are therefore the
    /// minimal vertex of their component.
    void link(index_t root_a, index_t root_b) {
        if (root_a > root_b) std::swap(root_a, root_b);
        parent_[static_cast<std::size_t>(root_b)] = root_a;
    }

private:
    std::vector<index_t> parent_;
};

class CohomologyReducer {
public:
    explicit CohomologyReducer(const Filtration& f) : f_(f) {}

    template <class Visit>
    void for_each_coface(index_t u, index_t v, Visit&& visit) const {
        const double duv = f_.distance(u, v);
        const auto n = static_cast<index_t>(f_.n);
        for (index_t w = 0; w < n; ++w) {
            if (w == u || w == v) continue;
            const double duw = f_.distance(u, w);
            const double dvw = f_.distance(v, w);
            if (duw > f_.max_edge || dvw > f_.max_edge) continue;
            const double value = std::max(duv, std::max(duw, dvw));
            index_t a = u, b = v, c = w;
            if (c < b) std::swap(b, c);
            if (b < a) std::swap(a, b);
            visit(Triangle{value, a, b, c});
        }
    }

    std::optional<Triangle> first_coface(index_t u, index_t v) const {
        std::optional<Triangle> best;
        for_each_coface(u, v, [&](const Triangle& t) {
            if (!best || precedes(t, *best)) best = t;
        });
        return best;
    }

    std::uint64_t code(const Triangle& t) const {
        const auto n = static_cast<std::uint64_t>(f_.n);
        return (static_cast<std::uint64_t>(t.a) * n + static_cast<std::uint64_t>(t.b)) * n +
               static_cast<std::uint64_t>(t.c);
    }

    Edge longest_edge(const Triangle& t) const {
        const std::array<Edge, 3> sides = {Edge{t.a, t.b}, Edge{t.a, t.c}, Edge{t.b, t.c}};
        Edge best = sides[0];
        double best_len = f_.distance(best.u, best.v);
        for (std::size_t s = 1; s < 3; ++s) {
            const double len = f_.distance(sides[s].u, sides[s].v);
            if (edge_precedes(best_len, best.u, best.v, len, sides[s].u, sides[s].v)) {
                best = sides[s];
                best_len = len;
            }
        }
        return best;
    }

private:
    const Filtration& f_;
};

// Pops cancelling duplicates and returns the earliest surviving triangle,
// leaving it in the column.
std::optional<Triangle> column_pivot(Column& column) {
    while (!column.empty()) {
        const Triangle top = column.top();
        column.pop();
        if (!column.empty() && column.top() == top) {
            column.pop();
            continue;
        }
        column.push(top);
        return top;
    }
    return std::nullopt;
}

std::vector<std::size_t> symmetric_difference(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
    std::vector<std::size_t> out;
    std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    return out;
}

}  // namespace

PersistenceDiagram rips_persistence(const Filtration& f, int max_degree) {
    if (max_degree < 0 || max_degree > 1) {
        throw ParameterError("rips_persistence supports homology degrees 0 and 1");
    }
    PersistenceDiagram dgm;
    const std::size_t m = f.edges.size();

    // H0 by Kruskal. Every vertex is born at 0; the component with the larger
    // minimal vertex dies at a merge.
    std::vector<bool> tree_edge(m, false);
    UnionFind uf(f.n);
    for (std::size_t e = 0; e < m; ++e) {
        const auto& edge = f.edges[e];
        const index_t ru = uf.find(edge.u);
        const index_t rv = uf.find(edge.v);
        if (ru == rv) continue;
        tree_edge[e] = true;
        uf.link(ru, rv);
        if (edge.length > 0.0) {
            PersistencePair p;
            p.degree = 0;
            p.birth = 0.0;
            p.death = edge.length;
            p.birth_simplex = {std::max(ru, rv)};
            p.death_simplex = {edge.u, edge.v};
            p.death_edge = {edge.u, edge.v};
            dgm.pairs.push_back(std::move(p));
        }
    }
    for (std::size_t v = 0; v < f.n; ++v) {
        if (uf.find(static_cast<index_t>(v)) == static_cast<index_t>(v)) {
            PersistencePair p;
            p.degree = 0;
            p.birth_simplex = {static_cast<index_t>(v)};
            dgm.essentials.push_back(std::move(p));
        }
    }
    if (max_degree < 1) return dgm;

    // H1 by reducing edge coboundaries in reverse filtration order. The pivot
    // of a coboundary column is its earliest triangle. Tree edges are cleared:
    // their columns reduce to zero.
    const CohomologyReducer reducer(f);
    struct PivotOwner {
        std::size_t edge;
        std::vector<std::size_t> combination;  // edges whose coboundaries sum to the reduced column
    };
    std::unordered_map<std::uint64_t, PivotOwner> pivots;
    pivots.reserve(m);

    auto record = [&](std::size_t e, const std::optional<Triangle>& death) {
        const auto& edge = f.edges[e];
        PersistencePair p;
        p.degree = 1;
        p.birth = edge.length;
        p.birth_simplex = {edge.u, edge.v};
        p.birth_edge = {edge.u, edge.v};
        if (!death) {
            dgm.essentials.push_back(std::move(p));
            return;
        }
        if (death->value <= edge.length) return;  // zero persistence
        p.death = death->value;
        p.death_simplex = {death->a, death->b, death->c};
        p.death_edge = reducer.longest_edge(*death);
        dgm.pairs.push_back(std::move(p));
    };

    for (std::size_t idx = m; idx-- > 0;) {
        if (tree_edge[idx]) continue;
        const auto& edge = f.edges[idx];
        const std::optional<Triangle> first = reducer.first_coface(edge.u, edge.v);
        if (!first) {
            record(idx, std::nullopt);
            continue;
        }
        const std::uint64_t first_code = reducer.code(*first);
        if (!pivots.contains(first_code)) {
            pivots.emplace(first_code, PivotOwner{idx, {idx}});
            record(idx, first);
            continue;
        }

        Column column;
        reducer.for_each_coface(edge.u, edge.v, [&](const Triangle& t) { column.push(t); });
        std::vector<std::size_t> combination = {idx};
        std::optional<Triangle> pivot;
        while (true) {
            pivot = column_pivot(column);
            if (!pivot) break;
            const auto it = pivots.find(reducer.code(*pivot));
            if (it == pivots.end()) break;
            for (std::size_t other : it->second.combination) {
                const auto& oe = f.edges[other];
                reducer.for_each_coface(oe.u, oe.v, [&](const Triangle& t) { column.push(t); });
            }
            combination = symmetric_difference(combination, it->second.combination);
        }
        if (pivot) {
            pivots.emplace(reducer.code(*pivot), PivotOwner{idx, std::move(combination)});
        }
        record(idx, pivot);
    }
    return dgm;
}

PersistenceDiagram rips_persistence(const Matrix& points, int max_degree, double max_edge) {
    return rips_persistence(build_rips_filtration(points, max_edge), max_degree);
}

}  // namespace topoprune
