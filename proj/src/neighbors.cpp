#include "topoprune/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "topoprune/errors.hpp"

namespace topoprune {

Metric parse_metric(std::string_view name) {
    if (name == "cosine") return Metric::cosine;
    if (name == "euclidean") return Metric::euclidean;
    throw ConfigError("unknown metric '" + std::string(name) + "' (expected cosine or euclidean)");
}

std::string_view to_string(Metric metric) { return metric == Metric::cosine ? "cosine" : "euclidean"; }

namespace {

double squared_norm(std::span<const double> u) {
    double s = 0.0;
    for (double v : u) s += v * v;
    return s;
}

double cosine_from_parts(double dot, double norm_u, double norm_v) {
    if (norm_u == 0.0 || norm_v == 0.0) return 1.0;
    return std::clamp(1.0 - dot / (norm_u * norm_v), 0.0, 2.0);
}

}  // namespace

double row_distance(std::span<const double> u, std::span<const double> v, Metric metric) {
    if (metric == Metric::euclidean) {
        double s = 0.0;
        for (std::size_t c = 0; c < u.size(); ++c) {
            const double diff = u[c] - v[c];
            s += diff * diff;
        }
        return std::sqrt(s);
    }
    double dot = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c) dot += u[c] * v[c];
    return cosine_from_parts(dot, std::sqrt(squared_norm(u)), std::sqrt(squared_norm(v)));
}

NeighborGraph knn_graph(const Matrix& x, std::size_t k, Metric metric) {
    const std::size_t n = x.rows();
    if (k == 0 || k >= n) {
        throw ParameterError("knn_graph needs 1 <= k < N (k=" + std::to_string(k) + ", N=" + std::to_string(n) +
                             ")");
    }
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) norms[i] = std::sqrt(squared_norm(x.row(i)));

    NeighborGraph g;
    g.n = n;
    g.k = k;
    g.metric = metric;
    g.indices.resize(n * k);
    g.distances.resize(n * k);

    std::vector<double> dist(n);
    std::vector<index_t> order;
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = x.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (metric == Metric::euclidean) {
                dist[j] = row_distance(xi, x.row(j), metric);
            } else {
                double dot = 0.0;
                const auto xj = x.row(j);
                for (std::size_t c = 0; c < xi.size(); ++c) dot += xi[c] * xj[c];
                dist[j] = cosine_from_parts(dot, norms[i], norms[j]);
            }
        }
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
        order.erase(order.begin() + static_cast<std::ptrdiff_t>(i));
        auto closer = [&](index_t a, index_t b) {
            return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
        };
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);
        for (std::size_t s = 0; s < k; ++s) {
            g.indices[i * k + s] = order[s];
            g.distances[i * k + s] = dist[order[s]];
        }
    }
    return g;
}

}  // namespace topoprune
