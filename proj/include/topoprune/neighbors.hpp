#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "topoprune/types.hpp"

namespace topoprune {

enum class Metric { cosine, euclidean };

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric metric);

/// Exact k-nearest-neighbor table. Row i lists its k closest other rows,
/// ordered by (distance, index).
struct NeighborGraph {
    std::size_t n = 0;
    std::size_t k = 0;
    Metric metric = Metric::cosine;
    std::vector<index_t> indices;   // n * k
    std::vector<double> distances;  // n * k

    index_t neighbor(std::size_t i, std::size_t slot) const { return indices[i * k + slot]; }
    double distance(std::size_t i, std::size_t slot) const { return distances[i * k + slot]; }
};

/// Distance between two rows under `metric`. Cosine distance is
/// 1 - <u,v>/(|u||v|), clamped to [0, 2]; a zero row is at distance 1 from
/// everything.
double row_distance(std::span<const double> u, std::span<const double> v, Metric metric);

/// Brute-force exact kNN. Throws ParameterError unless 1 <= k < N.
NeighborGraph knn_graph(const Matrix& x, std::size_t k, Metric metric);

}  // namespace topoprune
