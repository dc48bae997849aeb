#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "topoprune/neighbors.hpp"
#include "topoprune/types.hpp"

namespace topoprune {

/// Symmetric fuzzy membership graph built from a kNN table.
struct FuzzyGraph {
    struct Edge {
        index_t i;  // i < j
        index_t j;
        double weight;  // p_ij in (0, 1]
    };

    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<Edge> edges;  // sorted by (i, j)
    std::vector<double> rho;
    std::vector<double> sigma;
    /// Rows whose membership target was unreachable; their sigma was clamped.
    std::vector<index_t> clamped_rows;
};

struct ProjectionConfig {
    std::size_t n_neighbors = 15;
    double min_dist = 0.1;
    std::size_t out_dim = 2;
    Metric metric = Metric::cosine;
    std::size_t epochs = 200;
    std::size_t neg_samples = 5;
    double learning_rate = 1.0;
    /// Curve parameters of q = 1 / (1 + a d^{2b}). Non-positive values mean
    /// "fit from min_dist".
    double a = 0.0;
    double b = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    std::string fingerprint() const;
};

struct Embedding2D {
    Matrix coords;
    std::string fingerprint;
};

/// Directed memberships exp(-max(0, d - rho_i) / sigma_i), with sigma_i
/// searched so each row sums to log2(k), then symmetrized with the
/// probabilistic t-conorm p + q - p q.
FuzzyGraph fuzzy_simplicial_set(const NeighborGraph& graph);

inline constexpr int kSigmaSearchIterations = 64;
inline constexpr double kSigmaSearchTolerance = 1e-5;

/// sum_j exp(-max(0, d_ij - rho_i) / sigma_i) over row i of the kNN table.
double membership_sum(const NeighborGraph& graph, std::size_t row, double rho, double sigma);

struct CurveFit {
    double a;
    double b;
    bool converged;  // false means the tabulated fallback was used
};

/// Least-squares fit of (1 + a x^{2b})^{-1} to the target curve
/// psi(x) = 1 for x <= min_dist, exp(-(x - min_dist)) otherwise, on 300
/// evenly spaced samples of [0, 3].
CurveFit fit_ab(double min_dist);

/// Target curve used by fit_ab.
double target_similarity(double x, double min_dist);

/// Low-dimensional similarity q for squared distance d2 (floored at 1e-6).
double low_dim_similarity(double d2, double a, double b);

/// Seeded uniform initialization in [-10, 10]^out_dim.
Matrix initial_layout(std::size_t n, std::size_t out_dim, std::uint64_t seed);

/// Negative-sampling SGD on the fuzzy cross-entropy. The coordinates start at
/// initial_layout(n, out_dim, seed). config.a / config.b must be positive.
Embedding2D optimize_layout(const FuzzyGraph& fuzzy, const ProjectionConfig& config);

/// Cross-entropy between p and q summed over ordered pairs of graph edges.
double projection_loss(const FuzzyGraph& fuzzy, const Matrix& coords, double a, double b);

/// kNN -> fuzzy set -> curve fit -> layout. If row_keys is given, rows are
/// processed in ascending key order and every random stream is keyed by that
/// rank, so permuting rows together with their keys permutes the output.
Embedding2D project(const Matrix& z, const ProjectionConfig& config,
                    std::span<const std::uint64_t> row_keys = {});

/// Mean over samples of |kNN_x(i) intersect kNN_y(i)| / k, with x neighbors
/// taken under metric_x and y neighbors under the Euclidean metric.
double knn_preservation(const Matrix& x, Metric metric_x, const Matrix& y, std::size_t k);

}  // namespace topoprune
