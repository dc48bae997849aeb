#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include "topoprune/types.hpp"

namespace topoprune {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Edge {
    index_t u = -1;  // u < v when valid
    index_t v = -1;

    bool valid() const { return u >= 0 && v >= 0; }
    bool operator==(const Edge&) const = default;
};

struct FilteredEdge {
    double length;
    index_t u;
    index_t v;
};

/// Vietoris-Rips filtration on a point cloud, truncated at max_edge. A
/// simplex enters at the longest of its edges; edges are ordered by
/// (length, u, v) and triangles by (value, a, b, c).
struct Filtration {
    std::size_t n = 0;
    double max_edge = kInfinity;
    std::vector<double> distances;  // n * n Euclidean
    std::vector<FilteredEdge> edges;

    double distance(index_t a, index_t b) const {
        return distances[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)];
    }
};

Filtration build_rips_filtration(const Matrix& points, double max_edge = kInfinity);

/// One bar. For H0 the birth simplex is the vertex whose component dies and
/// the death simplex the merging edge; for H1 the birth simplex is the
/// cycle-creating edge and the death simplex the filling triangle.
/// birth_edge / death_edge are the edges whose lengths equal birth / death
/// (birth_edge is invalid for H0, death_edge for essentials).
struct PersistencePair {
    int degree = 0;
    double birth = 0.0;
    double death = kInfinity;
    std::vector<index_t> birth_simplex;
    std::vector<index_t> death_simplex;
    Edge birth_edge;
    Edge death_edge;

    bool essential() const { return death == kInfinity; }
    double persistence() const { return death - birth; }
};

struct Interval {
    double birth;
    double death;

    auto operator<=>(const Interval&) const = default;
};

struct PersistenceDiagram {
    std::vector<PersistencePair> pairs;       // finite bars, positive persistence
    std::vector<PersistencePair> essentials;  // death = +inf

    /// Finite (birth, death) intervals of one degree, sorted.
    std::vector<Interval> intervals(int degree) const;
    /// Births of essential classes of one degree, sorted.
    std::vector<double> essential_births(int degree) const;
};

/// Persistent homology of the Rips filtration in degrees 0..max_degree
/// (max_degree <= 1) over Z/2. H0 comes from union-find over the sorted
/// edges; H1 from a cohomology reduction of the edge coboundaries with the
/// H0 death edges cleared. Zero-persistence pairs are dropped.
PersistenceDiagram rips_persistence(const Matrix& points, int max_degree, double max_edge = kInfinity);
PersistenceDiagram rips_persistence(const Filtration& filtration, int max_degree);

/// Exact bottleneck distance between finite diagrams (infinity-norm ground
/// cost, points may be matched to the diagonal at cost (d - b) / 2).
double bottleneck_distance(std::span<const Interval> a, std::span<const Interval> b);

/// Bottleneck distance in one degree. Essential classes only match each
/// other; differing essential counts give +inf.
double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, int degree);

/// Max of the per-degree distances over degrees 0 and 1.
double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b);

struct PersistenceOptimConfig {
    std::size_t steps = 6;
    double learning_rate = 0.1;
    std::size_t grid_size = 10;
    int homology_degree = 1;
    double bandwidth = 0.4;
    /// Rips truncation; +inf behaves as the point-set diameter.
    double max_edge_length = kInfinity;

    void validate() const;
};

struct SignedMass {
    double distance;
    std::size_t slice;  // 1-based slice index
    int sign;           // +1 birth, -1 death
    std::size_t pair_id;
};

/// One finite bar in one density slice; edges index the input point cloud.
struct SliceBar {
    std::size_t slice;
    double birth;
    double death;
    Edge birth_edge;
    Edge death_edge;
};

/// Hilbert-decomposition signed measure of the (distance, codensity)
/// bifiltration restricted to a grid of codensity slices.
struct SignedMeasure {
    std::vector<double> thresholds;  // codensity threshold per slice
    std::vector<SignedMass> masses;
    std::vector<SliceBar> bars;  // bars[id] pairs masses with pair_id == id
};

/// Codensity thresholds t_s = the ceil(s n / m)-th smallest value of
/// -density, s = 1..m. Slice s holds the points with -density <= t_s; each
/// slice with at least 3 points contributes its finite bars as a +1 mass at
/// (birth, s) and a -1 mass at (death, s).
SignedMeasure hilbert_signed_measure(const Matrix& points, std::span<const double> density,
                                     const PersistenceOptimConfig& config);

/// Sum of (death - birth) over the paired masses.
double persistence_loss(const SignedMeasure& measure);

/// Gradient of persistence_loss with respect to the point coordinates, with
/// slice membership held fixed.
Matrix loss_gradient(const Matrix& points, const SignedMeasure& measure);

/// persistence_loss at `points`, recomputing the KDE with config.bandwidth.
double persistence_objective(const Matrix& points, const PersistenceOptimConfig& config);

struct OptimizationResult {
    Matrix points;
    std::vector<double> loss_trace;  // steps + 1 values: before each step, then final
};

/// Gradient ascent on persistence_loss: each step recomputes the KDE, the
/// signed measure and the gradient, then moves points by learning_rate *
/// gradient. Fewer than 4 points leaves the cloud unchanged with a zero trace.
OptimizationResult optimize_points(const Matrix& points, const PersistenceOptimConfig& config);

/// Per class, the Euclidean displacement of each point under optimize_points.
ScoreVector persistence_scores(const Matrix& y, const LabelVector& labels, const PersistenceOptimConfig& config);

/// CSV rows "degree,slice,birth,death". Plain diagrams use slice 0.
void write_diagram_csv(const PersistenceDiagram& diagram, const std::filesystem::path& path);
void write_measure_csv(const SignedMeasure& measure, int degree, const std::filesystem::path& path);

}  // namespace topoprune
