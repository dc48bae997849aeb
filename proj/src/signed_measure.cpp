#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "topoprune/density.hpp"
#include "topoprune/errors.hpp"
#include "topoprune/persistence.hpp"

namespace topoprune {

void PersistenceOptimConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("persistence.learning_rate must be positive");
    }
    if (grid_size < 1) throw ConfigError("persistence.grid_size must be >= 1");
    if (homology_degree != 0 && homology_degree != 1) {
        throw ConfigError("persistence.homology_degree must be 0 or 1");
    }
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw ConfigError("persistence.bandwidth must be positive");
    if (!(max_edge_length > 0.0)) throw ConfigError("persistence.max_edge_length must be positive");
}

SignedMeasure hilbert_signed_measure(const Matrix& points, std::span<const double> density,
                                     const PersistenceOptimConfig& config) {
    config.validate();
    const std::size_t n = points.rows();
    if (density.size() != n) throw ShapeError("density length differs from point count");
    SignedMeasure measure;
    if (n == 0) return measure;

    std::vector<double> codensity(n);
    for (std::size_t i = 0; i < n; ++i) codensity[i] = -density[i];
    std::vector<double> sorted = codensity;
    std::sort(sorted.begin(), sorted.end());

    const std::size_t m = config.grid_size;
    std::vector<index_t> members;
    for (std::size_t s = 1; s <= m; ++s) {
        const std::size_t rank = (s * n + m - 1) / m;  // ceil(s n / m) >= 1
        const double threshold = sorted[rank - 1];
        measure.thresholds.push_back(threshold);

        members.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (codensity[i] <= threshold) members.push_back(static_cast<index_t>(i));
        }
        if (members.size() < 3) continue;

        const Matrix slice = points.select_rows(members);
        const PersistenceDiagram dgm = rips_persistence(slice, config.homology_degree, config.max_edge_length);
        auto lift = [&](const Edge& e) {
            return e.valid() ? Edge{members[static_cast<std::size_t>(e.u)], members[static_cast<std::size_t>(e.v)]}
                             : Edge{};
        };
        for (const auto& bar : dgm.pairs) {
            if (bar.degree != config.homology_degree) continue;
            const std::size_t id = measure.bars.size();
            measure.bars.push_back({s, bar.birth, bar.death, lift(bar.birth_edge), lift(bar.death_edge)});
            measure.masses.push_back({bar.birth, s, +1, id});
            measure.masses.push_back({bar.death, s, -1, id});
        }
    }
    return measure;
}

double persistence_loss(const SignedMeasure& measure) {
    double loss = 0.0;
    for (const auto& mass : measure.masses) {
        if (mass.pair_id >= measure.bars.size()) {
            throw ParameterError("signed mass refers to unknown pair id " + std::to_string(mass.pair_id));
        }
        // +birth and -death: total persistence is the negated signed first moment.
        loss -= static_cast<double>(mass.sign) * mass.distance;
    }
    return loss;
}

namespace {

void add_edge_gradient(Matrix& grad, const Matrix& points, const Edge& e, double sign) {
    if (!e.valid()) return;
    const auto pu = points.row(static_cast<std::size_t>(e.u));
    const auto pv = points.row(static_cast<std::size_t>(e.v));
    double len2 = 0.0;
    for (std::size_t c = 0; c < pu.size(); ++c) len2 += (pu[c] - pv[c]) * (pu[c] - pv[c]);
    const double len = std::sqrt(len2);
    if (!(len > 0.0)) return;
    auto gu = grad.row(static_cast<std::size_t>(e.u));
    auto gv = grad.row(static_cast<std::size_t>(e.v));
    for (std::size_t c = 0; c < pu.size(); ++c) {
        const double dir = sign * (pu[c] - pv[c]) / len;
        gu[c] += dir;
        gv[c] -= dir;
    }
}

}  // namespace

Matrix loss_gradient(const Matrix& points, const SignedMeasure& measure) {
    Matrix grad(points.rows(), points.cols(), 0.0);
    for (const auto& bar : measure.bars) {
        add_edge_gradient(grad, points, bar.death_edge, +1.0);
        add_edge_gradient(grad, points, bar.birth_edge, -1.0);
    }
    return grad;
}

double persistence_objective(const Matrix& points, const PersistenceOptimConfig& config) {
    const ScoreVector density = kde_scores(points, config.bandwidth);
    return persistence_loss(hilbert_signed_measure(points, density.values, config));
}

OptimizationResult optimize_points(const Matrix& points, const PersistenceOptimConfig& config) {
    config.validate();
    OptimizationResult result{points, {}};
    if (points.rows() < 4) {
        result.loss_trace.assign(config.steps + 1, 0.0);
        return result;
    }
    Matrix& y = result.points;
    for (std::size_t step = 0; step <= config.steps; ++step) {
        const ScoreVector density = kde_scores(y, config.bandwidth);
        const SignedMeasure measure = hilbert_signed_measure(y, density.values, config);
        result.loss_trace.push_back(persistence_loss(measure));
        if (step == config.steps) break;
        const Matrix grad = loss_gradient(y, measure);
        for (std::size_t k = 0; k < y.data().size(); ++k) {
            y.data()[k] += config.learning_rate * grad.data()[k];
        }
    }
    for (double v : y.data()) {
        if (!std::isfinite(v)) throw NumericError("persistence optimization produced non-finite coordinates");
    }
    return result;
}

ScoreVector persistence_scores(const Matrix& y, const LabelVector& labels, const PersistenceOptimConfig& config) {
    config.validate();
    if (labels.size() != y.rows()) throw ShapeError("label count differs from embedding rows");
    ScoreVector out{std::vector<double>(y.rows(), 0.0), ScoreKind::persistence, false};
    for (const auto& members : labels.class_members()) {
        if (members.empty()) continue;
        const Matrix before = y.select_rows(members);
        const OptimizationResult after = optimize_points(before, config);
        for (std::size_t r = 0; r < members.size(); ++r) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < before.cols(); ++c) {
                const double d = before(r, c) - after.points(r, c);
                d2 += d * d;
            }
            out.values[static_cast<std::size_t>(members[r])] = std::sqrt(d2);
        }
    }
    return out;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.precision(17);
    return out;
}

}  // namespace

void write_diagram_csv(const PersistenceDiagram& diagram, const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "degree,slice,birth,death\n";
    for (const auto* bars : {&diagram.pairs, &diagram.essentials}) {
        for (const auto& p : *bars) {
            out << p.degree << ",0," << p.birth << ',';
            if (p.essential()) {
                out << "inf\n";
            } else {
                out << p.death << '\n';
            }
        }
    }
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_measure_csv(const SignedMeasure& measure, int degree, const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "degree,slice,birth,death\n";
    for (const auto& bar : measure.bars) {
        out << degree << ',' << bar.slice << ',' << bar.birth << ',' << bar.death << '\n';
    }
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace topoprune
