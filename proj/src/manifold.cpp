#include "topoprune/manifold.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "topoprune/errors.hpp"
#include "topoprune/rng.hpp"

namespace topoprune {

void ProjectionConfig::validate() const {
    if (n_neighbors < 2) throw ConfigError("manifold.n_neighbors must be >= 2");
    if (!(min_dist > 0.0 && min_dist < 1.0)) throw ConfigError("manifold.min_dist must lie in (0, 1)");
    if (out_dim < 1) throw ConfigError("manifold.out_dim must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("manifold.learning_rate must be positive");
    }
    if (!std::isfinite(a) || !std::isfinite(b)) throw ConfigError("manifold.a / manifold.b must be finite");
}

std::string ProjectionConfig::fingerprint() const {
    std::ostringstream s;
    s.precision(17);
    s << "k=" << n_neighbors << ";min_dist=" << min_dist << ";dim=" << out_dim << ";metric=" << to_string(metric)
      << ";epochs=" << epochs << ";neg=" << neg_samples << ";lr=" << learning_rate << ";a=" << a << ";b=" << b
      << ";seed=" << seed;
    return s.str();
}

double membership_sum(const NeighborGraph& graph, std::size_t row, double rho, double sigma) {
    double sum = 0.0;
    for (std::size_t s = 0; s < graph.k; ++s) {
        const double gap = std::max(0.0, graph.distance(row, s) - rho);
        sum += std::exp(-gap / sigma);
    }
    return sum;
}

FuzzyGraph fuzzy_simplicial_set(const NeighborGraph& graph) {
    if (graph.k < 2) {
        throw ParameterError("fuzzy_simplicial_set needs at least 2 neighbors per row");
    }
    const std::size_t n = graph.n;
    const std::size_t k = graph.k;
    const double target = std::log2(static_cast<double>(k));

    FuzzyGraph fuzzy;
    fuzzy.n = n;
    fuzzy.k = k;
    fuzzy.rho.resize(n);
    fuzzy.sigma.resize(n);

    double global_mean = 0.0;
    for (double d : graph.distances) global_mean += d;
    global_mean /= static_cast<double>(graph.distances.size());

    for (std::size_t i = 0; i < n; ++i) {
        const double rho = graph.distance(i, 0);
        fuzzy.rho[i] = rho;

        std::size_t at_rho = 0;
        double row_mean = 0.0;
        for (std::size_t s = 0; s < k; ++s) {
            row_mean += graph.distance(i, s);
            if (graph.distance(i, s) <= rho) ++at_rho;
        }
        row_mean /= static_cast<double>(k);

        // As sigma -> 0 the sum tends to the number of neighbors sitting at rho;
        // above the target nothing can be reached.
        if (static_cast<double>(at_rho) > target + kSigmaSearchTolerance) {
            double scale = row_mean > 0.0 ? row_mean : global_mean;
            if (!(scale > 0.0)) scale = 1.0;
            fuzzy.sigma[i] = 1e-3 * scale;
            fuzzy.clamped_rows.push_back(static_cast<index_t>(i));
            continue;
        }

        double lo = 0.0;
        double hi = std::numeric_limits<double>::infinity();
        double sigma = 1.0;
        for (int it = 0; it < kSigmaSearchIterations; ++it) {
            const double sum = membership_sum(graph, i, rho, sigma);
            if (std::abs(sum - target) < kSigmaSearchTolerance) break;
            if (sum > target) {
                hi = sigma;
                sigma = 0.5 * (lo + hi);
            } else {
                lo = sigma;
                sigma = std::isinf(hi) ? 2.0 * sigma : 0.5 * (lo + hi);
            }
        }
        fuzzy.sigma[i] = sigma;
    }

    // Directed memberships, keyed by (min, max) so both directions meet.
    struct Directed {
        index_t lo, hi;
        double weight;
    };
    std::vector<Directed> directed;
    directed.reserve(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < k; ++s) {
            const index_t j = graph.neighbor(i, s);
            const double gap = std::max(0.0, graph.distance(i, s) - fuzzy.rho[i]);
            const double w = std::exp(-gap / fuzzy.sigma[i]);
            const auto ii = static_cast<index_t>(i);
            directed.push_back({std::min(ii, j), std::max(ii, j), w});
        }
    }
    std::sort(directed.begin(), directed.end(), [](const Directed& x, const Directed& y) {
        return x.lo < y.lo || (x.lo == y.lo && x.hi < y.hi);
    });
    for (std::size_t e = 0; e < directed.size();) {
        double combined = directed[e].weight;
        std::size_t f = e + 1;
        if (f < directed.size() && directed[f].lo == directed[e].lo && directed[f].hi == directed[e].hi) {
            const double other = directed[f].weight;
            combined = 1.0 - (1.0 - combined) * (1.0 - other);
            ++f;
        }
        if (combined > 0.0) {
            fuzzy.edges.push_back({directed[e].lo, directed[e].hi, std::min(combined, 1.0)});
        }
        e = f;
    }
    return fuzzy;
}

double target_similarity(double x, double min_dist) { return x <= min_dist ? 1.0 : std::exp(-(x - min_dist)); }

namespace {

constexpr std::size_t kCurveSamples = 300;
constexpr double kCurveSpan = 3.0;

double curve_residual_norm(double a, double b, const std::vector<double>& xs, const std::vector<double>& ys) {
    double s = 0.0;
    for (std::size_t t = 0; t < xs.size(); ++t) {
        const double r = 1.0 / (1.0 + a * std::pow(xs[t], 2.0 * b)) - ys[t];
        s += r * r;
    }
    return s;
}

// Reference fits used when Levenberg-Marquardt fails; nearest min_dist wins.
constexpr std::array<std::array<double, 3>, 5> kFallbackCurves = {{
    {0.05, 1.75022496, 0.84205539},
    {0.1, 1.57694346, 0.89506088},
    {0.2, 1.26205812, 1.0030054},
    {0.5, 0.58303002, 1.33416699},
    {0.99, 0.1193053, 1.91639042},
}};

}  // namespace

CurveFit fit_ab(double min_dist) {
    if (!(min_dist > 0.0 && min_dist < 1.0)) {
        throw ParameterError("fit_ab needs min_dist in (0, 1)");
    }
    std::vector<double> xs(kCurveSamples), ys(kCurveSamples);
    for (std::size_t t = 0; t < kCurveSamples; ++t) {
        xs[t] = kCurveSpan * static_cast<double>(t) / static_cast<double>(kCurveSamples - 1);
        ys[t] = target_similarity(xs[t], min_dist);
    }

    // Levenberg-Marquardt on the two parameters.
    double a = 1.0, b = 1.0, lambda = 1e-3;
    double cost = curve_residual_norm(a, b, xs, ys);
    bool ok = false;
    for (int it = 0; it < 500; ++it) {
        double jaa = 0, jab = 0, jbb = 0, ga = 0, gb = 0;
        for (std::size_t t = 0; t < kCurveSamples; ++t) {
            const double x = xs[t];
            const double p = x > 0.0 ? std::pow(x, 2.0 * b) : 0.0;
            const double denom = 1.0 + a * p;
            const double f = 1.0 / denom;
            const double r = f - ys[t];
            const double da = -p / (denom * denom);
            const double db = x > 0.0 ? -a * p * 2.0 * std::log(x) / (denom * denom) : 0.0;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        const double haa = jaa * (1.0 + lambda);
        const double hbb = jbb * (1.0 + lambda);
        const double det = haa * hbb - jab * jab;
        if (!(std::abs(det) > 0.0)) break;
        const double step_a = -(hbb * ga - jab * gb) / det;
        const double step_b = -(haa * gb - jab * ga) / det;
        const double na = a + step_a, nb = b + step_b;
        const double ncost = (na > 0.0 && nb > 0.0) ? curve_residual_norm(na, nb, xs, ys)
                                                    : std::numeric_limits<double>::infinity();
        if (std::isfinite(ncost) && ncost < cost) {
            const double rel = (cost - ncost) / std::max(cost, 1e-300);
            a = na;
            b = nb;
            cost = ncost;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (rel < 1e-15 && std::abs(step_a) < 1e-12 && std::abs(step_b) < 1e-12) {
                ok = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) {
                ok = true;  // no further improvement possible
                break;
            }
        }
    }
    if (!ok) ok = std::isfinite(cost);
    if (ok && std::isfinite(a) && std::isfinite(b) && a > 0.0 && b > 0.0) {
        return {a, b, true};
    }
    const auto* best = &kFallbackCurves[0];
    for (const auto& row : kFallbackCurves) {
        if (std::abs(row[0] - min_dist) < std::abs((*best)[0] - min_dist)) best = &row;
    }
    return {(*best)[1], (*best)[2], false};
}

namespace {

constexpr double kMinSquaredDistance = 1e-6;  // distance floor 1e-3
constexpr double kGradientClip = 4.0;
constexpr int kNegativeSampleAttempts = 16;
constexpr std::uint64_t kInitStream = 0x696e6974ULL;
constexpr std::uint64_t kEdgeStream = 0x65646765ULL;

double squared_distance(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c) {
        const double d = u[c] - v[c];
        s += d * d;
    }
    return s;
}

}  // namespace

double low_dim_similarity(double d2, double a, double b) {
    return 1.0 / (1.0 + a * std::pow(std::max(d2, kMinSquaredDistance), b));
}

Matrix initial_layout(std::size_t n, std::size_t out_dim, std::uint64_t seed) {
    Matrix y(n, out_dim);
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = SplitMix64::keyed(seed, {kInitStream, i});
        for (std::size_t c = 0; c < out_dim; ++c) y(i, c) = rng.uniform(-10.0, 10.0);
    }
    return y;
}

Embedding2D optimize_layout(const FuzzyGraph& fuzzy, const ProjectionConfig& config) {
    config.validate();
    if (fuzzy.n == 0) throw ParameterError("optimize_layout needs a nonempty graph");
    if (!(config.a > 0.0 && config.b > 0.0)) {
        throw ParameterError("optimize_layout needs positive curve parameters a and b");
    }
    const double a = config.a;
    const double b = config.b;
    const std::size_t n = fuzzy.n;
    const std::size_t dim = config.out_dim;

    Embedding2D out{initial_layout(n, dim, config.seed), config.fingerprint()};
    Matrix& y = out.coords;
    if (config.epochs == 0 || fuzzy.edges.empty()) return out;

    // Adjacency for rejecting graph neighbors as negative samples.
    std::vector<std::vector<index_t>> adjacency(n);
    for (const auto& e : fuzzy.edges) {
        adjacency[static_cast<std::size_t>(e.i)].push_back(e.j);
        adjacency[static_cast<std::size_t>(e.j)].push_back(e.i);
    }
    for (auto& adj : adjacency) std::sort(adj.begin(), adj.end());
    auto is_neighbor = [&](std::size_t v, index_t w) {
        return std::binary_search(adjacency[v].begin(), adjacency[v].end(), w);
    };

    // Edge e is sampled every epochs_per_sample[e] epochs, i.e. at a rate
    // proportional to its weight. Edges too weak to be sampled once are skipped.
    double max_weight = 0.0;
    for (const auto& e : fuzzy.edges) max_weight = std::max(max_weight, e.weight);
    const double total_epochs = static_cast<double>(config.epochs);
    const std::size_t m = fuzzy.edges.size();
    std::vector<double> epochs_per_sample(m, -1.0), next_sample(m), epochs_per_negative(m), next_negative(m);
    for (std::size_t e = 0; e < m; ++e) {
        const double samples = total_epochs * fuzzy.edges[e].weight / max_weight;
        if (samples < 1.0) continue;
        epochs_per_sample[e] = total_epochs / samples;
        next_sample[e] = epochs_per_sample[e];
        if (config.neg_samples > 0) {
            epochs_per_negative[e] = epochs_per_sample[e] / static_cast<double>(config.neg_samples);
            next_negative[e] = epochs_per_negative[e];
        }
    }

    auto attract = [&](std::size_t head, std::size_t tail, double alpha) {
        auto yh = y.row(head);
        auto yt = y.row(tail);
        const double d2 = std::max(squared_distance(yh, yt), kMinSquaredDistance);
        const double coeff = -2.0 * a * b * std::pow(d2, b - 1.0) / (a * std::pow(d2, b) + 1.0);
        for (std::size_t c = 0; c < dim; ++c) {
            const double g = std::clamp(coeff * (yh[c] - yt[c]), -kGradientClip, kGradientClip);
            yh[c] += g * alpha;
            yt[c] -= g * alpha;
        }
    };
    auto repel = [&](std::size_t head, std::size_t other, double alpha) {
        auto yh = y.row(head);
        const auto yo = y.row(other);
        const double d2 = std::max(squared_distance(yh, yo), kMinSquaredDistance);
        const double coeff = 2.0 * b / ((0.001 + d2) * (a * std::pow(d2, b) + 1.0));
        for (std::size_t c = 0; c < dim; ++c) {
            const double g = std::clamp(coeff * (yh[c] - yo[c]), -kGradientClip, kGradientClip);
            yh[c] += g * alpha;
        }
    };

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const double alpha =
            config.learning_rate * (1.0 - static_cast<double>(epoch - 1) / total_epochs);
        const double now = static_cast<double>(epoch);
        for (std::size_t e = 0; e < m; ++e) {
            if (epochs_per_sample[e] < 0.0 || next_sample[e] > now) continue;
            const auto& edge = fuzzy.edges[e];
            auto rng = SplitMix64::keyed(config.seed, {kEdgeStream, static_cast<std::uint64_t>(edge.i),
                                                       static_cast<std::uint64_t>(edge.j), epoch});
            std::size_t n_neg = 0;
            if (config.neg_samples > 0) {
                n_neg = static_cast<std::size_t>((now - next_negative[e]) / epochs_per_negative[e]);
                next_negative[e] += static_cast<double>(n_neg) * epochs_per_negative[e];
            }
            // Both orientations, so each endpoint gets its own negatives.
            const std::array<std::size_t, 2> heads = {static_cast<std::size_t>(edge.i),
                                                      static_cast<std::size_t>(edge.j)};
            for (std::size_t side = 0; side < 2; ++side) {
                const std::size_t head = heads[side];
                const std::size_t tail = heads[1 - side];
                attract(head, tail, alpha);
                for (std::size_t s = 0; s < n_neg; ++s) {
                    for (int attempt = 0; attempt < kNegativeSampleAttempts; ++attempt) {
                        const auto cand = static_cast<std::size_t>(rng.below(n));
                        if (cand == head || is_neighbor(head, static_cast<index_t>(cand))) continue;
                        repel(head, cand, alpha);
                        break;
                    }
                }
            }
            next_sample[e] += epochs_per_sample[e];
        }
    }
    for (double v : y.data()) {
        if (!std::isfinite(v)) throw NumericError("layout optimization produced non-finite coordinates");
    }
    return out;
}

double projection_loss(const FuzzyGraph& fuzzy, const Matrix& coords, double a, double b) {
    constexpr double kTiny = 1e-300;
    double loss = 0.0;
    for (const auto& e : fuzzy.edges) {
        const double d2 = squared_distance(coords.row(static_cast<std::size_t>(e.i)),
                                           coords.row(static_cast<std::size_t>(e.j)));
        const double q = low_dim_similarity(d2, a, b);
        const double p = e.weight;
        double term = p * std::log(std::max(p, kTiny) / std::max(q, kTiny));
        if (p < 1.0) term += (1.0 - p) * std::log((1.0 - p) / std::max(1.0 - q, kTiny));
        loss += 2.0 * term;  // (i, j) and (j, i)
    }
    return loss;
}

Embedding2D project(const Matrix& z, const ProjectionConfig& config, std::span<const std::uint64_t> row_keys) {
    config.validate();
    const std::size_t n = z.rows();
    if (!row_keys.empty() && row_keys.size() != n) {
        throw ShapeError("row_keys length differs from the number of rows");
    }
    if (config.n_neighbors >= n) {
        throw ParameterError("manifold.n_neighbors must be smaller than the number of samples");
    }

    std::vector<index_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (!row_keys.empty()) {
        std::stable_sort(order.begin(), order.end(),
                         [&](index_t l, index_t r) { return row_keys[l] < row_keys[r]; });
    }
    const Matrix canonical = z.select_rows(order);

    const NeighborGraph graph = knn_graph(canonical, config.n_neighbors, config.metric);
    const FuzzyGraph fuzzy = fuzzy_simplicial_set(graph);
    ProjectionConfig resolved = config;
    if (!(resolved.a > 0.0 && resolved.b > 0.0)) {
        const CurveFit fit = fit_ab(config.min_dist);
        resolved.a = fit.a;
        resolved.b = fit.b;
    }
    Embedding2D layout = optimize_layout(fuzzy, resolved);

    Embedding2D out{Matrix(n, config.out_dim), layout.fingerprint};
    for (std::size_t r = 0; r < n; ++r) {
        const auto src = layout.coords.row(r);
        std::copy(src.begin(), src.end(), out.coords.row(static_cast<std::size_t>(order[r])).begin());
    }
    return out;
}

double knn_preservation(const Matrix& x, Metric metric_x, const Matrix& y, std::size_t k) {
    const NeighborGraph gx = knn_graph(x, k, metric_x);
    const NeighborGraph gy = knn_graph(y, k, Metric::euclidean);
    double total = 0.0;
    std::vector<index_t> a(k), b(k), common;
    for (std::size_t i = 0; i < gx.n; ++i) {
        std::copy_n(gx.indices.begin() + static_cast<std::ptrdiff_t>(i * k), k, a.begin());
        std::copy_n(gy.indices.begin() + static_cast<std::ptrdiff_t>(i * k), k, b.begin());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        common.clear();
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
        total += static_cast<double>(common.size()) / static_cast<double>(k);
    }
    return total / static_cast<double>(gx.n);
}

}  // namespace topoprune
