// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "../oracle/homology_oracle.hpp"
#include "../support/fixtures.hpp"
#include "topoprune/analysis.hpp"
#include "topoprune/density.hpp"
#include "topoprune/manifold.hpp"
#include "topoprune/mislabel.hpp"
#include "topoprune/persistence.hpp"
#include "topoprune/pipeline.hpp"

using namespace topoprune;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool bars_match(const PersistenceDiagram& d, int degree, const std::vector<oracle::Bar>& ref, double tol) {
    std::vector<oracle::Bar> ours;
    for (const auto& iv : d.intervals(degree)) ours.push_back({iv.birth, iv.death});
    for (double b : d.essential_births(degree)) ours.push_back({b, kInfinity});
    std::sort(ours.begin(), ours.end());
    if (ours.size() != ref.size()) return false;
    for (std::size_t i = 0; i < ours.size(); ++i) {
        if (std::abs(ours[i].birth - ref[i].birth) > tol) return false;
        if (std::isinf(ours[i].death) != std::isinf(ref[i].death)) return false;
        if (!std::isinf(ref[i].death) && std::abs(ours[i].death - ref[i].death) > tol) return false;
    }
    return true;
}

Matrix transform(const Matrix& p, double angle, bool reflect, double tx, double ty) {
    Matrix out(p.rows(), 2);
    const double c = std::cos(angle), s = std::sin(angle);
    for (std::size_t i = 0; i < p.rows(); ++i) {
        const double x = p(i, 0), y = reflect ? -p(i, 1) : p(i, 1);
        out(i, 0) = c * x - s * y + tx;
        out(i, 1) = s * x + c * y + ty;
    }
    return out;
}

EmbeddingMatrix to_embedding(const Matrix& z) {
    EmbeddingMatrix e{z.rows(), z.cols(), {}};
    e.data.reserve(z.data().size());
    for (double v : z.data()) e.data.push_back(static_cast<float>(v));
    return e;
}

Outcome oracle_equivalence() {
    const auto t0 = Clock::now();
    std::size_t mismatches = 0;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 8;
        const Matrix pts = trial % 4 == 3 ? fixtures::lattice_cloud(n, trial) : fixtures::uniform_cloud(n, 2, trial);
        const auto ours = rips_persistence(pts, 1);
        const auto ref = oracle::rips_diagram(fixtures::rows_of(pts));
        if (!bars_match(ours, 0, ref.h0, 1e-12) || !bars_match(ours, 1, ref.h1, 1e-12)) ++mismatches;
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 30.0, fmt("200 clouds, %zu mismatches, %.2f s", mismatches, secs)};
}

Outcome unit_square() {
    const Matrix sq(4, 2, {0, 0, 1, 0, 1, 1, 0, 1});
    const auto h1 = rips_persistence(sq, 1).intervals(1);
    PersistenceOptimConfig cfg;
    cfg.grid_size = 1;
    const double loss = persistence_loss(hilbert_signed_measure(sq, kde_scores(sq, cfg.bandwidth).values, cfg));
    const bool bar_ok = h1.size() == 1 && std::abs(h1[0].birth - 1.0) < 1e-9 &&
                        std::abs(h1[0].death - std::sqrt(2.0)) < 1e-9;
    const bool loss_ok = std::abs(loss - (std::sqrt(2.0) - 1.0)) < 1e-9;
    return {bar_ok && loss_ok, fmt("H1 = (%.12f, %.12f), loss = %.12f", h1.empty() ? NAN : h1[0].birth,
                                   h1.empty() ? NAN : h1[0].death, loss)};
}

Outcome isometry_invariance() {
    double worst = 0.0;
    bool counts_ok = true;
    for (std::uint64_t cloud = 0; cloud < 20; ++cloud) {
        const Matrix pts = cloud % 2 ? fixtures::ring(12 + cloud, cloud) : fixtures::uniform_cloud(10 + cloud, 2, cloud, -3, 3);
        const auto base = rips_persistence(pts, 1);
        auto rng = SplitMix64::keyed(cloud, {0x150});
        for (int t = 0; t < 50; ++t) {
            const Matrix moved = transform(pts, rng.uniform(0, 2 * std::numbers::pi), rng.uniform() < 0.5,
                                           rng.uniform(-100, 100), rng.uniform(-100, 100));
            const auto d = rips_persistence(moved, 1);
            for (int k = 0; k <= 1; ++k)
                counts_ok = counts_ok && d.essential_births(k).size() == base.essential_births(k).size();
            worst = std::max(worst, bottleneck_distance(base, d));
        }
    }
    return {counts_ok && worst <= 1e-9, fmt("1000 transforms, max bottleneck difference %.3g", worst)};
}

Outcome stability() {
    bool ok = true;
    std::string detail;
    for (double eps : {1e-3, 1e-2}) {
        double worst_ratio = 0.0;
        for (std::uint64_t t = 0; t < 50; ++t) {
            const Matrix pts = fixtures::uniform_cloud(15 + t % 10, 2, 500 + t);
            Matrix jittered = pts;
            auto rng = SplitMix64::keyed(t, {0x57ab, static_cast<std::uint64_t>(eps * 1e6)});
            for (std::size_t i = 0; i < pts.rows(); ++i) {
                const double r = eps * rng.uniform(), a = rng.uniform(0, 2 * std::numbers::pi);
                jittered(i, 0) += r * std::cos(a);
                jittered(i, 1) += r * std::sin(a);
            }
            const double d = bottleneck_distance(rips_persistence(pts, 1), rips_persistence(jittered, 1));
            worst_ratio = std::max(worst_ratio, d / eps);
            ok = ok && d <= 2 * eps;
        }
        detail += fmt("eps=%g max d/eps=%.3f; ", eps, worst_ratio);
    }
    detail += "50 trials each";
    return {ok, detail};
}

/// Critical edges of every bar; fixed pairing means the loss is smooth locally.
std::vector<std::array<index_t, 5>> pairing_of(const SignedMeasure& m) {
    std::vector<std::array<index_t, 5>> out;
    for (const auto& b : m.bars) {
        out.push_back({static_cast<index_t>(b.slice), b.birth_edge.u, b.birth_edge.v, b.death_edge.u, b.death_edge.v});
    }
    std::sort(out.begin(), out.end());
    return out;
}

Outcome gradient_check() {
    const double h = 1e-5;
    const PersistenceOptimConfig cfg;
    std::size_t fixtures_used = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; fixtures_used < 20 && seed < 200; ++seed) {
        const Matrix pts = seed % 2 ? fixtures::ring(14, seed, 1.0, 0.15) : fixtures::uniform_cloud(12, 2, seed);
        const std::vector<double> dens = kde_scores(pts, cfg.bandwidth).values;
        const auto measure = hilbert_signed_measure(pts, dens, cfg);
        if (measure.bars.empty()) continue;
        const auto pairing = pairing_of(measure);
        const Matrix g = loss_gradient(pts, measure);
        bool degenerate = false;
        double local_worst = 0.0;
        for (std::size_t i = 0; i < pts.rows() && !degenerate; ++i)
            for (std::size_t c = 0; c < 2 && !degenerate; ++c) {
                Matrix up = pts, down = pts;
                up(i, c) += h;
                down(i, c) -= h;
                const auto mu = hilbert_signed_measure(up, dens, cfg);
                const auto md = hilbert_signed_measure(down, dens, cfg);
                if (pairing_of(mu) != pairing || pairing_of(md) != pairing) {
                    degenerate = true;
                    break;
                }
                const double fd = (persistence_loss(mu) - persistence_loss(md)) / (2 * h);
                const double scale = std::max(std::abs(fd), std::abs(g(i, c)));
                if (scale > 0.0) local_worst = std::max(local_worst, std::abs(fd - g(i, c)) / scale);
            }
        if (degenerate) continue;
        ++fixtures_used;
        worst = std::max(worst, local_worst);
    }
    return {fixtures_used == 20 && worst < 1e-4,
            fmt("%zu non-degenerate fixtures, max relative error %.3g", fixtures_used, worst)};
}

Outcome planted_noise() {
    const auto t0 = Clock::now();
    auto data = fixtures::blobs(300, 3, 64, 10.0, 21);
    const std::size_t n = data.z.rows();
    auto rng = SplitMix64::keyed(21, {0xf1});
    std::vector<index_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i + 1 < n; ++i) std::swap(order[i], order[i + rng.below(n - i)]);
    std::set<index_t> flipped(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n / 10));
    for (index_t i : flipped) {
        auto& y = data.labels.labels[static_cast<std::size_t>(i)];
        y = static_cast<index_t>((y + 1 + static_cast<index_t>(rng.below(2))) % 3);
    }
    const auto scores = nlps_scores(data.z, data.labels, 20);
    const auto kept = filter_mislabeled(scores, 0.1);
    const std::set<index_t> kept_set(kept.begin(), kept.end());
    std::size_t recovered = 0;
    for (index_t i : flipped) recovered += kept_set.count(i) == 0;
    const double rate = static_cast<double>(recovered) / static_cast<double>(flipped.size());
    const double secs = seconds_since(t0);
    return {rate >= 0.8 && secs < 10.0, fmt("recovered %zu/%zu = %.3f, %.2f s", recovered, flipped.size(), rate, secs)};
}

Outcome scaling() {
    const auto data = fixtures::blobs(40, 3, 64, 10.0, 8);
    const auto base = prototype_distances(data.z, data.labels);
    std::vector<index_t> subset;
    for (index_t i = 0; i < 120; i += 3) subset.push_back(i);
    const Matrix small = data.z.select_rows(subset);
    const auto dgm = rips_persistence(small, 1);
    double worst_dist = 0.0, worst_dgm = 0.0, mean_shift = 0.0;
    for (double alpha : {0.5, 2.0, 3.7, 10.0}) {
        Matrix scaled = data.z;
        for (double& v : scaled.data()) v *= alpha;
        const auto d = prototype_distances(scaled, data.labels);
        for (std::size_t i = 0; i < d.size(); ++i) {
            worst_dist = std::max(worst_dist, std::abs(d[i] - alpha * base[i]) / (alpha * base[i]));
            mean_shift += std::abs(d[i] - base[i]) / static_cast<double>(d.size());
        }
        const auto sd = rips_persistence(scaled.select_rows(subset), 1);
        for (int k = 0; k <= 1; ++k) {
            std::vector<Interval> expect;
            for (auto iv : dgm.intervals(k)) expect.push_back({alpha * iv.birth, alpha * iv.death});
            const auto got = sd.intervals(k);
            if (got.size() != expect.size()) {
                worst_dgm = kInfinity;
                continue;
            }
            worst_dgm = std::max(worst_dgm, bottleneck_distance(got, expect) / alpha);
        }
    }
    return {worst_dist <= 1e-12 && worst_dgm <= 1e-12,
            fmt("max relative prototype-distance error %.3g, max diagram error %.3g; raw distances move by %.3g on "
                "average while normalized topology is unchanged",
                worst_dist, worst_dgm, mean_shift / 4)};
}

Outcome pipeline_contract() {
    const auto t0 = Clock::now();
    // Unequal class sizes so apportionment is exercised.
    const std::size_t sizes[3] = {450, 300, 150};
    Matrix z(900, 32);
    LabelVector labels{{}, 3};
    auto rng = SplitMix64::keyed(900, {});
    std::size_t row = 0;
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < sizes[c]; ++i, ++row) {
            labels.labels.push_back(static_cast<index_t>(c));
            for (std::size_t d = 0; d < 32; ++d) z(row, d) = (d == c ? 8.0 : 0.0) + rng.normal();
        }
    const EmbeddingMatrix emb = to_embedding(z);

    bool ok = true;
    std::string detail;
    std::vector<SelectionResult> first;
    for (int run = 0; run < 2; ++run) {
        PipelineConfig cfg;
        cfg.seed = 2024;
        cfg.gamma = 0.1;
        cfg.resolve(true);
        const Matrix y = run_projection(emb, cfg);
        const PhaseScores scores = run_scoring(emb, labels, y, cfg);
        for (std::size_t pi = 0; pi < 2; ++pi) {
            const double p = pi == 0 ? 0.5 : 0.9;
            cfg.selection.pruning_rate = p;
            const SelectionResult r = run_selection(scores, labels, cfg);
            const std::size_t n_clean = 900 - static_cast<std::size_t>(std::floor(0.1 * 900 + 1e-9));
            const auto budget = static_cast<std::size_t>(std::llround((1 - p) * static_cast<double>(n_clean)));
            bool props = true;
            for (std::size_t c = 0; c < 3; ++c) {
                const double ideal = static_cast<double>(budget) * static_cast<double>(sizes[c]) / 900.0;
                props = props && std::abs(static_cast<double>(r.per_class_counts.at(static_cast<index_t>(c))) - ideal) <= 1.0;
            }
            ok = ok && r.kept_indices.size() == budget && props;
            if (run == 0) {
                first.push_back(r);
                detail += fmt("p=%.1f kept %zu (budget %zu) per class %zu/%zu/%zu; ", p, r.kept_indices.size(), budget,
                              r.per_class_counts.at(0), r.per_class_counts.at(1), r.per_class_counts.at(2));
            } else {
                ok = ok && r == first[pi];
            }
        }
    }
    const double secs = seconds_since(t0);
    detail += fmt("reruns identical, %.1f s for two full runs", secs);
    return {ok && secs < 120.0, detail};
}

Outcome ascent() {
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto r = optimize_points(fixtures::ring(60, seed), PersistenceOptimConfig{});
        ok = ok && r.loss_trace.back() >= r.loss_trace.front();
        detail += fmt("%.3f->%.3f ", r.loss_trace.front(), r.loss_trace.back());
    }
    return {ok, detail};
}

Outcome manifold_sanity() {
    bool overlap_ok = true, loss_ok = true;
    std::string detail;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto data = fixtures::blobs(200, 3, 64, 10.0, seed);
        ProjectionConfig cfg;
        cfg.seed = seed;
        const auto fit = fit_ab(cfg.min_dist);
        cfg.a = fit.a;
        cfg.b = fit.b;
        const auto fuzzy = fuzzy_simplicial_set(knn_graph(data.z, cfg.n_neighbors, cfg.metric));
        const Matrix y = optimize_layout(fuzzy, cfg).coords;
        const double overlap = knn_preservation(data.z, cfg.metric, y, 15);
        const double before = projection_loss(fuzzy, initial_layout(y.rows(), cfg.out_dim, cfg.seed), cfg.a, cfg.b);
        const double after = projection_loss(fuzzy, y, cfg.a, cfg.b);
        overlap_ok = overlap_ok && overlap >= 0.5;
        loss_ok = loss_ok && std::isfinite(before) && after <= 1.01 * before;
        detail += fmt("seed %llu overlap %.3f loss %.0f->%.0f; ", static_cast<unsigned long long>(seed), overlap,
                      before, after);
    }
    detail += overlap_ok ? "overlap >= 0.5" : "overlap below 0.5";
    return {overlap_ok && loss_ok, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"persistence oracle equivalence", oracle_equivalence},
        {"unit square bar and loss", unit_square},
        {"isometry invariance", isometry_invariance},
        {"stability under jitter", stability},
        {"analytic gradient vs finite differences", gradient_check},
        {"planted mislabel recovery", planted_noise},
        {"scaling of prototype distances and diagrams", scaling},
        {"pipeline budget contract", pipeline_contract},
        {"optimization raises the loss", ascent},
        {"manifold neighborhood and loss", manifold_sanity},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
