#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

#include "topoprune/rng.hpp"
#include "topoprune/types.hpp"

namespace fixtures {

using topoprune::index_t;
using topoprune::LabelVector;
using topoprune::Matrix;
using topoprune::SplitMix64;

inline Matrix uniform_cloud(std::size_t n, std::size_t d, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    Matrix m(n, d);
    auto rng = SplitMix64::keyed(seed, {0xc10d});
    for (double& v : m.data()) v = rng.uniform(lo, hi);
    return m;
}

/// Small integer lattice points, so many edge lengths tie.
inline Matrix lattice_cloud(std::size_t n, std::uint64_t seed) {
    Matrix m(n, 2);
    auto rng = SplitMix64::keyed(seed, {0x1a77});
    for (double& v : m.data()) v = static_cast<double>(rng.below(4));
    return m;
}

/// Noisy circle of n points with radius r.
inline Matrix ring(std::size_t n, std::uint64_t seed, double r = 1.0, double noise = 0.1) {
    Matrix m(n, 2);
    auto rng = SplitMix64::keyed(seed, {0x5});
    for (std::size_t i = 0; i < n; ++i) {
        const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
        m(i, 0) = r * std::cos(t) + noise * rng.normal();
        m(i, 1) = r * std::sin(t) + noise * rng.normal();
    }
    return m;
}

struct Labeled {
    Matrix z;
    LabelVector labels;
};

/// `classes` isotropic unit-variance blobs in d dimensions, centered at
/// separation * e_c.
inline Labeled blobs(std::size_t per_class, std::size_t classes, std::size_t d, double separation,
                     std::uint64_t seed) {
    Labeled out{Matrix(per_class * classes, d), {}};
    out.labels.num_classes = static_cast<index_t>(classes);
    auto rng = SplitMix64::keyed(seed, {0xb10b});
    for (std::size_t c = 0; c < classes; ++c)
        for (std::size_t i = 0; i < per_class; ++i) {
            const std::size_t row = c * per_class + i;
            out.labels.labels.push_back(static_cast<index_t>(c));
            for (std::size_t k = 0; k < d; ++k) out.z(row, k) = (k == c ? separation : 0.0) + rng.normal();
        }
    return out;
}

inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        for (std::size_t t = i; t <= j; ++t) r[order[t]] = 0.5 * static_cast<double>(i + j);
        i = j + 1;
    }
    return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double s = 0.0, sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (ra[i] - ma) * (rb[i] - mb);
        sa += (ra[i] - ma) * (ra[i] - ma);
        sb += (rb[i] - mb) * (rb[i] - mb);
    }
    return s / std::sqrt(sa * sb);
}

inline std::vector<std::vector<double>> rows_of(const Matrix& m) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < m.rows(); ++i) out.emplace_back(m.row(i).begin(), m.row(i).end());
    return out;
}

}  // namespace fixtures
