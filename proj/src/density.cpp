#include "topoprune/density.hpp"

#include <cmath>

#include "topoprune/errors.hpp"

namespace topoprune {

void DensityConfig::validate() const {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw ConfigError("density.bandwidth must be positive");
    }
}

double gaussian_kernel(double squared_norm) { return std::exp(-0.5 * squared_norm); }

ScoreVector kde_scores(const Matrix& points, double bandwidth) {
    if (!(bandwidth > 0.0)) throw ParameterError("KDE bandwidth must be positive");
    const std::size_t n = points.rows();
    ScoreVector out{std::vector<double>(n, 0.0), ScoreKind::density, false};
    if (n == 0) return out;
    const double inv_h2 = 1.0 / (bandwidth * bandwidth);
    // Kernel matrix is symmetric; accumulate each pair once.
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] += gaussian_kernel(0.0);
        const auto yi = points.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto yj = points.row(j);
            double d2 = 0.0;
            for (std::size_t c = 0; c < yi.size(); ++c) {
                const double d = yi[c] - yj[c];
                d2 += d * d;
            }
            const double k = gaussian_kernel(d2 * inv_h2);
            out.values[i] += k;
            out.values[j] += k;
        }
    }
    const double scale = 1.0 / (static_cast<double>(n) * bandwidth);
    for (double& v : out.values) v *= scale;
    return out;
}

ScoreVector density_scores(const Matrix& y, const LabelVector& labels, const DensityConfig& config) {
    config.validate();
    if (labels.size() != y.rows()) throw ShapeError("label count differs from embedding rows");
    if (config.global) return kde_scores(y, config.bandwidth);
    ScoreVector out{std::vector<double>(y.rows(), 0.0), ScoreKind::density, false};
    for (const auto& members : labels.class_members()) {
        if (members.empty()) continue;
        const ScoreVector cls = kde_scores(y.select_rows(members), config.bandwidth);
        for (std::size_t r = 0; r < members.size(); ++r) {
            out.values[static_cast<std::size_t>(members[r])] = cls.values[r];
        }
    }
    return out;
}

}  // namespace topoprune
