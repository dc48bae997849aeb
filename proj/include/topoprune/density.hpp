#pragma once

#include "topoprune/types.hpp"

namespace topoprune {

struct DensityConfig {
    double bandwidth = 0.4;
    /// Evaluate the KDE over the whole embedding instead of per class.
    bool global = false;

    void validate() const;
};

/// Gaussian kernel exp(-|u|^2 / 2).
double gaussian_kernel(double squared_norm);

/// score_i = 1/(n h) * sum_j K((y_i - y_j) / h) over all n rows of `points`,
/// self term included.
ScoreVector kde_scores(const Matrix& points, double bandwidth);

/// Density score for every sample. Per class by default (each class's KDE
/// only sees its own points); config.global switches to one KDE over all.
ScoreVector density_scores(const Matrix& y, const LabelVector& labels, const DensityConfig& config);

}  // namespace topoprune
