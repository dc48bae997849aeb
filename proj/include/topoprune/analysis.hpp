#pragma once

#include "topoprune/types.hpp"

namespace topoprune {

/// Class means of the rows of z, one row per class. Empty classes get a zero row.
Matrix class_prototypes(const Matrix& z, const LabelVector& labels);

/// Euclidean distance of every sample to its own class prototype.
std::vector<double> prototype_distances(const Matrix& z, const LabelVector& labels);

}  // namespace topoprune
