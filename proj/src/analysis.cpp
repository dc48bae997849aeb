#include "topoprune/analysis.hpp"

#include <cmath>

#include "topoprune/errors.hpp"

namespace topoprune {

Matrix class_prototypes(const Matrix& z, const LabelVector& labels) {
    if (labels.size() != z.rows()) throw ShapeError("label count differs from embedding rows");
    const auto classes = static_cast<std::size_t>(labels.num_classes);
    Matrix proto(classes, z.cols(), 0.0);
    std::vector<std::size_t> counts(classes, 0);
    for (std::size_t i = 0; i < z.rows(); ++i) {
        const auto c = static_cast<std::size_t>(labels.labels[i]);
        ++counts[c];
        for (std::size_t d = 0; d < z.cols(); ++d) proto(c, d) += z(i, d);
    }
    for (std::size_t c = 0; c < classes; ++c) {
        if (counts[c] == 0) continue;
        for (std::size_t d = 0; d < z.cols(); ++d) proto(c, d) /= static_cast<double>(counts[c]);
    }
    return proto;
}

std::vector<double> prototype_distances(const Matrix& z, const LabelVector& labels) {
    const Matrix proto = class_prototypes(z, labels);
    std::vector<double> out(z.rows());
    for (std::size_t i = 0; i < z.rows(); ++i) {
        const auto c = static_cast<std::size_t>(labels.labels[i]);
        double s = 0.0;
        for (std::size_t d = 0; d < z.cols(); ++d) {
            const double t = z(i, d) - proto(c, d);
            s += t * t;
        }
        out[i] = std::sqrt(s);
    }
    return out;
}

}  // namespace topoprune
