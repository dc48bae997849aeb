#include "topoprune/types.hpp"

#include <cmath>
#include <string>

#include "topoprune/errors.hpp"

namespace topoprune {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("matrix data has " + std::to_string(data_.size()) + " entries, expected " +
                         std::to_string(rows_ * cols_));
    }
}

Matrix Matrix::select_rows(std::span<const index_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        auto src = row(static_cast<std::size_t>(indices[r]));
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

Matrix EmbeddingMatrix::to_matrix() const {
    return Matrix(n_samples, dim, std::vector<double>(data.begin(), data.end()));
}

void EmbeddingMatrix::validate() const {
    if (n_samples == 0 || dim == 0) {
        throw ShapeError("embedding matrix must have N >= 1 and D >= 1");
    }
    if (data.size() != n_samples * dim) {
        throw ShapeError("embedding data has " + std::to_string(data.size()) + " entries, expected " +
                         std::to_string(n_samples * dim));
    }
    for (std::size_t k = 0; k < data.size(); ++k) {
        if (!std::isfinite(data[k])) {
            throw DataError("non-finite value at row " + std::to_string(k / dim) + ", column " +
                            std::to_string(k % dim));
        }
    }
}

void LabelVector::validate() const {
    if (num_classes <= 0) {
        throw DataError("label vector declares no classes");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= num_classes) {
            throw DataError("label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                            " outside [0, " + std::to_string(num_classes) + ")");
        }
    }
}

std::vector<std::vector<index_t>> LabelVector::class_members() const {
    std::vector<std::vector<index_t>> members(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        members[static_cast<std::size_t>(labels[i])].push_back(static_cast<index_t>(i));
    }
    return members;
}

std::vector<std::size_t> LabelVector::class_counts() const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
    for (index_t y : labels) {
        ++counts[static_cast<std::size_t>(y)];
    }
    return counts;
}

std::string_view to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::density: return "density";
        case ScoreKind::persistence: return "persistence";
        case ScoreKind::mislabel: return "mislabel";
        case ScoreKind::unified: return "unified";
    }
    return "unknown";
}

}  // namespace topoprune
