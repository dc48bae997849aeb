#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

namespace topoprune {

using index_t = std::int32_t;

/// Dense row-major matrix of doubles. Used for point clouds and manifold
/// coordinates.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    /// Rows selected by `indices`, in that order.
    Matrix select_rows(std::span<const index_t> indices) const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// N x D feature matrix as stored on disk (float32 activations).
struct EmbeddingMatrix {
    std::size_t n_samples = 0;
    std::size_t dim = 0;
    std::vector<float> data;

    std::span<const float> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
    std::span<float> row(std::size_t i) { return {data.data() + i * dim, dim}; }

    /// Widened copy for numeric work.
    Matrix to_matrix() const;

    /// Throws DataError when an entry is NaN/Inf or the shape is empty.
    void validate() const;

    bool operator==(const EmbeddingMatrix&) const = default;
};

struct LabelVector {
    std::vector<index_t> labels;
    index_t num_classes = 0;

    std::size_t size() const { return labels.size(); }

    /// Throws DataError when a label falls outside [0, num_classes).
    void validate() const;

    /// Indices of each class, ascending.
    std::vector<std::vector<index_t>> class_members() const;
    std::vector<std::size_t> class_counts() const;

    bool operator==(const LabelVector&) const = default;
};

enum class ScoreKind { density, persistence, mislabel, unified };

std::string_view to_string(ScoreKind kind);

struct ScoreVector {
    std::vector<double> values;
    ScoreKind kind = ScoreKind::density;
    bool normalized = false;

    std::size_t size() const { return values.size(); }
};

struct SelectionResult {
    std::vector<index_t> kept_indices;
    double pruning_rate = 0.0;
    std::map<index_t, std::size_t> per_class_counts;

    bool operator==(const SelectionResult&) const = default;
};

}  // namespace topoprune
