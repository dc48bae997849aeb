#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>

#include "topoprune/types.hpp"

namespace topoprune {

enum class EmbeddingFormat { binary, csv };

/// Picks the format from the extension: ".csv" is CSV, anything else binary.
EmbeddingFormat format_from_path(const std::filesystem::path& path);

// Binary layout (little-endian):
//   "TPRN" | u32 version=1 | u64 N | u64 D | u64 C | N*D float32 row-major | N int32 labels
inline constexpr std::uint32_t kBinaryVersion = 1;

/// CSV layout: one row per sample, D feature columns then an integer label
/// column, no header. C is max(label) + 1.
std::pair<EmbeddingMatrix, LabelVector> load_embeddings(const std::filesystem::path& path,
                                                        EmbeddingFormat format);

void save_embeddings(const EmbeddingMatrix& z, const LabelVector& labels,
                     const std::filesystem::path& path, EmbeddingFormat format);

/// Manifold coordinates in the CSV embedding layout, printed with enough
/// digits to round-trip doubles exactly.
void save_coordinates(const Matrix& y, const LabelVector& labels, const std::filesystem::path& path);
std::pair<Matrix, LabelVector> load_coordinates(const std::filesystem::path& path);

/// "index,score" lines, shortest round-trip decimal form.
void save_scores(const ScoreVector& scores, const std::filesystem::path& path);

/// Reads an "index,score" file with exactly n rows. Rows may appear in any
/// order but every index in [0, n) must occur once.
std::vector<double> load_score_values(const std::filesystem::path& path, std::size_t n);

/// JSON object with kept_indices, pruning_rate, per_class_counts.
void save_selection(const SelectionResult& result, const std::filesystem::path& path);
SelectionResult load_selection(const std::filesystem::path& path);

/// Adds per-row Gaussian noise with standard deviation multiplier * sigma_i,
/// where sigma_i is the population standard deviation of row i. Row i draws
/// from the stream keyed by (seed, i).
EmbeddingMatrix perturb_embeddings(const EmbeddingMatrix& z, double multiplier, std::uint64_t seed);

}  // namespace topoprune
