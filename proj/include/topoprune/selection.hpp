#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topoprune/types.hpp"

namespace topoprune {

enum class Normalization { global, per_class };

Normalization parse_normalization(std::string_view name);

struct SelectionConfig {
    double alpha = 0.5;  // persistence weight
    double beta = 0.5;   // density weight
    double pruning_rate = 0.5;
    std::size_t strata = 50;
    Normalization normalization = Normalization::global;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Min-max rescaling to [0, 1]; a constant vector maps to zeros.
std::vector<double> min_max_normalize(std::span<const double> values);

/// alpha * normalize(pers) + beta * normalize(dens), normalized over all
/// samples at once.
ScoreVector unified_scores(const ScoreVector& pers, const ScoreVector& dens, double alpha, double beta);

/// Same combination with each class normalized on its own.
ScoreVector unified_scores(const ScoreVector& pers, const ScoreVector& dens, double alpha, double beta,
                           const LabelVector& labels);

/// Total kept count round((1 - p) * n_clean), split over classes by
/// largest-remainder apportionment of the original class counts. Classes
/// whose clean pool is too small are saturated and their surplus handed to
/// the rest. Returns one budget per class.
std::vector<std::size_t> class_budgets(std::span<const std::size_t> original_counts,
                                       std::span<const std::size_t> clean_counts, double pruning_rate,
                                       std::vector<std::string>* warnings = nullptr);

/// Per-stratum sample counts for one class: strata are visited in ascending
/// population and each takes min(size, ceil(remaining budget / remaining
/// strata)). Empty strata are skipped. Output is indexed like `populations`.
std::vector<std::size_t> allocate_strata(std::span<const std::size_t> populations, std::size_t budget);

/// Class-preserving stratified sampling on the unified score. Within a class
/// the score range is cut into config.strata equal-width bins and bins are
/// sampled uniformly without replacement, seeded per (class, stratum).
SelectionResult stratified_sample(std::span<const index_t> clean_indices, const ScoreVector& unified,
                                  const LabelVector& labels, const SelectionConfig& config,
                                  std::vector<std::string>* warnings = nullptr);

}  // namespace topoprune
