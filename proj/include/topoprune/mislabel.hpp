#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "topoprune/neighbors.hpp"
#include "topoprune/types.hpp"

namespace topoprune {

enum class MislabelMethod { nlps, aum_file };

MislabelMethod parse_mislabel_method(std::string_view name);

struct MislabelConfig {
    MislabelMethod method = MislabelMethod::nlps;
    std::size_t k = 20;
    double gamma = 0.0;
    std::filesystem::path aum_path;

    void validate() const;
};

/// Fraction of each sample's k nearest neighbors (cosine, in the original
/// feature space) whose label differs from its own. Higher is more suspect.
ScoreVector nlps_scores(const Matrix& z, const LabelVector& labels, std::size_t k);

/// Reads "index,raw_aum" rows and negates them, so that higher means more
/// suspect like NLPS. Low AUM marks likely mislabels.
ScoreVector load_aum_scores(const std::filesystem::path& path, std::size_t n);

/// Drops the floor(gamma * N) highest-scoring samples (ties: smaller index
/// dropped first) and returns the remaining indices in ascending order.
std::vector<index_t> filter_mislabeled(const ScoreVector& scores, double gamma);

}  // namespace topoprune
