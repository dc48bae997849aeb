#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "topoprune/density.hpp"
#include "topoprune/manifold.hpp"
#include "topoprune/mislabel.hpp"
#include "topoprune/persistence.hpp"
#include "topoprune/selection.hpp"
#include "topoprune/types.hpp"

namespace topoprune {

enum class DatasetPreset { none, cifar10, cifar100, imagenet };

DatasetPreset parse_preset(std::string_view name);

/// Mislabel ratio for a preset at one of the tabulated pruning rates
/// (0.3, 0.5, 0.7, 0.8, 0.9). Throws ConfigError for other rates.
double preset_gamma(DatasetPreset preset, double pruning_rate);

/// Every tunable of the three phases. Module seeds are derived from the
/// master seed.
struct PipelineConfig {
    ProjectionConfig projection;
    DensityConfig density;
    PersistenceOptimConfig persistence;
    MislabelConfig mislabel;
    SelectionConfig selection;
    DatasetPreset preset = DatasetPreset::none;
    std::optional<double> gamma;  // explicit mislabel ratio; otherwise from the preset
    std::uint64_t seed = 0;
    std::filesystem::path input;
    std::filesystem::path output;

    /// Applies one "key=value" assignment, e.g. "manifold.n_neighbors=15".
    void set(const std::string& key, const std::string& value);

    /// Reads a flat key=value file; '#' starts a comment.
    void load_file(const std::filesystem::path& path);

    /// Fills derived fields (module seeds, gamma) and validates sub-configs.
    /// Throws ConfigError when gamma is neither given nor implied by a preset
    /// and require_gamma is set.
    void resolve(bool require_gamma);

    /// Effective mislabel ratio after resolve().
    double effective_gamma() const { return mislabel.gamma; }

    /// All keys understood by set().
    static std::vector<std::string> keys();
};

struct PhaseScores {
    ScoreVector density;
    ScoreVector persistence;
    ScoreVector mislabel;
};

/// Phase 1a: manifold projection of the embeddings.
Matrix run_projection(const EmbeddingMatrix& z, const PipelineConfig& config);

/// Phase 1b: density and persistence scores on the projection, plus the
/// mislabel score (NLPS on z, or the AUM file).
PhaseScores run_scoring(const EmbeddingMatrix& z, const LabelVector& labels, const Matrix& y,
                        const PipelineConfig& config);

/// Phases 2 and 3: mislabel filtering, unified score, stratified sampling.
SelectionResult run_selection(const PhaseScores& scores, const LabelVector& labels, const PipelineConfig& config,
                              std::vector<std::string>* warnings = nullptr);

struct PipelineSummary {
    std::size_t n = 0;
    std::size_t classes = 0;
    double pruning_rate = 0.0;
    double gamma = 0.0;
    std::size_t clean = 0;
    std::size_t kept = 0;
    std::map<index_t, std::size_t> per_class_counts;
};

PipelineSummary summarize(const SelectionResult& result, const LabelVector& labels, const PipelineConfig& config);
void print_summary(std::ostream& out, const PipelineSummary& summary);

/// Fixed file names inside an output directory.
namespace files {
inline constexpr const char* coordinates = "embedding2d.csv";
inline constexpr const char* density = "density.csv";
inline constexpr const char* persistence = "persistence.csv";
inline constexpr const char* mislabel = "mislabel.csv";
inline constexpr const char* selection = "selection.json";
}  // namespace files

}  // namespace topoprune
