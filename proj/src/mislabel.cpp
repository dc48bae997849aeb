#include "topoprune/mislabel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "topoprune/corpus_io.hpp"
#include "topoprune/errors.hpp"

namespace topoprune {

MislabelMethod parse_mislabel_method(std::string_view name) {
    if (name == "nlps") return MislabelMethod::nlps;
    if (name == "aum" || name == "aum_file") return MislabelMethod::aum_file;
    throw ConfigError("unknown mislabel method '" + std::string(name) + "' (expected nlps or aum_file)");
}

void MislabelConfig::validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("mislabel.gamma must lie in [0, 1)");
    if (k < 1) throw ConfigError("mislabel.k must be >= 1");
    if (method == MislabelMethod::aum_file && aum_path.empty()) {
        throw ConfigError("mislabel.method=aum_file needs mislabel.aum_path");
    }
}

ScoreVector nlps_scores(const Matrix& z, const LabelVector& labels, std::size_t k) {
    if (labels.size() != z.rows()) throw ShapeError("label count differs from embedding rows");
    const NeighborGraph g = knn_graph(z, k, Metric::cosine);
    ScoreVector out{std::vector<double>(z.rows(), 0.0), ScoreKind::mislabel, false};
    for (std::size_t i = 0; i < g.n; ++i) {
        std::size_t mismatched = 0;
        for (std::size_t s = 0; s < k; ++s) {
            if (labels.labels[static_cast<std::size_t>(g.neighbor(i, s))] != labels.labels[i]) ++mismatched;
        }
        out.values[i] = static_cast<double>(mismatched) / static_cast<double>(k);
    }
    return out;
}

ScoreVector load_aum_scores(const std::filesystem::path& path, std::size_t n) {
    std::vector<double> raw = load_score_values(path, n);
    for (double& v : raw) v = -v;
    return {std::move(raw), ScoreKind::mislabel, false};
}

std::vector<index_t> filter_mislabeled(const ScoreVector& scores, double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in [0, 1)");
    const std::size_t n = scores.size();
    // The slack keeps products such as 0.29 * 100 from flooring one short.
    const auto removed = static_cast<std::size_t>(std::floor(gamma * static_cast<double>(n) + 1e-9));
    std::vector<index_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](index_t a, index_t b) {
        return scores.values[static_cast<std::size_t>(a)] > scores.values[static_cast<std::size_t>(b)];
    });
    std::vector<index_t> kept(order.begin() + static_cast<std::ptrdiff_t>(removed), order.end());
    std::sort(kept.begin(), kept.end());
    return kept;
}

}  // namespace topoprune
