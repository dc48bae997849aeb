#include "topoprune/pipeline.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>

#include "topoprune/errors.hpp"
#include "topoprune/rng.hpp"

namespace topoprune {

DatasetPreset parse_preset(std::string_view name) {
    if (name.empty() || name == "none") return DatasetPreset::none;
    if (name == "cifar10") return DatasetPreset::cifar10;
    if (name == "cifar100") return DatasetPreset::cifar100;
    if (name == "imagenet") return DatasetPreset::imagenet;
    throw ConfigError("unknown dataset preset '" + std::string(name) + "' (expected cifar10, cifar100 or imagenet)");
}

double preset_gamma(DatasetPreset preset, double pruning_rate) {
    constexpr std::array<double, 5> rates = {0.3, 0.5, 0.7, 0.8, 0.9};
    constexpr std::array<double, 5> cifar10 = {0.0, 0.0, 0.1, 0.1, 0.3};
    constexpr std::array<double, 5> cifar100 = {0.1, 0.2, 0.2, 0.4, 0.5};
    constexpr std::array<double, 5> imagenet = {0.0, 0.1, 0.2, 0.2, 0.3};
    const std::array<double, 5>* table = nullptr;
    switch (preset) {
        case DatasetPreset::cifar10: table = &cifar10; break;
        case DatasetPreset::cifar100: table = &cifar100; break;
        case DatasetPreset::imagenet: table = &imagenet; break;
        case DatasetPreset::none: throw ConfigError("no dataset preset selected");
    }
    for (std::size_t r = 0; r < rates.size(); ++r) {
        if (std::abs(rates[r] - pruning_rate) < 1e-9) return (*table)[r];
    }
    throw ConfigError("preset mislabel ratios exist only for pruning rates 0.3, 0.5, 0.7, 0.8, 0.9; pass "
                      "mislabel.gamma explicitly");
}

namespace {

template <class T>
T parse_value(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("invalid value '" + text + "' for " + key);
    }
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("invalid boolean '" + text + "' for " + key);
}

double parse_real(const std::string& key, const std::string& text) {
    if (text == "inf" || text == "infinity") return kInfinity;
    const double v = parse_value<double>(key, text);
    if (!std::isfinite(v)) throw ConfigError("non-finite value for " + key);
    return v;
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"manifold.n_neighbors",
         [](PipelineConfig& c, const auto& k, const auto& v) { c.projection.n_neighbors = parse_value<std::size_t>(k, v); }},
        {"manifold.min_dist", [](PipelineConfig& c, const auto& k, const auto& v) { c.projection.min_dist = parse_real(k, v); }},
        {"manifold.out_dim",
         [](PipelineConfig& c, const auto& k, const auto& v) { c.projection.out_dim = parse_value<std::size_t>(k, v); }},
        {"manifold.metric", [](PipelineConfig& c, const auto&, const auto& v) { c.projection.metric = parse_metric(v); }},
        {"manifold.epochs",
         [](PipelineConfig& c, const auto& k, const auto& v) { c.projection.epochs = parse_value<std::size_t>(k, v); }},
        {"manifold.neg_samples",
         [](PipelineConfig& c, const auto& k, const auto& v) { c.projection.neg_samples = parse_value<std::size_t>(k, v); }},
        {"manifold.learning_rate",
         [](PipelineConfig& c, const auto& k, const auto& v) { c.projection.learning_rate = parse_real(k, v); }},
        {"manifold.a", [](PipelineConfig& c, const auto& k, const auto& v) { c.projection.a = parse_real(k, v); }},
        {"manifold.b", [](PipelineConfig& c, const auto& k, const auto& v) { c.projection.b = parse_real(k, v); }},
        {"density.bandwidth", [](PipelineConfig& c, const auto& k, const auto& v) { c.density.bandwidth = parse_real(k, v); }},
        {"density.global", [](PipelineConfig& c, const auto& k, const auto& v) { c.density.global = parse_bool(k, v); }},
        {"persistence.steps",
         [](PipelineConfig& c, const auto& k, const auto& v) { c.persistence.steps = parse_value<std::size_t>(k, v); }},
        {"persistence.learning_rate",
         [](PipelineConfig& c, const auto& k, const auto& v) { c.persistence.learning_rate = parse_real(k, v); }},
        {"persistence.grid_size",
         [](PipelineConfig& c, const auto& k, const auto& v) { c.persistence.grid_size = parse_value<std::size_t>(k, v); }},
        {"persistence.homology_degree",
         [](PipelineConfig& c, const auto& k, const auto& v) { c.persistence.homology_degree = parse_value<int>(k, v); }},
        {"persistence.theta",
         [](PipelineConfig& c, const auto& k, const auto& v) { c.persistence.bandwidth = parse_real(k, v); }},
        {"persistence.max_edge_length",
         [](PipelineConfig& c, const auto& k, const auto& v) { c.persistence.max_edge_length = parse_real(k, v); }},
        {"mislabel.method",
         [](PipelineConfig& c, const auto&, const auto& v) { c.mislabel.method = parse_mislabel_method(v); }},
        {"mislabel.k", [](PipelineConfig& c, const auto& k, const auto& v) { c.mislabel.k = parse_value<std::size_t>(k, v); }},
        {"mislabel.gamma", [](PipelineConfig& c, const auto& k, const auto& v) { c.gamma = parse_real(k, v); }},
        {"mislabel.aum_path", [](PipelineConfig& c, const auto&, const auto& v) { c.mislabel.aum_path = v; }},
        {"selection.alpha", [](PipelineConfig& c, const auto& k, const auto& v) { c.selection.alpha = parse_real(k, v); }},
        {"selection.beta", [](PipelineConfig& c, const auto& k, const auto& v) { c.selection.beta = parse_real(k, v); }},
        {"selection.pruning_rate",
         [](PipelineConfig& c, const auto& k, const auto& v) { c.selection.pruning_rate = parse_real(k, v); }},
        {"selection.strata",
         [](PipelineConfig& c, const auto& k, const auto& v) { c.selection.strata = parse_value<std::size_t>(k, v); }},
        {"selection.normalization",
         [](PipelineConfig& c, const auto&, const auto& v) { c.selection.normalization = parse_normalization(v); }},
        {"dataset.preset", [](PipelineConfig& c, const auto&, const auto& v) { c.preset = parse_preset(v); }},
        {"seed", [](PipelineConfig& c, const auto& k, const auto& v) { c.seed = parse_value<std::uint64_t>(k, v); }},
        {"io.input", [](PipelineConfig& c, const auto&, const auto& v) { c.input = v; }},
        {"io.output", [](PipelineConfig& c, const auto&, const auto& v) { c.output = v; }},
    };
    return table;
}

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

constexpr std::uint64_t kManifoldPhase = 1;
constexpr std::uint64_t kSelectionPhase = 2;

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(*this, key, value);
}

void PipelineConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
        }
        set(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
}

void PipelineConfig::resolve(bool require_gamma) {
    projection.seed = derive_seed(seed, kManifoldPhase);
    selection.seed = derive_seed(seed, kSelectionPhase);
    projection.validate();
    density.validate();
    persistence.validate();
    selection.validate();
    if (gamma) {
        mislabel.gamma = *gamma;
    } else if (preset != DatasetPreset::none) {
        mislabel.gamma = preset_gamma(preset, selection.pruning_rate);
    } else if (require_gamma) {
        throw ConfigError("mislabel.gamma is required when no dataset preset is given");
    }
    mislabel.validate();
}

std::vector<std::string> PipelineConfig::keys() {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
}

Matrix run_projection(const EmbeddingMatrix& z, const PipelineConfig& config) {
    return project(z.to_matrix(), config.projection).coords;
}

PhaseScores run_scoring(const EmbeddingMatrix& z, const LabelVector& labels, const Matrix& y,
                        const PipelineConfig& config) {
    if (y.rows() != z.n_samples || labels.size() != z.n_samples) {
        throw ShapeError("embedding, coordinates and labels disagree on the sample count");
    }
    PhaseScores scores;
    scores.density = density_scores(y, labels, config.density);
    scores.persistence = persistence_scores(y, labels, config.persistence);
    if (config.mislabel.method == MislabelMethod::nlps) {
        scores.mislabel = nlps_scores(z.to_matrix(), labels, config.mislabel.k);
    } else {
        scores.mislabel = load_aum_scores(config.mislabel.aum_path, z.n_samples);
    }
    return scores;
}

SelectionResult run_selection(const PhaseScores& scores, const LabelVector& labels, const PipelineConfig& config,
                              std::vector<std::string>* warnings) {
    const std::vector<index_t> clean = filter_mislabeled(scores.mislabel, config.mislabel.gamma);
    const auto& s = config.selection;
    const ScoreVector unified = s.normalization == Normalization::global
                                    ? unified_scores(scores.persistence, scores.density, s.alpha, s.beta)
                                    : unified_scores(scores.persistence, scores.density, s.alpha, s.beta, labels);
    return stratified_sample(clean, unified, labels, s, warnings);
}

PipelineSummary summarize(const SelectionResult& result, const LabelVector& labels, const PipelineConfig& config) {
    PipelineSummary s;
    s.n = labels.size();
    s.classes = static_cast<std::size_t>(labels.num_classes);
    s.pruning_rate = result.pruning_rate;
    s.gamma = config.mislabel.gamma;
    s.clean = s.n - static_cast<std::size_t>(std::floor(s.gamma * static_cast<double>(s.n) + 1e-9));
    s.kept = result.kept_indices.size();
    s.per_class_counts = result.per_class_counts;
    return s;
}

void print_summary(std::ostream& out, const PipelineSummary& s) {
    out << "N=" << s.n << " C=" << s.classes << " p=" << s.pruning_rate << " gamma=" << s.gamma
        << " clean=" << s.clean << " kept=" << s.kept << '\n';
    out << "per_class:";
    for (const auto& [cls, count] : s.per_class_counts) out << ' ' << cls << '=' << count;
    out << '\n';
}

}  // namespace topoprune
