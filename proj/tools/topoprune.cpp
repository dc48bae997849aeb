// topoprune command-line driver.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "topoprune/corpus_io.hpp"
#include "topoprune/errors.hpp"
#include "topoprune/pipeline.hpp"

namespace fs = std::filesystem;
using namespace topoprune;

namespace {

enum ExitCode { kOk = 0, kUnexpected = 1, kConfig = 2, kData = 3, kNumeric = 4 };

struct CommonArgs {
    std::string config_file;
    std::vector<std::string> overrides;
    std::string input;
    std::string output;
    std::optional<std::uint64_t> seed;
    std::optional<double> pruning_rate;
    std::optional<double> gamma;
    std::string preset;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_output = true) {
    cmd->add_option("-c,--config", args.config_file, "key=value config file");
    cmd->add_option("-s,--set", args.overrides, "override a config key, e.g. manifold.n_neighbors=15");
    cmd->add_option("-i,--input", args.input, "embedding file (.csv or TPRN binary)");
    if (needs_output) cmd->add_option("-o,--output", args.output, "output directory");
    cmd->add_option("--seed", args.seed, "master seed");
}

void add_selection_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-p,--pruning-rate", args.pruning_rate, "fraction of samples removed");
    cmd->add_option("-g,--gamma", args.gamma, "fraction of samples removed as likely mislabeled");
    cmd->add_option("--preset", args.preset, "dataset preset for the default gamma: cifar10, cifar100, imagenet");
}

PipelineConfig build_config(const CommonArgs& args, bool require_gamma) {
    PipelineConfig cfg;
    if (!args.config_file.empty()) cfg.load_file(args.config_file);
    for (const auto& item : args.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + item + "'");
        cfg.set(item.substr(0, eq), item.substr(eq + 1));
    }
    if (!args.input.empty()) cfg.input = args.input;
    if (!args.output.empty()) cfg.output = args.output;
    if (args.seed) cfg.seed = *args.seed;
    if (args.pruning_rate) cfg.selection.pruning_rate = *args.pruning_rate;
    if (args.gamma) cfg.gamma = *args.gamma;
    if (!args.preset.empty()) cfg.preset = parse_preset(args.preset);
    if (cfg.input.empty()) throw ConfigError("no input file given (--input or io.input)");
    cfg.resolve(require_gamma);
    return cfg;
}

fs::path output_dir(const PipelineConfig& cfg) {
    if (cfg.output.empty()) throw ConfigError("no output directory given (--output or io.output)");
    std::error_code ec;
    fs::create_directories(cfg.output, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.output.string() + "': " + ec.message());
    return cfg.output;
}

std::pair<EmbeddingMatrix, LabelVector> load_input(const PipelineConfig& cfg) {
    if (!fs::exists(cfg.input)) throw IoError("input file '" + cfg.input.string() + "' does not exist");
    return load_embeddings(cfg.input, format_from_path(cfg.input));
}

Matrix load_projection(const fs::path& path, const LabelVector& labels) {
    if (!fs::exists(path)) throw IoError("coordinates file '" + path.string() + "' does not exist");
    auto [y, coord_labels] = load_coordinates(path);
    if (coord_labels.labels != labels.labels) {
        throw ShapeError("coordinate labels in '" + path.string() + "' do not match the input labels");
    }
    return y;
}

PhaseScores load_phase_scores(const fs::path& dir, std::size_t n) {
    auto read = [&](const char* name, ScoreKind kind) {
        return ScoreVector{load_score_values(dir / name, n), kind, false};
    };
    return {read(files::density, ScoreKind::density), read(files::persistence, ScoreKind::persistence),
            read(files::mislabel, ScoreKind::mislabel)};
}

void save_phase_scores(const PhaseScores& scores, const fs::path& dir) {
    save_scores(scores.density, dir / files::density);
    save_scores(scores.persistence, dir / files::persistence);
    save_scores(scores.mislabel, dir / files::mislabel);
}

void dump_plot_data(const Matrix& y, const LabelVector& labels, const PipelineConfig& cfg, const fs::path& dir) {
    const fs::path plot = dir / "plot";
    fs::create_directories(plot);
    const auto members = labels.class_members();
    for (std::size_t c = 0; c < members.size(); ++c) {
        const Matrix pts = y.select_rows(members[c]);
        const std::string stem = "class_" + std::to_string(c);
        write_diagram_csv(rips_persistence(pts, 1, cfg.persistence.max_edge_length), plot / (stem + "_diagram.csv"));
        const ScoreVector dens = kde_scores(pts, cfg.persistence.bandwidth);
        write_measure_csv(hilbert_signed_measure(pts, dens.values, cfg.persistence), cfg.persistence.homology_degree,
                          plot / (stem + "_measure.csv"));
    }
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_project(const CommonArgs& args) {
    const PipelineConfig cfg = build_config(args, false);
    const auto [z, labels] = load_input(cfg);
    const fs::path dir = output_dir(cfg);
    save_coordinates(run_projection(z, cfg), labels, dir / files::coordinates);
    return kOk;
}

int cmd_score(const CommonArgs& args, const std::string& coords, bool plot) {
    const PipelineConfig cfg = build_config(args, false);
    const auto [z, labels] = load_input(cfg);
    const fs::path dir = output_dir(cfg);
    const Matrix y = load_projection(coords.empty() ? dir / files::coordinates : fs::path(coords), labels);
    save_phase_scores(run_scoring(z, labels, y, cfg), dir);
    if (plot) dump_plot_data(y, labels, cfg, dir);
    return kOk;
}

int cmd_select(const CommonArgs& args, const std::string& scores_dir) {
    const PipelineConfig cfg = build_config(args, true);
    const auto [z, labels] = load_input(cfg);
    const fs::path dir = output_dir(cfg);
    const PhaseScores scores = load_phase_scores(scores_dir.empty() ? dir : fs::path(scores_dir), labels.size());
    std::vector<std::string> warnings;
    const SelectionResult result = run_selection(scores, labels, cfg, &warnings);
    print_warnings(warnings);
    save_selection(result, dir / files::selection);
    print_summary(std::cout, summarize(result, labels, cfg));
    return kOk;
}

int cmd_perturb(const CommonArgs& args, double multiplier, const std::string& out_file) {
    const PipelineConfig cfg = build_config(args, false);
    if (!(multiplier >= 0.0)) throw ConfigError("--multiplier must be >= 0");
    if (out_file.empty()) throw ConfigError("perturb needs --output FILE");
    const auto [z, labels] = load_input(cfg);
    const EmbeddingMatrix noisy = perturb_embeddings(z, multiplier, cfg.seed);
    save_embeddings(noisy, labels, out_file, format_from_path(out_file));
    return kOk;
}

int cmd_pipeline(const CommonArgs& args, bool plot) {
    const PipelineConfig cfg = build_config(args, true);
    const auto [z, labels] = load_input(cfg);
    const fs::path dir = output_dir(cfg);
    const Matrix y = run_projection(z, cfg);
    save_coordinates(y, labels, dir / files::coordinates);
    const PhaseScores scores = run_scoring(z, labels, y, cfg);
    save_phase_scores(scores, dir);
    if (plot) dump_plot_data(y, labels, cfg, dir);
    std::vector<std::string> warnings;
    const SelectionResult result = run_selection(scores, labels, cfg, &warnings);
    print_warnings(warnings);
    save_selection(result, dir / files::selection);
    print_summary(std::cout, summarize(result, labels, cfg));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topology-aware data pruning on precomputed embeddings"};
    app.require_subcommand(1);

    CommonArgs project_args, score_args, select_args, perturb_args, pipeline_args;
    std::string coords_path, scores_dir, perturb_out;
    double multiplier = 0.0;
    bool score_plot = false, pipeline_plot = false;

    auto* project = app.add_subcommand("project", "manifold projection to 2-D coordinates");
    add_common(project, project_args);

    auto* score = app.add_subcommand("score", "density, persistence and mislabel scores");
    add_common(score, score_args);
    score->add_option("--coords", coords_path, "coordinates CSV (default: OUTPUT/embedding2d.csv)");
    score->add_flag("--dump-plot-data", score_plot, "also write per-class diagrams and signed measures");

    auto* select = app.add_subcommand("select", "mislabel filtering and stratified selection");
    add_common(select, select_args);
    add_selection_flags(select, select_args);
    select->add_option("--scores", scores_dir, "directory holding the score CSVs (default: OUTPUT)");

    auto* perturb = app.add_subcommand("perturb", "add per-row Gaussian noise to embeddings");
    add_common(perturb, perturb_args, false);
    perturb->add_option("-m,--multiplier", multiplier, "noise multiplier on each row's standard deviation")
        ->required();
    perturb->add_option("-o,--output", perturb_out, "output embedding file")->required();

    auto* pipeline = app.add_subcommand("pipeline", "project, score, filter and select in one run");
    add_common(pipeline, pipeline_args);
    add_selection_flags(pipeline, pipeline_args);
    pipeline->add_flag("--dump-plot-data", pipeline_plot, "also write per-class diagrams and signed measures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*project) return cmd_project(project_args);
        if (*score) return cmd_score(score_args, coords_path, score_plot);
        if (*select) return cmd_select(select_args, scores_dir);
        if (*perturb) return cmd_perturb(perturb_args, multiplier, perturb_out);
        if (*pipeline) return cmd_pipeline(pipeline_args, pipeline_plot);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUnexpected;
    }
    return kUnexpected;
}
