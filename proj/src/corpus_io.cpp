#include "topoprune/corpus_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "topoprune/errors.hpp"
#include "topoprune/rng.hpp"

namespace topoprune {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary embedding I/O assumes a little-endian host");

constexpr std::array<char, 4> kMagic = {'T', 'P', 'R', 'N'};

std::string describe(const std::filesystem::path& path) { return "'" + path.string() + "'"; }

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = {}) {
    std::ifstream in(path, std::ios::in | mode);
    if (!in) {
        throw IoError("cannot open " + describe(path) + " for reading");
    }
    return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
    std::ofstream out(path, std::ios::out | std::ios::trunc | mode);
    if (!out) {
        throw IoError("cannot open " + describe(path) + " for writing");
    }
    return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw IoError("write to " + describe(path) + " failed");
    }
}

template <class T>
void read_pod(std::istream& in, T& value, const std::filesystem::path& path, const char* what) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) {
        throw FormatError(describe(path) + ": truncated " + std::string(what));
    }
}

template <class T>
void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

template <class T>
T parse_number(std::string_view field, const std::filesystem::path& path, std::size_t line_no) {
    T value{};
    // from_chars rejects a leading '+'.
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw FormatError(describe(path) + " line " + std::to_string(line_no) + ": cannot parse '" +
                          std::string(field) + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) {
            throw DataError(describe(path) + " line " + std::to_string(line_no) + ": non-finite value '" +
                            std::string(field) + "'");
        }
    }
    return value;
}

template <class T>
std::string format_number(T value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

/// Parses a CSV of numeric feature columns plus a trailing label column.
template <class Value>
std::pair<std::vector<Value>, std::vector<index_t>> read_feature_csv(const std::filesystem::path& path,
                                                                     std::size_t& dim) {
    auto in = open_in(path);
    std::vector<Value> values;
    std::vector<index_t> labels;
    std::string line;
    std::size_t line_no = 0;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_commas(line);
        if (columns == 0) {
            columns = fields.size();
            if (columns < 2) {
                throw ShapeError(describe(path) + " line " + std::to_string(line_no) +
                                 ": need at least one feature column and a label column");
            }
        } else if (fields.size() != columns) {
            throw ShapeError(describe(path) + " line " + std::to_string(line_no) + ": expected " +
                             std::to_string(columns) + " columns, found " + std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c + 1 < columns; ++c) {
            values.push_back(parse_number<Value>(fields[c], path, line_no));
        }
        const auto label = parse_number<index_t>(fields.back(), path, line_no);
        if (label < 0) {
            throw DataError(describe(path) + " line " + std::to_string(line_no) + ": negative label");
        }
        labels.push_back(label);
    }
    if (labels.empty()) {
        throw ShapeError(describe(path) + ": no samples");
    }
    dim = columns - 1;
    return {std::move(values), std::move(labels)};
}

LabelVector make_labels(std::vector<index_t> labels) {
    LabelVector out;
    out.num_classes = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    out.labels = std::move(labels);
    return out;
}

std::pair<EmbeddingMatrix, LabelVector> load_binary(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::binary);
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) {
        throw FormatError(describe(path) + ": missing TPRN magic bytes");
    }
    std::uint32_t version = 0;
    std::uint64_t n = 0, d = 0, c = 0;
    read_pod(in, version, path, "header");
    read_pod(in, n, path, "header");
    read_pod(in, d, path, "header");
    read_pod(in, c, path, "header");
    if (version != kBinaryVersion) {
        throw FormatError(describe(path) + ": unsupported version " + std::to_string(version));
    }
    if (n == 0 || d == 0 || c == 0 || c > static_cast<std::uint64_t>(INT32_MAX)) {
        throw FormatError(describe(path) + ": header declares N=" + std::to_string(n) +
                          ", D=" + std::to_string(d) + ", C=" + std::to_string(c));
    }
    // Check the payload size before allocating.
    const auto header_end = in.tellg();
    in.seekg(0, std::ios::end);
    const auto file_end = in.tellg();
    in.seekg(header_end);
    const auto payload = static_cast<std::uint64_t>(file_end - header_end);
    if (n > payload / 4 || d > payload / 4 || payload != n * d * 4 + n * 4) {
        throw ShapeError(describe(path) + ": payload of " + std::to_string(payload) +
                         " bytes does not match N=" + std::to_string(n) + ", D=" + std::to_string(d));
    }

    EmbeddingMatrix z;
    z.n_samples = n;
    z.dim = d;
    z.data.resize(n * d);
    in.read(reinterpret_cast<char*>(z.data.data()), static_cast<std::streamsize>(z.data.size() * sizeof(float)));
    LabelVector labels;
    labels.num_classes = static_cast<index_t>(c);
    labels.labels.resize(n);
    in.read(reinterpret_cast<char*>(labels.labels.data()),
            static_cast<std::streamsize>(labels.labels.size() * sizeof(index_t)));
    if (!in) {
        throw FormatError(describe(path) + ": truncated payload");
    }
    return {std::move(z), std::move(labels)};
}

}  // namespace

EmbeddingFormat format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? EmbeddingFormat::csv : EmbeddingFormat::binary;
}

std::pair<EmbeddingMatrix, LabelVector> load_embeddings(const std::filesystem::path& path,
                                                        EmbeddingFormat format) {
    if (!std::filesystem::exists(path)) {
        throw IoError("input file " + describe(path) + " does not exist");
    }
    std::pair<EmbeddingMatrix, LabelVector> result;
    if (format == EmbeddingFormat::binary) {
        result = load_binary(path);
    } else {
        std::size_t dim = 0;
        auto [values, labels] = read_feature_csv<float>(path, dim);
        result.first.n_samples = labels.size();
        result.first.dim = dim;
        result.first.data = std::move(values);
        result.second = make_labels(std::move(labels));
    }
    result.first.validate();
    result.second.validate();
    if (result.second.size() != result.first.n_samples) {
        throw ShapeError(describe(path) + ": label count differs from row count");
    }
    return result;
}

void save_embeddings(const EmbeddingMatrix& z, const LabelVector& labels, const std::filesystem::path& path,
                     EmbeddingFormat format) {
    z.validate();
    labels.validate();
    if (labels.size() != z.n_samples) {
        throw ShapeError("label count " + std::to_string(labels.size()) + " differs from row count " +
                         std::to_string(z.n_samples));
    }
    if (format == EmbeddingFormat::binary) {
        auto out = open_out(path, std::ios::binary);
        out.write(kMagic.data(), kMagic.size());
        write_pod(out, kBinaryVersion);
        write_pod(out, static_cast<std::uint64_t>(z.n_samples));
        write_pod(out, static_cast<std::uint64_t>(z.dim));
        write_pod(out, static_cast<std::uint64_t>(labels.num_classes));
        out.write(reinterpret_cast<const char*>(z.data.data()),
                  static_cast<std::streamsize>(z.data.size() * sizeof(float)));
        out.write(reinterpret_cast<const char*>(labels.labels.data()),
                  static_cast<std::streamsize>(labels.labels.size() * sizeof(index_t)));
        finish_write(out, path);
        return;
    }
    auto out = open_out(path);
    for (std::size_t i = 0; i < z.n_samples; ++i) {
        for (float v : z.row(i)) {
            out << format_number(v) << ',';
        }
        out << labels.labels[i] << '\n';
    }
    finish_write(out, path);
}

void save_coordinates(const Matrix& y, const LabelVector& labels, const std::filesystem::path& path) {
    if (labels.size() != y.rows()) {
        throw ShapeError("label count differs from coordinate row count");
    }
    auto out = open_out(path);
    for (std::size_t i = 0; i < y.rows(); ++i) {
        for (double v : y.row(i)) {
            if (!std::isfinite(v)) {
                throw NumericError("non-finite coordinate at row " + std::to_string(i));
            }
            out << format_number(v) << ',';
        }
        out << labels.labels[i] << '\n';
    }
    finish_write(out, path);
}

std::pair<Matrix, LabelVector> load_coordinates(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("input file " + describe(path) + " does not exist");
    }
    std::size_t dim = 0;
    auto [values, labels] = read_feature_csv<double>(path, dim);
    const std::size_t n = labels.size();
    LabelVector lv = make_labels(std::move(labels));
    lv.validate();
    return {Matrix(n, dim, std::move(values)), std::move(lv)};
}

void save_scores(const ScoreVector& scores, const std::filesystem::path& path) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores.values[i])) {
            throw NumericError("non-finite " + std::string(to_string(scores.kind)) + " score at index " +
                               std::to_string(i));
        }
    }
    auto out = open_out(path);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out << i << ',' << format_number(scores.values[i]) << '\n';
    }
    finish_write(out, path);
}

std::vector<double> load_score_values(const std::filesystem::path& path, std::size_t n) {
    if (!std::filesystem::exists(path)) {
        throw IoError("score file " + describe(path) + " does not exist");
    }
    auto in = open_in(path);
    std::vector<double> values(n, 0.0);
    std::vector<bool> seen(n, false);
    std::size_t rows = 0;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_commas(line);
        if (fields.size() != 2) {
            throw ShapeError(describe(path) + " line " + std::to_string(line_no) + ": expected 'index,score'");
        }
        const auto idx = parse_number<long long>(fields[0], path, line_no);
        const auto value = parse_number<double>(fields[1], path, line_no);
        ++rows;
        if (idx < 0 || static_cast<std::size_t>(idx) >= n || seen[static_cast<std::size_t>(idx)]) {
            throw ShapeError(describe(path) + " line " + std::to_string(line_no) + ": index " +
                             std::to_string(idx) + " out of range or repeated for N=" + std::to_string(n));
        }
        seen[static_cast<std::size_t>(idx)] = true;
        values[static_cast<std::size_t>(idx)] = value;
    }
    if (rows != n) {
        throw ShapeError(describe(path) + ": expected " + std::to_string(n) + " rows, found " +
                         std::to_string(rows));
    }
    return values;
}

void save_selection(const SelectionResult& result, const std::filesystem::path& path) {
    if (!(result.pruning_rate > 0.0 && result.pruning_rate < 1.0)) {
        throw ParameterError("pruning_rate must lie in (0, 1), got " + format_number(result.pruning_rate));
    }
    if (!std::is_sorted(result.kept_indices.begin(), result.kept_indices.end()) ||
        std::adjacent_find(result.kept_indices.begin(), result.kept_indices.end()) != result.kept_indices.end()) {
        throw ParameterError("kept_indices must be sorted and unique");
    }
    nlohmann::ordered_json j;
    j["kept_indices"] = result.kept_indices;
    j["pruning_rate"] = result.pruning_rate;
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (const auto& [cls, count] : result.per_class_counts) {
        counts[std::to_string(cls)] = count;
    }
    j["per_class_counts"] = counts;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    finish_write(out, path);
}

SelectionResult load_selection(const std::filesystem::path& path) {
    auto in = open_in(path);
    SelectionResult result;
    try {
        const auto j = nlohmann::json::parse(in);
        result.kept_indices = j.at("kept_indices").get<std::vector<index_t>>();
        result.pruning_rate = j.at("pruning_rate").get<double>();
        for (const auto& [key, value] : j.at("per_class_counts").items()) {
            result.per_class_counts[static_cast<index_t>(std::stol(key))] = value.get<std::size_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(describe(path) + ": " + e.what());
    } catch (const std::logic_error& e) {
        throw FormatError(describe(path) + ": bad class key: " + e.what());
    }
    return result;
}

EmbeddingMatrix perturb_embeddings(const EmbeddingMatrix& z, double multiplier, std::uint64_t seed) {
    if (!(multiplier >= 0.0) || !std::isfinite(multiplier)) {
        throw ParameterError("noise multiplier must be a finite nonnegative number");
    }
    EmbeddingMatrix out = z;
    if (multiplier == 0.0) return out;
    for (std::size_t i = 0; i < z.n_samples; ++i) {
        const auto row = z.row(i);
        double mean = 0.0;
        for (float v : row) mean += v;
        mean /= static_cast<double>(z.dim);
        double var = 0.0;
        for (float v : row) var += (v - mean) * (v - mean);
        const double sigma = std::sqrt(var / static_cast<double>(z.dim));
        if (sigma == 0.0) continue;
        auto rng = SplitMix64::keyed(seed, {i});
        auto dst = out.row(i);
        for (std::size_t c = 0; c < z.dim; ++c) {
            dst[c] = static_cast<float>(row[c] + multiplier * sigma * rng.normal());
        }
    }
    return out;
}

}  // namespace topoprune
