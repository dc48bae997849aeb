#include "topoprune/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "topoprune/errors.hpp"
#include "topoprune/rng.hpp"

namespace topoprune {

Normalization parse_normalization(std::string_view name) {
    if (name == "global") return Normalization::global;
    if (name == "per_class") return Normalization::per_class;
    throw ConfigError("unknown normalization '" + std::string(name) + "' (expected global or per_class)");
}

void SelectionConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("selection.alpha must lie in [0, 1]");
    if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("selection.beta must lie in [0, 1]");
    if (!(pruning_rate > 0.0 && pruning_rate < 1.0)) throw ConfigError("selection.pruning_rate must lie in (0, 1)");
    if (strata < 1) throw ConfigError("selection.strata must be >= 1");
}

std::vector<double> min_max_normalize(std::span<const double> values) {
    std::vector<double> out(values.size(), 0.0);
    if (values.empty()) return out;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double span = *hi - *lo;
    if (!(span > 0.0)) return out;
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / span;
    return out;
}

namespace {

void check_lengths(const ScoreVector& pers, const ScoreVector& dens) {
    if (pers.size() != dens.size()) {
        throw ShapeError("persistence and density score vectors differ in length (" + std::to_string(pers.size()) +
                         " vs " + std::to_string(dens.size()) + ")");
    }
}

}  // namespace

ScoreVector unified_scores(const ScoreVector& pers, const ScoreVector& dens, double alpha, double beta) {
    check_lengths(pers, dens);
    const auto p = min_max_normalize(pers.values);
    const auto d = min_max_normalize(dens.values);
    ScoreVector out{std::vector<double>(p.size()), ScoreKind::unified, true};
    for (std::size_t i = 0; i < p.size(); ++i) out.values[i] = alpha * p[i] + beta * d[i];
    // alpha + beta may exceed 1.
    out.normalized = alpha + beta <= 1.0;
    return out;
}

ScoreVector unified_scores(const ScoreVector& pers, const ScoreVector& dens, double alpha, double beta,
                           const LabelVector& labels) {
    check_lengths(pers, dens);
    if (labels.size() != pers.size()) throw ShapeError("label count differs from score length");
    ScoreVector out{std::vector<double>(pers.size(), 0.0), ScoreKind::unified, alpha + beta <= 1.0};
    std::vector<double> p, d;
    for (const auto& members : labels.class_members()) {
        p.clear();
        d.clear();
        for (index_t i : members) {
            p.push_back(pers.values[static_cast<std::size_t>(i)]);
            d.push_back(dens.values[static_cast<std::size_t>(i)]);
        }
        const auto pn = min_max_normalize(p);
        const auto dn = min_max_normalize(d);
        for (std::size_t r = 0; r < members.size(); ++r) {
            out.values[static_cast<std::size_t>(members[r])] = alpha * pn[r] + beta * dn[r];
        }
    }
    return out;
}

namespace {

/// Largest-remainder split of `total` proportional to `weights` over the
/// classes flagged in `eligible`. Ties in the remainder go to the smaller class.
std::vector<std::size_t> apportion(std::size_t total, std::span<const std::size_t> weights,
                                   const std::vector<bool>& eligible) {
    std::vector<std::size_t> out(weights.size(), 0);
    unsigned long long weight_sum = 0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        if (eligible[c]) weight_sum += weights[c];
    }
    if (weight_sum == 0 || total == 0) return out;
    std::vector<unsigned long long> remainder(weights.size(), 0);
    std::size_t given = 0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        if (!eligible[c]) continue;
        const unsigned long long num = static_cast<unsigned long long>(total) * weights[c];
        out[c] = static_cast<std::size_t>(num / weight_sum);
        remainder[c] = num % weight_sum;
        given += out[c];
    }
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        if (eligible[c]) order.push_back(c);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t r = 0; given < total; ++r) {
        ++out[order[r % order.size()]];
        ++given;
    }
    return out;
}

}  // namespace

std::vector<std::size_t> class_budgets(std::span<const std::size_t> original_counts,
                                       std::span<const std::size_t> clean_counts, double pruning_rate,
                                       std::vector<std::string>* warnings) {
    if (original_counts.size() != clean_counts.size()) throw ShapeError("class count vectors differ in length");
    if (!(pruning_rate > 0.0 && pruning_rate < 1.0)) throw ParameterError("pruning_rate must lie in (0, 1)");
    const std::size_t classes = original_counts.size();
    const std::size_t n_clean = std::accumulate(clean_counts.begin(), clean_counts.end(), std::size_t{0});
    const auto total = static_cast<std::size_t>(std::llround((1.0 - pruning_rate) * static_cast<double>(n_clean)));

    std::vector<bool> open(classes, true);
    std::vector<std::size_t> budget = apportion(total, original_counts, open);
    // Saturate classes with too few clean samples and re-split the surplus.
    while (true) {
        std::size_t surplus = 0;
        for (std::size_t c = 0; c < classes; ++c) {
            if (open[c] && budget[c] >= clean_counts[c]) {
                if (budget[c] > clean_counts[c]) {
                    surplus += budget[c] - clean_counts[c];
                    if (warnings) {
                        warnings->push_back("class " + std::to_string(c) + " budget " + std::to_string(budget[c]) +
                                            " exceeds its " + std::to_string(clean_counts[c]) +
                                            " clean samples; keeping all of them");
                    }
                }
                budget[c] = clean_counts[c];
                open[c] = false;
            }
        }
        if (surplus == 0) break;
        if (std::none_of(open.begin(), open.end(), [](bool b) { return b; })) {
            if (warnings) warnings->push_back("surplus of " + std::to_string(surplus) + " samples could not be placed");
            break;
        }
        const auto extra = apportion(surplus, original_counts, open);
        for (std::size_t c = 0; c < classes; ++c) budget[c] += extra[c];
    }
    return budget;
}

std::vector<std::size_t> allocate_strata(std::span<const std::size_t> populations, std::size_t budget) {
    std::vector<std::size_t> order;
    for (std::size_t s = 0; s < populations.size(); ++s) {
        if (populations[s] > 0) order.push_back(s);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return populations[a] < populations[b]; });
    std::vector<std::size_t> take(populations.size(), 0);
    std::size_t remaining = budget;
    std::size_t strata_left = order.size();
    for (std::size_t s : order) {
        const std::size_t quota = (remaining + strata_left - 1) / strata_left;
        take[s] = std::min(populations[s], quota);
        remaining -= take[s];
        --strata_left;
    }
    return take;
}

SelectionResult stratified_sample(std::span<const index_t> clean_indices, const ScoreVector& unified,
                                  const LabelVector& labels, const SelectionConfig& config,
                                  std::vector<std::string>* warnings) {
    config.validate();
    if (unified.size() != labels.size()) throw ShapeError("unified score length differs from label count");
    if (clean_indices.empty()) throw ParameterError("stratified_sample needs a nonempty clean set");
    const auto classes = static_cast<std::size_t>(labels.num_classes);

    std::vector<std::vector<index_t>> clean_by_class(classes);
    for (index_t i : clean_indices) {
        if (i < 0 || static_cast<std::size_t>(i) >= labels.size()) {
            throw ParameterError("clean index " + std::to_string(i) + " out of range");
        }
        clean_by_class[static_cast<std::size_t>(labels.labels[static_cast<std::size_t>(i)])].push_back(i);
    }
    std::vector<std::size_t> clean_counts(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        auto& members = clean_by_class[c];
        std::sort(members.begin(), members.end());
        if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
            throw ParameterError("clean indices contain duplicates");
        }
        clean_counts[c] = members.size();
    }
    const auto budgets = class_budgets(labels.class_counts(), clean_counts, config.pruning_rate, warnings);

    SelectionResult result;
    result.pruning_rate = config.pruning_rate;
    const std::size_t bins = config.strata;
    for (std::size_t c = 0; c < classes; ++c) {
        const auto& members = clean_by_class[c];
        result.per_class_counts[static_cast<index_t>(c)] = budgets[c];
        if (budgets[c] == 0) continue;
        if (budgets[c] >= members.size()) {
            result.kept_indices.insert(result.kept_indices.end(), members.begin(), members.end());
            continue;
        }
        double lo = unified.values[static_cast<std::size_t>(members.front())];
        double hi = lo;
        for (index_t i : members) {
            lo = std::min(lo, unified.values[static_cast<std::size_t>(i)]);
            hi = std::max(hi, unified.values[static_cast<std::size_t>(i)]);
        }
        const double width = hi - lo;
        std::vector<std::vector<index_t>> strata(bins);
        for (index_t i : members) {
            std::size_t bin = 0;
            if (width > 0.0) {
                const double pos = (unified.values[static_cast<std::size_t>(i)] - lo) / width;
                bin = std::min(bins - 1, static_cast<std::size_t>(pos * static_cast<double>(bins)));
            }
            strata[bin].push_back(i);
        }
        std::vector<std::size_t> populations(bins);
        for (std::size_t s = 0; s < bins; ++s) populations[s] = strata[s].size();
        const auto take = allocate_strata(populations, budgets[c]);
        for (std::size_t s = 0; s < bins; ++s) {
            if (take[s] == 0) continue;
            auto pool = strata[s];
            auto rng = SplitMix64::keyed(config.seed, {c, s});
            for (std::size_t t = 0; t < take[s]; ++t) {
                const std::size_t pick = t + static_cast<std::size_t>(rng.below(pool.size() - t));
                std::swap(pool[t], pool[pick]);
            }
            result.kept_indices.insert(result.kept_indices.end(), pool.begin(),
                                       pool.begin() + static_cast<std::ptrdiff_t>(take[s]));
        }
    }
    std::sort(result.kept_indices.begin(), result.kept_indices.end());
    return result;
}

}  // namespace topoprune
