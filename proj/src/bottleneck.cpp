#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "topoprune/errors.hpp"
#include "topoprune/persistence.hpp"

namespace topoprune {
namespace {

/// Hopcroft-Karp maximum matching on a bipartite graph given as adjacency
/// lists from left to right vertices.
class BipartiteMatcher {
public:
    BipartiteMatcher(std::size_t left, std::size_t right, const std::vector<std::vector<std::size_t>>& adj)
        : adj_(adj), match_left_(left, kNone), match_right_(right, kNone), layer_(left) {}

    std::size_t maximum_matching() {
        std::size_t matched = 0;
        while (build_layers()) {
            for (std::size_t l = 0; l < match_left_.size(); ++l) {
                if (match_left_[l] == kNone && augment(l)) ++matched;
            }
        }
        return matched;
    }

private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    bool build_layers() {
        std::queue<std::size_t> frontier;
        for (std::size_t l = 0; l < match_left_.size(); ++l) {
            if (match_left_[l] == kNone) {
                layer_[l] = 0;
                frontier.push(l);
            } else {
                layer_[l] = kNone;
            }
        }
        bool reachable_free = false;
        while (!frontier.empty()) {
            const std::size_t l = frontier.front();
            frontier.pop();
            for (std::size_t r : adj_[l]) {
                const std::size_t next = match_right_[r];
                if (next == kNone) {
                    reachable_free = true;
                } else if (layer_[next] == kNone) {
                    layer_[next] = layer_[l] + 1;
                    frontier.push(next);
                }
            }
        }
        return reachable_free;
    }

    bool augment(std::size_t l) {
        for (std::size_t r : adj_[l]) {
            const std::size_t next = match_right_[r];
            if (next == kNone || (layer_[next] == layer_[l] + 1 && augment(next))) {
                match_left_[l] = r;
                match_right_[r] = l;
                return true;
            }
        }
        layer_[l] = kNone;
        return false;
    }

    const std::vector<std::vector<std::size_t>>& adj_;
    std::vector<std::size_t> match_left_;
    std::vector<std::size_t> match_right_;
    std::vector<std::size_t> layer_;
};

double linf(const Interval& x, const Interval& y) {
    return std::max(std::abs(x.birth - y.birth), std::abs(x.death - y.death));
}

double to_diagonal(const Interval& x) { return 0.5 * (x.death - x.birth); }

// Left side: a_0..a_{p-1}, then diagonal slots for b. Right side: b_0..b_{q-1},
// then diagonal slots for a. Diagonal slots match each other at no cost.
bool perfect_matching_within(std::span<const Interval> a, std::span<const Interval> b, double delta) {
    const std::size_t p = a.size();
    const std::size_t q = b.size();
    std::vector<std::vector<std::size_t>> adj(p + q);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < q; ++j) {
            if (linf(a[i], b[j]) <= delta) adj[i].push_back(j);
        }
        if (to_diagonal(a[i]) <= delta) adj[i].push_back(q + i);
    }
    for (std::size_t j = 0; j < q; ++j) {
        if (to_diagonal(b[j]) <= delta) adj[p + j].push_back(j);
        for (std::size_t i = 0; i < p; ++i) adj[p + j].push_back(q + i);
    }
    BipartiteMatcher matcher(p + q, q + p, adj);
    return matcher.maximum_matching() == p + q;
}

}  // namespace

double bottleneck_distance(std::span<const Interval> a, std::span<const Interval> b) {
    for (const auto* side : {&a, &b}) {
        for (const auto& x : *side) {
            if (!std::isfinite(x.birth) || !std::isfinite(x.death)) {
                throw ParameterError("bottleneck_distance on intervals needs finite bars");
            }
        }
    }
    if (a.empty() && b.empty()) return 0.0;

    // The optimum is one of the pairwise or diagonal costs.
    std::vector<double> candidates = {0.0};
    for (const auto& x : a) candidates.push_back(to_diagonal(x));
    for (const auto& y : b) candidates.push_back(to_diagonal(y));
    for (const auto& x : a) {
        for (const auto& y : b) candidates.push_back(linf(x, y));
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::size_t lo = 0;
    std::size_t hi = candidates.size() - 1;  // matching everything to the diagonal always fits here
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (perfect_matching_within(a, b, candidates[mid])) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return candidates[lo];
}

double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, int degree) {
    const auto ea = a.essential_births(degree);
    const auto eb = b.essential_births(degree);
    if (ea.size() != eb.size()) return kInfinity;
    double essential = 0.0;
    for (std::size_t i = 0; i < ea.size(); ++i) essential = std::max(essential, std::abs(ea[i] - eb[i]));
    const auto ia = a.intervals(degree);
    const auto ib = b.intervals(degree);
    return std::max(essential, bottleneck_distance(ia, ib));
}

double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b) {
    return std::max(bottleneck_distance(a, b, 0), bottleneck_distance(a, b, 1));
}

}  // namespace topoprune
