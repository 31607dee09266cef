#include "hopsi/screening.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>

#include "hopsi/errors.hpp"

namespace hopsi {

namespace {

constexpr double kBoundMargin = 1e-10;

struct Candidate {
    double score;
    Itemset itemset;
};

// Heap ordering that keeps the worst-ranked candidate on top.
struct WorstOnTop {
    bool operator()(const Candidate& a, const Candidate& b) const {
        return ranks_before(a.score, a.itemset, b.score, b.itemset);
    }
};

// Same comparison as ranks_before, against a path that is not yet an Itemset.
bool path_ranks_before(double score, std::span<const int> path, const Candidate& other) {
    const double a = std::abs(score);
    const double b = std::abs(other.score);
    if (a != b) return a > b;
    const auto idx = other.itemset.indices();
    return std::lexicographical_compare(path.begin(), path.end(), idx.begin(), idx.end());
}

}  // namespace

bool ranks_before(double score_a, const Itemset& a, double score_b, const Itemset& b) {
    const double x = std::abs(score_a);
    const double y = std::abs(score_b);
    if (x != y) return x > y;
    return a < b;
}

std::pair<ScreeningResult, TraversalMetrics> marginal_screen(const Dataset& data, int k,
                                                             int max_order,
                                                             ScreeningOptions options) {
    if (max_order < 1) throw UsageError("maximum interaction order must be at least 1");
    const auto total = total_feature_count(data.d(), max_order);
    if (k < 1) throw UsageError("screening size k must be at least 1");
    if (total && static_cast<std::uint64_t>(k) > *total)
        throw UsageError("screening size k = " + std::to_string(k) +
                         " exceeds the number of features D = " + std::to_string(*total));

    const auto start = std::chrono::steady_clock::now();
    std::priority_queue<Candidate, std::vector<Candidate>, WorstOnTop> top;
    if (options.runners_up < 0) throw UsageError("runner-up count must be non-negative");
    auto capacity = static_cast<std::size_t>(k) + static_cast<std::size_t>(options.runners_up);
    if (total) capacity = std::min<std::uint64_t>(capacity, *total);
    double kth = -std::numeric_limits<double>::infinity();

    const Eigen::VectorXd& y = data.y();
    auto visit = [&](const NodeView& node) {
        // plain row-order x^T y, reproducible from the materialized column
        double score = 0.0;
        for (const auto& e : node.support) score += e.value * y[e.row];
        if (top.size() < capacity) {
            top.push({score, Itemset(node.path)});
            if (top.size() == capacity) kth = std::abs(top.top().score);
        } else if (path_ranks_before(score, node.path, top.top())) {
            top.pop();
            top.push({score, Itemset(node.path)});
            kth = std::abs(top.top().score);
        }
        if (!options.prune || top.size() < capacity) return true;
        // no descendant beats max(pos, neg); ties at kth still explored
        return !(ms_bound(node.y) * (1.0 + kBoundMargin) < kth);
    };
    const auto visited = walk_itemset_tree(data.z(), data.y(), nullptr, max_order, visit);

    ScreeningResult result;
    std::vector<Candidate> sorted;
    sorted.reserve(top.size());
    while (!top.empty()) {
        sorted.push_back(top.top());
        top.pop();
    }
    std::reverse(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i >= static_cast<std::size_t>(k)) {
            result.runners_up.push_back(sorted[i].itemset);
            continue;
        }
        result.selected.push_back(sorted[i].itemset);
        result.scores.push_back(sorted[i].score);
        result.signs.push_back(sorted[i].score < 0.0 ? -1 : 1);
    }
    result.kth_abs_score = std::abs(result.scores.back());

    TraversalMetrics metrics;
    metrics.nodes_visited = visited;
    metrics.total_nodes = total;
    metrics.elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(result), metrics};
}

}  // namespace hopsi
