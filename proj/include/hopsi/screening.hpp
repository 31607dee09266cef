#pragma once

#include <utility>
#include <vector>

#include "hopsi/dataset.hpp"
#include "hopsi/itemset.hpp"
#include "hopsi/metrics.hpp"
#include "hopsi/node_stats.hpp"

namespace hopsi {

/// The k features with the largest |x_j^T y|, ordered by (|score| desc,
/// itemset asc). Together with the data this fixes the selection event.
struct ScreeningResult {
    std::vector<Itemset> selected;
    std::vector<int> signs;  // +1 / -1; a zero score gets +1
    std::vector<double> scores;
    std::vector<Itemset> runners_up;  // next best features, ranked
    double kth_abs_score = 0.0;

    std::size_t size() const { return selected.size(); }
};

struct ScreeningOptions {
    bool prune = true;
    int runners_up = 30;
};

/// Upper bound on |x_l^T y| over the node and all of its descendants.
inline double ms_bound(const SignedSums& sy) { return sy.pos > sy.neg ? sy.pos : sy.neg; }
inline double ms_bound(const NodeStats& stats) { return ms_bound(stats.y); }

/// Strict total order used for selection: larger |score| first, then the
/// lexicographically smaller itemset.
bool ranks_before(double score_a, const Itemset& a, double score_b, const Itemset& b);

/// Top-k marginal screening over all itemsets of order <= max_order by a
/// pruned depth-first search. Throws UsageError when k > D or k < 1.
std::pair<ScreeningResult, TraversalMetrics> marginal_screen(const Dataset& data, int k,
                                                             int max_order,
                                                             ScreeningOptions options = {});

}  // namespace hopsi
