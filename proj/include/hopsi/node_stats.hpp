#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hopsi/itemset.hpp"

namespace hopsi {

/// One nonzero entry of a feature column.
struct SupportEntry {
    Eigen::Index row;
    double value;
};

/// Sign-partitioned inner product of a feature column x with a vector v:
/// pos = sum_{v_i > 0} x_i v_i, neg = -sum_{v_i < 0} x_i v_i, both >= 0.
/// Each is nonincreasing along any root-to-leaf path of the itemset tree.
struct SignedSums {
    double pos = 0.0;
    double neg = 0.0;

    double net() const { return pos - neg; }
};

/// A feature column (stored by its nonzero support, ascending rows) with its
/// sums against the response and, optionally, a contrast direction c.
struct NodeStats {
    Itemset itemset;
    std::vector<SupportEntry> support;
    SignedSums y;
    std::optional<SignedSums> c;

    /// x^T y
    double score() const { return y.net(); }
    Eigen::VectorXd column(Eigen::Index n) const;
};

/// Product of the itemset's columns of Z.
Eigen::VectorXd feature_column(const Itemset& itemset, const Eigen::MatrixXd& z);

/// Stats of the empty root itemset (the all-ones column).
NodeStats root_stats(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                     const Eigen::VectorXd* c = nullptr);

/// Stats of parent + {new_index}, computed over the parent's support only.
NodeStats descend_stats(const NodeStats& parent, int new_index, const Eigen::MatrixXd& z,
                        const Eigen::VectorXd& y, const Eigen::VectorXd* c = nullptr);

/// Stats of an arbitrary itemset by successive descents from the root.
NodeStats node_stats(const Itemset& itemset, const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                     const Eigen::VectorXd* c = nullptr);

namespace detail {

/// Shared kernel: multiply the parent support by column `index` of z,
/// keep the nonzero products in `out`, and accumulate the signed sums.
inline void extend_support(std::span<const SupportEntry> parent, const Eigen::MatrixXd& z,
                           int index, const Eigen::VectorXd& y, const Eigen::VectorXd* c,
                           std::vector<SupportEntry>& out, SignedSums& sy, SignedSums& sc) {
    out.clear();
    sy = {};
    sc = {};
    const double* col = z.col(index).data();
    for (const auto& e : parent) {
        const double w = e.value * col[e.row];
        if (!(w > 0.0)) continue;
        out.push_back({e.row, w});
        const double yi = y[e.row];
        if (yi > 0.0)
            sy.pos += w * yi;
        else if (yi < 0.0)
            sy.neg -= w * yi;
        if (c != nullptr) {
            const double ci = (*c)[e.row];
            if (ci > 0.0)
                sc.pos += w * ci;
            else if (ci < 0.0)
                sc.neg -= w * ci;
        }
    }
}

}  // namespace detail

/// What a tree visitor sees at each node.
struct NodeView {
    std::span<const int> path;
    std::span<const SupportEntry> support;
    SignedSums y;
    SignedSums c;

    int depth() const { return static_cast<int>(path.size()); }
};

/// Depth-first, lexicographic walk of every itemset of order 1..max_order.
/// `visit(const NodeView&) -> bool` decides whether to descend below a node.
/// Memory is O(n * max_order); returns the number of nodes visited.
template <class Visitor>
std::uint64_t walk_itemset_tree(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                const Eigen::VectorXd* c, int max_order, Visitor&& visit) {
    const int d = static_cast<int>(z.cols());
    const auto depth_limit = static_cast<std::size_t>(std::min(max_order, d));
    std::vector<std::vector<SupportEntry>> levels(depth_limit + 1);
    levels[0].reserve(static_cast<std::size_t>(z.rows()));
    for (Eigen::Index i = 0; i < z.rows(); ++i) levels[0].push_back({i, 1.0});
    std::vector<int> path(depth_limit);
    std::uint64_t visited = 0;

    auto recurse = [&](auto& self, std::size_t depth, int first) -> void {
        auto& out = levels[depth + 1];
        for (int m = first; m < d; ++m) {
            NodeView view;
            detail::extend_support(levels[depth], z, m, y, c, out, view.y, view.c);
            path[depth] = m;
            view.path = std::span<const int>(path.data(), depth + 1);
            view.support = out;
            ++visited;
            if (visit(std::as_const(view)) && depth + 1 < depth_limit) self(self, depth + 1, m + 1);
        }
    };
    if (depth_limit > 0) recurse(recurse, 0, 0);
    return visited;
}

}  // namespace hopsi
