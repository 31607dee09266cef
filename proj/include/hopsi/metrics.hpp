#pragma once

#include <cstdint>
#include <optional>

namespace hopsi {

/// Work done by one or more walks of the itemset tree.
struct TraversalMetrics {
    std::uint64_t nodes_visited = 0;
    /// D for one walk; nullopt when D overflows 64 bits.
    std::optional<std::uint64_t> total_nodes;
    /// Number of full-tree walks the visit count is spread over.
    std::uint64_t passes = 1;
    double elapsed = 0.0;

    /// Fraction of the tree actually visited ("1 - pruning rate"),
    /// nodes_visited / (passes * D).
    double visit_rate(long double total_if_overflow = 0) const {
        const long double total = total_nodes ? static_cast<long double>(*total_nodes)
                                              : total_if_overflow;
        if (total <= 0 || passes == 0) return 0.0;
        return static_cast<double>(static_cast<long double>(nodes_visited) /
                                   (static_cast<long double>(passes) * total));
    }
};

}  // namespace hopsi
