#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hopsi {

/// A sorted set of covariate column indices (0-based) naming one
/// interaction feature: {0, 2} is the product z_0 * z_2. The empty itemset
/// is the traversal root and never a feature.
class Itemset {
public:
    Itemset() = default;
    Itemset(std::initializer_list<int> indices);
    explicit Itemset(std::span<const int> indices);

    std::span<const int> indices() const { return indices_; }
    int order() const { return static_cast<int>(indices_.size()); }
    bool empty() const { return indices_.empty(); }
    int back() const { return indices_.back(); }

    /// Itemset with `index` appended; requires index > back().
    Itemset with(int index) const;

    /// Lexicographic order on the index sequence; a prefix sorts first, so
    /// this is also the depth-first visiting order of the itemset tree.
    friend std::strong_ordering operator<=>(const Itemset& a, const Itemset& b);
    friend bool operator==(const Itemset& a, const Itemset& b) = default;

    /// "z1*z3" style label with 1-based indices, or joined names when given.
    std::string label(std::span<const std::string> names = {}) const;

private:
    std::vector<int> indices_;
};

/// Children of `parent` in the itemset tree over `d` covariates, truncated
/// at depth `max_order`: parent + {m} for every m > max(parent), ascending.
std::vector<Itemset> children(const Itemset& parent, int d, int max_order);

/// D = sum_{rho=1}^{r} C(d, rho); nullopt when it does not fit in 64 bits.
std::optional<std::uint64_t> total_feature_count(int d, int max_order);

/// Same count as a long double, finite even when the integer overflows.
long double total_feature_count_approx(int d, int max_order);

}  // namespace hopsi
