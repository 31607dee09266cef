#include "hopsi/itemset.hpp"

#include <algorithm>
#include <limits>

#include "hopsi/errors.hpp"

namespace hopsi {

namespace {

void check_increasing(const std::vector<int>& idx) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0) throw UsageError("itemset index must be non-negative");
        if (i > 0 && idx[i] <= idx[i - 1])
            throw UsageError("itemset indices must be strictly increasing");
    }
}

}  // namespace

Itemset::Itemset(std::initializer_list<int> indices) : indices_(indices) {
    check_increasing(indices_);
}

Itemset::Itemset(std::span<const int> indices) : indices_(indices.begin(), indices.end()) {
    check_increasing(indices_);
}

Itemset Itemset::with(int index) const {
    if (!indices_.empty() && index <= indices_.back())
        throw UsageError("appended index must exceed the itemset maximum");
    Itemset out = *this;
    out.indices_.push_back(index);
    return out;
}

std::strong_ordering operator<=>(const Itemset& a, const Itemset& b) {
    return std::lexicographical_compare_three_way(a.indices_.begin(), a.indices_.end(),
                                                  b.indices_.begin(), b.indices_.end());
}

std::string Itemset::label(std::span<const std::string> names) const {
    std::string out;
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (i > 0) out += '*';
        const auto j = static_cast<std::size_t>(indices_[i]);
        if (j < names.size())
            out += names[j];
        else
            out += "z" + std::to_string(j + 1);
    }
    return out;
}

std::vector<Itemset> children(const Itemset& parent, int d, int max_order) {
    std::vector<Itemset> out;
    if (parent.order() >= max_order) return out;
    const int first = parent.empty() ? 0 : parent.back() + 1;
    for (int m = first; m < d; ++m) out.push_back(parent.with(m));
    return out;
}

std::optional<std::uint64_t> total_feature_count(int d, int max_order) {
    if (d < 1 || max_order < 1) throw UsageError("d and r must be positive");
    using u128 = unsigned __int128;
    constexpr u128 cap = std::numeric_limits<std::uint64_t>::max();
    u128 total = 0;
    u128 binom = 1;
    for (int rho = 1; rho <= std::min(d, max_order); ++rho) {
        // C(d, rho) = C(d, rho-1) * (d - rho + 1) / rho, exact at every step
        binom = binom * static_cast<u128>(d - rho + 1) / static_cast<u128>(rho);
        if (binom > cap) return std::nullopt;
        total += binom;
        if (total > cap) return std::nullopt;
    }
    return static_cast<std::uint64_t>(total);
}

long double total_feature_count_approx(int d, int max_order) {
    long double total = 0;
    long double binom = 1;
    for (int rho = 1; rho <= std::min(d, max_order); ++rho) {
        binom = binom * (d - rho + 1) / rho;
        total += binom;
    }
    return total;
}

}  // namespace hopsi
