#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracle/oracle.hpp"
#include "support.hpp"

using namespace hopsi;

TEST_CASE("reference normal cdf against high-precision values") {
    auto rel = [](long double got, long double want) {
        return std::fabs(got - want) / std::fabs(want);
    };
    CHECK(rel(oracle::reference_normal_cdf(1.0L), 0.8413447460685429485852L) < 1e-17L);
    CHECK(rel(oracle::reference_normal_cdf(2.0L), 0.9772498680518207928L) < 1e-17L);
    CHECK(rel(oracle::reference_normal_cdf(-3.0L), 0.0013498980316300945267L) < 1e-16L);
    CHECK(rel(oracle::reference_normal_sf(6.0L), 9.865876450376981407e-10L) < 1e-16L);
    CHECK(rel(oracle::reference_normal_sf(8.0L), 6.220960574271784123516e-16L) < 1e-16L);
    CHECK(rel(oracle::reference_trunc_norm_cdf(1.0L, 0.0L, 1.0L, 0.0L, 2.0L),
              0.71523277201090607594L) < 1e-16L);
    CHECK(rel(oracle::reference_trunc_norm_cdf(30.01, 0.0L, 1.0L, 30.0L, 31.0L),
              0.25946511883215678952L) < 1e-14L);
}

TEST_CASE("reference normal cdf symmetry") {
    for (int i = -80; i <= 80; ++i) {
        const long double x = i / 10.0L;
        const long double s = oracle::reference_normal_cdf(x) + oracle::reference_normal_cdf(-x);
        CHECK(std::fabs(s - 1.0L) < 1e-17L);
    }
}

TEST_CASE("all_itemsets enumerates combinations") {
    const auto all = oracle::all_itemsets(4, 3);
    CHECK(all.size() == 14);
    CHECK(std::is_sorted(all.begin(), all.end()));
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
    CHECK(all.front() == Itemset{0});
    CHECK(all.back() == Itemset{3});
}

TEST_CASE("oracle screening on the small example") {
    const auto sel = oracle::oracle_screen(testing::example_e1(), 2, 2);
    CHECK(sel.selected == std::vector<Itemset>{Itemset{0}, Itemset{0, 1}});
    CHECK(sel.scores == std::vector<double>{3.0, 2.0});
}

TEST_CASE("oracle screening is invariant to row permutations") {
    std::mt19937_64 rng(5150);
    for (int trial = 0; trial < 50; ++trial) {
        const auto inst = testing::random_instance(rng);
        std::vector<Eigen::Index> perm(static_cast<std::size_t>(inst.data.n()));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const int total = static_cast<int>(*total_feature_count(inst.data.d(), inst.max_order));
        const auto a = oracle::oracle_screen(inst.data, total, inst.max_order);
        const auto b = oracle::oracle_screen(inst.data.rows(perm), total, inst.max_order);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(std::abs(a.scores[i]) == doctest::Approx(std::abs(b.scores[i])).epsilon(1e-12));
            // near-ties may swap under rounding; isolated ranks must agree
            const double s = std::abs(a.scores[i]);
            const bool isolated =
                (i == 0 || std::abs(std::abs(a.scores[i - 1]) - s) > 1e-9) &&
                (i + 1 == a.size() || std::abs(std::abs(a.scores[i + 1]) - s) > 1e-9);
            if (isolated) CHECK(a.selected[i] == b.selected[i]);
        }
    }
}
