#include <doctest.h>

#include <map>
#include <random>

#include "hopsi/errors.hpp"
#include "hopsi/node_stats.hpp"
#include "oracle/oracle.hpp"
#include "support.hpp"

using namespace hopsi;

namespace {

// Dense from-scratch stats for comparison with the incremental kernel.
struct DenseSums {
    double y_pos = 0, y_neg = 0, c_pos = 0, c_neg = 0;
};

DenseSums dense_sums(const Itemset& s, const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& c) {
    DenseSums out;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        double x = 1.0;
        for (int j : s.indices()) x *= z(i, j);
        if (y[i] > 0) out.y_pos += x * y[i];
        if (y[i] < 0) out.y_neg -= x * y[i];
        if (c[i] > 0) out.c_pos += x * c[i];
        if (c[i] < 0) out.c_neg -= x * c[i];
    }
    return out;
}

}  // namespace

TEST_CASE("itemset ordering and validation") {
    CHECK(Itemset{0} < Itemset{0, 1});
    CHECK(Itemset{0, 1} < Itemset{0, 2});
    CHECK(Itemset{0, 2} < Itemset{1});
    CHECK(Itemset{1, 3} == Itemset{1, 3});
    CHECK_THROWS_AS(Itemset({2, 1}), UsageError);
    CHECK_THROWS_AS(Itemset({1, 1}), UsageError);
    CHECK(Itemset{0, 2}.label() == "z1*z3");
    const std::vector<std::string> names{"a", "b", "c"};
    CHECK(Itemset{1, 2}.label(names) == "b*c");
}

TEST_CASE("children follow the prefix tree") {
    // 1-based {2} with d = 4, r = 3 -> {2,3}, {2,4}
    CHECK(children(Itemset{1}, 4, 3) == std::vector<Itemset>{Itemset{1, 2}, Itemset{1, 3}});
    CHECK(children(Itemset{0, 1, 2}, 4, 3).empty());
    CHECK(children(Itemset{}, 4, 3) ==
          std::vector<Itemset>{Itemset{0}, Itemset{1}, Itemset{2}, Itemset{3}});
    CHECK(children(Itemset{3}, 4, 3).empty());
}

TEST_CASE("total feature count") {
    CHECK(total_feature_count(4, 3) == 14u);
    CHECK(total_feature_count(100, 3) == 166750u);
    const auto big = total_feature_count(5000, 5);
    REQUIRE(big.has_value());
    CHECK(*big > 10'000'000'000'000'000ULL);
    CHECK_FALSE(total_feature_count(10000, 40).has_value());
    CHECK(total_feature_count_approx(10000, 40) > 1e80L);
    CHECK(total_feature_count(3, 10) == 7u);
}

TEST_CASE("feature columns are products of covariates") {
    Eigen::MatrixXd row(1, 3);
    row << 0.5, 0.5, 1.0;
    CHECK(feature_column(Itemset{0, 1}, row)[0] == doctest::Approx(0.25));

    const Dataset e1 = testing::example_e1();
    CHECK(feature_column(Itemset{2}, e1.z()) == e1.z().col(2));

    Eigen::MatrixXd bin(3, 2);
    bin << 1, 1, 0, 1, 1, 0;
    CHECK(feature_column(Itemset{0, 1}, bin) == Eigen::Vector3d(1, 0, 0));
    CHECK_THROWS_AS(feature_column(Itemset{5}, bin), UsageError);
}

TEST_CASE("descend_stats examples") {
    const Dataset e1 = testing::example_e1();
    const NodeStats root = root_stats(e1.z(), e1.y());
    for (int j = 0; j < 3; ++j) {
        const NodeStats s = descend_stats(root, j, e1.z(), e1.y());
        CHECK(s.itemset == Itemset{j});
        CHECK(s.score() == doctest::Approx(e1.z().col(j).dot(e1.y())));
    }
    const NodeStats s1 = descend_stats(root, 0, e1.z(), e1.y());
    const NodeStats s12 = descend_stats(s1, 1, e1.z(), e1.y());
    CHECK(s12.y.pos == 2.0);
    CHECK(s12.y.neg == 0.0);
    CHECK(s12.score() == 2.0);

    // a zero column absorbs everything below it
    Eigen::MatrixXd z = e1.z();
    z.col(1).setZero();
    const Eigen::VectorXd c = Eigen::Vector3d(0.3, -0.7, 1.1);
    const NodeStats zero = node_stats(Itemset{1}, z, e1.y(), &c);
    const NodeStats child = descend_stats(zero, 2, z, e1.y(), &c);
    CHECK(child.support.empty());
    CHECK(child.y.pos == 0.0);
    CHECK(child.y.neg == 0.0);
    CHECK(child.c->pos == 0.0);
    CHECK(child.c->neg == 0.0);
    CHECK_THROWS_AS(descend_stats(s12, 0, e1.z(), e1.y()), UsageError);
}

TEST_CASE("exhaustive walk visits every itemset exactly once") {
    for (int d = 1; d <= 6; ++d)
        for (int r = 1; r <= 4; ++r) {
            Eigen::MatrixXd z = Eigen::MatrixXd::Constant(2, d, 0.5);
            Eigen::VectorXd y = Eigen::VectorXd::Ones(2);
            std::map<Itemset, int> seen;
            const auto visited = walk_itemset_tree(z, y, nullptr, r, [&](const NodeView& node) {
                ++seen[Itemset(node.path)];
                return true;
            });
            const auto expected = oracle::all_itemsets(d, r);
            CHECK(visited == expected.size());
            CHECK(visited == *total_feature_count(d, r));
            REQUIRE(seen.size() == expected.size());
            for (const auto& s : expected) CHECK(seen[s] == 1);
        }
}

TEST_CASE("walk order is lexicographic") {
    Eigen::MatrixXd z = Eigen::MatrixXd::Ones(1, 5);
    Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
    std::vector<Itemset> order;
    walk_itemset_tree(z, y, nullptr, 3, [&](const NodeView& node) {
        order.emplace_back(node.path);
        return true;
    });
    CHECK(std::is_sorted(order.begin(), order.end()));
}

TEST_CASE("incremental stats match from-scratch stats and are monotone") {
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> pn(1, 20), pd(1, 6), pr(1, 4);
        const int n = pn(rng), d = pd(rng), r = pr(rng);
        const Eigen::MatrixXd z = testing::random_covariates(rng, n, d);
        const Eigen::VectorXd y = testing::random_response(rng, n);
        const Eigen::VectorXd c = testing::random_response(rng, n);
        std::map<Itemset, SignedSums> ysums, csums;
        bool consistent = true, monotone = true;
        walk_itemset_tree(z, y, &c, r, [&](const NodeView& node) {
            const Itemset s(node.path);
            const DenseSums ref = dense_sums(s, z, y, c);
            consistent &= std::abs(node.y.pos - ref.y_pos) <= 1e-12 &&
                          std::abs(node.y.neg - ref.y_neg) <= 1e-12 &&
                          std::abs(node.c.pos - ref.c_pos) <= 1e-12 &&
                          std::abs(node.c.neg - ref.c_neg) <= 1e-12;
            if (s.order() > 1) {
                const Itemset parent(node.path.first(node.path.size() - 1));
                const SignedSums& py = ysums.at(parent);
                const SignedSums& pc = csums.at(parent);
                monotone &= py.pos >= node.y.pos - 1e-12 && py.neg >= node.y.neg - 1e-12 &&
                            pc.pos >= node.c.pos - 1e-12 && pc.neg >= node.c.neg - 1e-12;
            }
            monotone &= node.y.pos >= 0 && node.y.neg >= 0 && node.c.pos >= 0 && node.c.neg >= 0;
            ysums[s] = node.y;
            csums[s] = node.c;
            // descend_stats from the parent agrees with the walker bit for bit
            const NodeStats direct = node_stats(s, z, y, &c);
            consistent &= direct.y.pos == node.y.pos && direct.y.neg == node.y.neg &&
                          direct.c->pos == node.c.pos && direct.c->neg == node.c.neg;
            return true;
        });
        CHECK(consistent);
        CHECK(monotone);
    }
}
