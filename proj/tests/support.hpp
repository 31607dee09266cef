#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "hopsi/dataset.hpp"
#include "hopsi/itemset.hpp"

namespace hopsi::testing {

struct Instance {
    Dataset data;
    int max_order = 1;
    int k = 1;
};

/// Random covariates in [0,1]: continuous, sparse binary, or a mixture with
/// exact zeros and ones.
inline Eigen::MatrixXd random_covariates(std::mt19937_64& rng, int n, int d) {
    std::uniform_int_distribution<int> mode_pick(0, 2);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int mode = mode_pick(rng);
    const double density = 0.3 + 0.6 * unif(rng);
    Eigen::MatrixXd z(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            const double u = unif(rng);
            switch (mode) {
                case 0: z(i, j) = u; break;
                case 1: z(i, j) = u < density ? 1.0 : 0.0; break;
                default: z(i, j) = u < 0.2 ? 0.0 : (u > 0.7 ? 1.0 : unif(rng)); break;
            }
        }
    return z;
}

inline Eigen::VectorXd random_response(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.1, 3.0);
    const double s = scale(rng);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = s * g(rng);
    return y;
}

/// n <= max_n, d <= max_d, r <= max_r, k <= min(max_k, D).
inline Instance random_instance(std::mt19937_64& rng, int max_n = 30, int max_d = 10,
                                int max_r = 3, int max_k = 5) {
    std::uniform_int_distribution<int> pick_n(2, max_n), pick_d(1, max_d), pick_r(1, max_r);
    const int n = pick_n(rng);
    const int d = pick_d(rng);
    const int r = pick_r(rng);
    const auto total = static_cast<int>(*total_feature_count(d, r));
    std::uniform_int_distribution<int> pick_k(1, std::min(max_k, total));
    const int k = pick_k(rng);
    return {Dataset(random_covariates(rng, n, d), random_response(rng, n)), r, k};
}

/// |a - b| <= tol * max(1, |a|, |b|); infinities must match exactly.
inline bool close_rel(double a, double b, double tol) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// The small worked dataset: Z = [[1,1,0],[0,1,1],[1,0,1]], y = [2,-1,1].
inline Dataset example_e1() {
    Eigen::MatrixXd z(3, 3);
    z << 1, 1, 0, 0, 1, 1, 1, 0, 1;
    Eigen::VectorXd y(3);
    y << 2, -1, 1;
    return Dataset(z, y);
}

}  // namespace hopsi::testing
