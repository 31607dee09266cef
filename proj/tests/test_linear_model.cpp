#include <doctest.h>

#include <random>

#include "hopsi/errors.hpp"
#include "hopsi/linear_model.hpp"
#include "hopsi/normal.hpp"
#include "support.hpp"

using namespace hopsi;

TEST_CASE("orthonormal design gives beta = X^T y") {
    Eigen::MatrixXd xs = Eigen::MatrixXd::Zero(4, 2);
    xs(0, 0) = 1.0;
    xs(1, 1) = 1.0;
    const Eigen::Vector4d y(2.5, -1.0, 7.0, 3.0);
    const Eigen::VectorXd beta = beta_hat(xs, y);
    CHECK(beta[0] == doctest::Approx(2.5));
    CHECK(beta[1] == doctest::Approx(-1.0));

    const Contrast con = contrast_for_coefficient(xs, 1, y, NoiseModel{2.0, {}});
    CHECK((con.eta - xs.col(1)).norm() < 1e-15);
    CHECK(con.eta_var == doctest::Approx(4.0));
}

TEST_CASE("small example fit") {
    const Dataset e1 = testing::example_e1();
    const Eigen::MatrixXd xs = selected_design({Itemset{0}, Itemset{0, 1}}, e1.z());
    const GramSolver gram(xs);
    const Eigen::VectorXd beta = gram.beta_hat(e1.y());
    CHECK(beta[0] == doctest::Approx(1.0));
    CHECK(beta[1] == doctest::Approx(1.0));
    CHECK(residual_sum_of_squares(gram, e1.y()) == doctest::Approx(1.0));
    // (X^T X)^{-1} = [[1,-1],[-1,2]]
    CHECK(gram.inverse_diagonal(0) == doctest::Approx(1.0));
    CHECK(gram.inverse_diagonal(1) == doctest::Approx(2.0));
}

TEST_CASE("least squares matches an SVD solve") {
    std::mt19937_64 rng(31337);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd xs(20, 4);
        for (Eigen::Index i = 0; i < xs.size(); ++i) xs.data()[i] = g(rng);
        Eigen::VectorXd y(20);
        for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = g(rng);
        const Eigen::VectorXd ref = xs.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
        CHECK((beta_hat(xs, y) - ref).norm() < 1e-10 * (1 + ref.norm()));
    }
}

TEST_CASE("duplicated columns are reported by name") {
    Eigen::MatrixXd xs(3, 3);
    xs << 1, 0, 1, 0, 1, 0, 1, 1, 1;
    try {
        GramSolver gram(xs, {"a", "b", "c"});
        FAIL("expected a singular design error");
    } catch (const NumericError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("a") != std::string::npos);
        CHECK(msg.find("c") != std::string::npos);
    }
    Eigen::MatrixXd collinear(3, 3);
    collinear << 1, 0, 1, 0, 1, 1, 1, 1, 2;
    CHECK_THROWS_AS(GramSolver(collinear, {"a", "b", "c"}), NumericError);
}

TEST_CASE("contrast direction") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    Eigen::MatrixXd xs(15, 3);
    for (Eigen::Index i = 0; i < xs.size(); ++i) xs.data()[i] = g(rng);
    Eigen::VectorXd y(15);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = g(rng);
    const GramSolver gram(xs);

    SUBCASE("isotropic noise") {
        const NoiseModel noise{0.7, {}};
        for (Eigen::Index j = 0; j < 3; ++j) {
            const Contrast con = contrast_for_coefficient(gram, j, y, noise);
            CHECK(con.eta.dot(con.c) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK((con.c - con.eta / con.eta.squaredNorm()).norm() < 1e-12 * con.c.norm());
            CHECK(con.eta_y == doctest::Approx(gram.beta_hat(y)[j]).epsilon(1e-12));
            CHECK(con.eta_var ==
                  doctest::Approx(0.49 * gram.inverse_diagonal(j)).epsilon(1e-12));
            // eta picks out coefficient j
            for (Eigen::Index m = 0; m < 3; ++m)
                CHECK(std::abs(xs.col(m).dot(con.eta) - (m == j ? 1.0 : 0.0)) < 1e-10);
        }
    }
    SUBCASE("general covariance") {
        Eigen::MatrixXd a(15, 15);
        for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
        const Eigen::MatrixXd cov = a * a.transpose() + Eigen::MatrixXd::Identity(15, 15);
        const NoiseModel noise{1.0, cov};
        const Contrast con = contrast_for_coefficient(gram, 2, y, noise);
        CHECK(con.eta.dot(con.c) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(con.eta_var == doctest::Approx(con.eta.dot(cov * con.eta)).epsilon(1e-12));
        CHECK((con.c - cov * con.eta / con.eta_var).norm() < 1e-12 * con.c.norm());
    }
}

TEST_CASE("naive z-test p-value") {
    Eigen::MatrixXd xs = Eigen::MatrixXd::Zero(3, 1);
    xs(0, 0) = 1.0;
    const Eigen::Vector3d y(1.959963984540054, 0.0, 0.0);
    const GramSolver gram(xs);
    CHECK(naive_z_pvalue(gram, 0, y, NoiseModel{1.0, {}}) == doctest::Approx(0.05).epsilon(1e-12));
    const Eigen::Vector3d zero(0.0, 5.0, -5.0);
    CHECK(naive_z_pvalue(gram, 0, zero, NoiseModel{1.0, {}}) == 1.0);
}
