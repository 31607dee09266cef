#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hopsi/itemset.hpp"

namespace hopsi {

/// Noise model of the response: Sigma = sigma^2 I unless a full covariance
/// matrix is given.
struct NoiseModel {
    double sigma = 1.0;
    std::optional<Eigen::MatrixXd> covariance;

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;  // Sigma v
};

/// Factorized Gram matrix X_S^T X_S of the selected design. Construction
/// fails with NumericError when the Gram matrix is numerically singular,
/// naming the offending columns.
class GramSolver {
public:
    explicit GramSolver(const Eigen::MatrixXd& xs, const std::vector<std::string>& labels = {});

    const Eigen::MatrixXd& design() const { return xs_; }
    Eigen::Index k() const { return xs_.cols(); }

    /// (X^T X)^{-1} X^T y
    Eigen::VectorXd beta_hat(const Eigen::VectorXd& y) const;
    /// X (X^T X)^{-1} e_j
    Eigen::VectorXd eta(Eigen::Index j) const;
    /// ((X^T X)^{-1})_{jj}
    double inverse_diagonal(Eigen::Index j) const;

private:
    Eigen::MatrixXd xs_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Contrast for one coefficient of the selected model.
struct Contrast {
    Eigen::VectorXd eta;
    double eta_y = 0.0;    // eta^T y, the coefficient estimate
    double eta_var = 0.0;  // eta^T Sigma eta
    Eigen::VectorXd c;     // Sigma eta / (eta^T Sigma eta)
};

/// Columns of the selected features, n x k.
Eigen::MatrixXd selected_design(const std::vector<Itemset>& selected, const Eigen::MatrixXd& z);

Eigen::VectorXd beta_hat(const Eigen::MatrixXd& xs, const Eigen::VectorXd& y);

Contrast contrast_for_coefficient(const GramSolver& gram, Eigen::Index j, const Eigen::VectorXd& y,
                                  const NoiseModel& noise);
Contrast contrast_for_coefficient(const Eigen::MatrixXd& xs, Eigen::Index j,
                                  const Eigen::VectorXd& y, const NoiseModel& noise);

/// Classical two-sided z-test p-value for coefficient j with known noise,
/// ignoring any selection.
double naive_z_pvalue(const GramSolver& gram, Eigen::Index j, const Eigen::VectorXd& y,
                      const NoiseModel& noise);

/// Residual sum of squares of the least-squares fit on xs.
double residual_sum_of_squares(const GramSolver& gram, const Eigen::VectorXd& y);

}  // namespace hopsi
