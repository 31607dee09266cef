#include "hopsi/linear_model.hpp"

#include <cmath>

#include "hopsi/errors.hpp"
#include "hopsi/node_stats.hpp"
#include "hopsi/normal.hpp"

namespace hopsi {

namespace {

constexpr double kConditionLimit = 1e12;

std::string column_name(const std::vector<std::string>& labels, Eigen::Index j) {
    if (static_cast<std::size_t>(j) < labels.size()) return labels[static_cast<std::size_t>(j)];
    return "#" + std::to_string(j + 1);
}

[[noreturn]] void report_collinear(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& gram,
                                   const std::vector<std::string>& labels) {
    std::string names;
    auto add = [&](Eigen::Index j) {
        if (!names.empty()) names += ", ";
        names += column_name(labels, j);
    };
    // duplicated columns are the usual cause with binary interaction features
    for (Eigen::Index a = 0; a < xs.cols(); ++a)
        for (Eigen::Index b = a + 1; b < xs.cols(); ++b)
            if (xs.col(a) == xs.col(b)) {
                add(a);
                add(b);
                throw NumericError("singular Gram matrix: duplicated selected columns " + names);
            }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd null_dir = eig.eigenvectors().col(0);
    for (Eigen::Index j = 0; j < null_dir.size(); ++j)
        if (std::abs(null_dir[j]) > 1e-6) add(j);
    throw NumericError("singular Gram matrix: collinear selected columns " + names);
}

}  // namespace

Eigen::VectorXd NoiseModel::apply(const Eigen::VectorXd& v) const {
    if (covariance) return *covariance * v;
    return sigma * sigma * v;
}

GramSolver::GramSolver(const Eigen::MatrixXd& xs, const std::vector<std::string>& labels)
    : xs_(xs) {
    if (xs_.cols() == 0) throw UsageError("empty selected design");
    const Eigen::MatrixXd gram = xs_.transpose() * xs_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    if (!(lmax > 0.0) || !(lmin * kConditionLimit > lmax)) report_collinear(xs_, gram, labels);
    llt_.compute(gram);
    if (llt_.info() != Eigen::Success) report_collinear(xs_, gram, labels);
}

Eigen::VectorXd GramSolver::beta_hat(const Eigen::VectorXd& y) const {
    return llt_.solve(xs_.transpose() * y);
}

Eigen::VectorXd GramSolver::eta(Eigen::Index j) const {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(k(), j);
    return xs_ * llt_.solve(e);
}

double GramSolver::inverse_diagonal(Eigen::Index j) const {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(k(), j);
    return llt_.solve(e)[j];
}

Eigen::MatrixXd selected_design(const std::vector<Itemset>& selected, const Eigen::MatrixXd& z) {
    Eigen::MatrixXd xs(z.rows(), static_cast<Eigen::Index>(selected.size()));
    for (std::size_t j = 0; j < selected.size(); ++j)
        xs.col(static_cast<Eigen::Index>(j)) = feature_column(selected[j], z);
    return xs;
}

Eigen::VectorXd beta_hat(const Eigen::MatrixXd& xs, const Eigen::VectorXd& y) {
    return GramSolver(xs).beta_hat(y);
}

Contrast contrast_for_coefficient(const GramSolver& gram, Eigen::Index j, const Eigen::VectorXd& y,
                                  const NoiseModel& noise) {
    if (j < 0 || j >= gram.k()) throw UsageError("coefficient index out of range");
    Contrast out;
    out.eta = gram.eta(j);
    out.eta_y = out.eta.dot(y);
    const Eigen::VectorXd sigma_eta = noise.apply(out.eta);
    out.eta_var = out.eta.dot(sigma_eta);
    if (!(out.eta_var > 0.0)) throw NumericError("contrast has zero variance");
    out.c = sigma_eta / out.eta_var;
    return out;
}

Contrast contrast_for_coefficient(const Eigen::MatrixXd& xs, Eigen::Index j,
                                  const Eigen::VectorXd& y, const NoiseModel& noise) {
    return contrast_for_coefficient(GramSolver(xs), j, y, noise);
}

double naive_z_pvalue(const GramSolver& gram, Eigen::Index j, const Eigen::VectorXd& y,
                      const NoiseModel& noise) {
    const Contrast con = contrast_for_coefficient(gram, j, y, noise);
    const double z = con.eta_y / std::sqrt(con.eta_var);
    return std::min(1.0, 2.0 * normal_sf(std::abs(z)));
}

double residual_sum_of_squares(const GramSolver& gram, const Eigen::VectorXd& y) {
    const Eigen::VectorXd resid = y - gram.design() * gram.beta_hat(y);
    return resid.squaredNorm();
}

}  // namespace hopsi
