#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hopsi {

/// Covariates in [0, 1] and a real response. Construction validates both.
class Dataset {
public:
    Dataset() = default;
    Dataset(Eigen::MatrixXd z, Eigen::VectorXd y, std::vector<std::string> names = {});

    const Eigen::MatrixXd& z() const { return z_; }
    const Eigen::VectorXd& y() const { return y_; }
    const std::vector<std::string>& names() const { return names_; }

    Eigen::Index n() const { return z_.rows(); }
    int d() const { return static_cast<int>(z_.cols()); }

    /// Copy restricted to the given rows, in the given order.
    Dataset rows(const std::vector<Eigen::Index>& which) const;

private:
    Eigen::MatrixXd z_;
    Eigen::VectorXd y_;
    std::vector<std::string> names_;
};

}  // namespace hopsi
