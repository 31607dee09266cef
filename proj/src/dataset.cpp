#include "hopsi/dataset.hpp"

#include <cmath>

#include "hopsi/errors.hpp"

namespace hopsi {

Dataset::Dataset(Eigen::MatrixXd z, Eigen::VectorXd y, std::vector<std::string> names)
    : z_(std::move(z)), y_(std::move(y)), names_(std::move(names)) {
    if (z_.rows() == 0 || z_.cols() == 0) throw DataError("dataset has no rows or no covariates");
    if (y_.size() != z_.rows())
        throw DataError("response has " + std::to_string(y_.size()) + " entries, expected " +
                        std::to_string(z_.rows()));
    for (Eigen::Index j = 0; j < z_.cols(); ++j)
        for (Eigen::Index i = 0; i < z_.rows(); ++i) {
            const double v = z_(i, j);
            if (!(v >= 0.0 && v <= 1.0))
                throw DataError("covariate value outside [0,1] at row " + std::to_string(i + 1) +
                                ", column " + std::to_string(j + 1));
        }
    for (Eigen::Index i = 0; i < y_.size(); ++i)
        if (!std::isfinite(y_[i]))
            throw DataError("non-finite response at row " + std::to_string(i + 1));
    if (!names_.empty() && names_.size() != static_cast<std::size_t>(z_.cols()))
        throw DataError("covariate name count does not match column count");
}

Dataset Dataset::rows(const std::vector<Eigen::Index>& which) const {
    Eigen::MatrixXd z(static_cast<Eigen::Index>(which.size()), z_.cols());
    Eigen::VectorXd y(static_cast<Eigen::Index>(which.size()));
    for (std::size_t i = 0; i < which.size(); ++i) {
        z.row(static_cast<Eigen::Index>(i)) = z_.row(which[i]);
        y[static_cast<Eigen::Index>(i)] = y_[which[i]];
    }
    return Dataset(std::move(z), std::move(y), names_);
}

}  // namespace hopsi
