#include "hopsi/node_stats.hpp"

#include <string>

#include "hopsi/errors.hpp"

namespace hopsi {

Eigen::VectorXd NodeStats::column(Eigen::Index n) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (const auto& e : support) x[e.row] = e.value;
    return x;
}

Eigen::VectorXd feature_column(const Itemset& itemset, const Eigen::MatrixXd& z) {
    Eigen::VectorXd x = Eigen::VectorXd::Ones(z.rows());
    for (int j : itemset.indices()) {
        if (j >= z.cols())
            throw UsageError("itemset index " + std::to_string(j + 1) + " exceeds covariate count " +
                             std::to_string(z.cols()));
        x.array() *= z.col(j).array();
    }
    return x;
}

NodeStats root_stats(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const Eigen::VectorXd* c) {
    NodeStats root;
    root.support.reserve(static_cast<std::size_t>(z.rows()));
    SignedSums sc;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        root.support.push_back({i, 1.0});
        if (y[i] > 0.0)
            root.y.pos += y[i];
        else if (y[i] < 0.0)
            root.y.neg -= y[i];
        if (c != nullptr) {
            if ((*c)[i] > 0.0)
                sc.pos += (*c)[i];
            else if ((*c)[i] < 0.0)
                sc.neg -= (*c)[i];
        }
    }
    if (c != nullptr) root.c = sc;
    return root;
}

NodeStats descend_stats(const NodeStats& parent, int new_index, const Eigen::MatrixXd& z,
                        const Eigen::VectorXd& y, const Eigen::VectorXd* c) {
    if (new_index < 0 || new_index >= z.cols())
        throw UsageError("covariate index out of range");
    NodeStats child;
    child.itemset = parent.itemset.with(new_index);
    SignedSums sc;
    detail::extend_support(parent.support, z, new_index, y, c, child.support, child.y, sc);
    if (c != nullptr) child.c = sc;
    return child;
}

NodeStats node_stats(const Itemset& itemset, const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                     const Eigen::VectorXd* c) {
    NodeStats stats = root_stats(z, y, c);
    for (int j : itemset.indices()) stats = descend_stats(stats, j, z, y, c);
    return stats;
}

}  // namespace hopsi
