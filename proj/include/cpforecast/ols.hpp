#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace cpf {

struct OlsFit {
    Eigen::VectorXd beta;
    bool used_ridge = false;
};

/// Least squares with a ridge fallback: if the design is rank deficient the
/// normal equations are re-solved with penalty 1e-8 * trace(X'X) / p, so a
/// degenerate calibration window yields a defined fit instead of aborting.
inline OlsFit solve_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size()) throw std::invalid_argument("X/y row mismatch");
    if (X.rows() < X.cols()) throw std::invalid_argument("underdetermined design");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() == X.cols())
        return OlsFit{qr.solve(y), false};
    Eigen::MatrixXd xtx = X.transpose() * X;
    double lambda = 1e-8 * xtx.trace() / static_cast<double>(X.cols());
    if (!(lambda > 0.0)) lambda = 1e-8;
    xtx.diagonal().array() += lambda;
    return OlsFit{xtx.ldlt().solve(X.transpose() * y), true};
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                             static_cast<Eigen::Index>(v.size()));
}

} // namespace cpf
