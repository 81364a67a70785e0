#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "cpforecast/ols.hpp"
#include "cpforecast/panels.hpp"

namespace cpf {

/// Regression of the h-step error on the same-origin errors at horizons
/// h-1 down to 1. coeffs[0] multiplies the horizon h-1 regressor.
struct LagRegressionFit {
    int horizon = 0;
    std::vector<double> coeffs; // size h-1
    double intercept = 0.0;
    bool used_ridge = false;
};

/// Fits on the most recent `window` origins whose rows are complete: target
/// cell (i, h) plus regressors (i, h-1) .. (i, 1). Incomplete rows drop out.
inline LagRegressionFit fit_lag_regression(const ScorePanel& panel, int h, int window) {
    if (h < 2) throw std::invalid_argument("lag regression needs h >= 2");
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    const int p = h - 1;

    std::vector<std::int64_t> rows;
    for (std::int64_t i = panel.last_origin(); i >= panel.first_origin(); --i) {
        bool complete = true;
        for (int j = 1; j <= h && complete; ++j) complete = panel.has(i, j);
        if (complete) {
            rows.push_back(i);
            if (static_cast<int>(rows.size()) == window) break;
        }
    }
    const auto need = static_cast<std::size_t>(std::max(30, 10 * h));
    if (rows.size() < need)
        throw std::invalid_argument("too few complete rows for lag regression");

    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), p + 1);
    Eigen::VectorXd t(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        X(static_cast<Eigen::Index>(r), 0) = 1.0;
        for (int j = 0; j < p; ++j)
            X(static_cast<Eigen::Index>(r), j + 1) = panel.at(rows[r], h - 1 - j);
        t(static_cast<Eigen::Index>(r)) = panel.at(rows[r], h);
    }
    auto fit = solve_ols(X, t);

    LagRegressionFit out;
    out.horizon = h;
    out.intercept = fit.beta(0);
    out.coeffs.assign(static_cast<std::size_t>(p), 0.0);
    for (int j = 0; j < p; ++j) out.coeffs[static_cast<std::size_t>(j)] = fit.beta(j + 1);
    out.used_ridge = fit.used_ridge;
    return out;
}

/// regressors[0] is the horizon h-1 error, descending to horizon 1.
inline double lag_regression_predict(const LagRegressionFit& fit,
                                     std::span<const double> regressors) {
    if (regressors.size() != fit.coeffs.size())
        throw std::invalid_argument("regressor count mismatch");
    double v = fit.intercept;
    for (std::size_t j = 0; j < fit.coeffs.size(); ++j)
        v += fit.coeffs[j] * regressors[j];
    return v;
}

} // namespace cpf
