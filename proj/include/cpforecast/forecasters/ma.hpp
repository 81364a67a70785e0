#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "cpforecast/forecasters/ar.hpp"
#include "cpforecast/ols.hpp"

namespace cpf {

/// Moving-average model fitted by the Hannan-Rissanen two-stage procedure:
/// a long autoregression supplies innovation estimates, then the series is
/// regressed on lagged innovations.
struct MaFit {
    int order = 0;
    std::vector<double> theta;       // theta[0] on the most recent innovation
    std::vector<double> innovations; // long-AR residuals, oldest first
    double mean = 0.0;               // intercept of the stage-2 regression
};

inline MaFit fit_ma_hr(std::span<const double> errors, int q) {
    if (q < 0) throw std::invalid_argument("MA order must be >= 0");
    const auto n = static_cast<std::ptrdiff_t>(errors.size());
    if (n < std::max<std::ptrdiff_t>(30, 10 * q))
        throw std::invalid_argument("insufficient data for MA fit");

    MaFit out;
    out.order = q;
    if (q == 0) {
        double m = 0.0;
        for (double e : errors) m += e;
        m /= static_cast<double>(n);
        out.mean = m;
        out.innovations.reserve(static_cast<std::size_t>(n));
        for (double e : errors) out.innovations.push_back(e - m);
        return out;
    }

    // stage 1: long AR residuals as innovation estimates
    const int p_long = static_cast<int>(std::min<std::ptrdiff_t>(10, n / 10));
    ArFit long_ar = fit_ar_ls(errors, p_long);
    out.innovations.reserve(static_cast<std::size_t>(n - p_long));
    for (std::ptrdiff_t t = p_long; t < n; ++t) {
        double pred = long_ar.intercept;
        for (int j = 0; j < p_long; ++j)
            pred += long_ar.phi[static_cast<std::size_t>(j)] *
                    errors[static_cast<std::size_t>(t - 1 - j)];
        out.innovations.push_back(errors[static_cast<std::size_t>(t)] - pred);
    }

    // stage 2: regress e_t on lagged innovations with intercept
    const auto m = static_cast<std::ptrdiff_t>(out.innovations.size());
    const auto rows = m - q;
    if (rows < q + 2) throw std::invalid_argument("insufficient data for MA fit");
    Eigen::MatrixXd X(rows, q + 1);
    Eigen::VectorXd t(rows);
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        X(i, 0) = 1.0;
        for (int j = 0; j < q; ++j)
            X(i, j + 1) = out.innovations[static_cast<std::size_t>(q + i - 1 - j)];
        t(i) = errors[static_cast<std::size_t>(p_long + q + i)];
    }
    auto fit = solve_ols(X, t);
    out.mean = fit.beta(0);
    out.theta.assign(static_cast<std::size_t>(q), 0.0);
    for (int j = 0; j < q; ++j) out.theta[static_cast<std::size_t>(j)] = fit.beta(j + 1);
    return out;
}

/// One-step-ahead conditional mean of the fitted MA process.
inline double ma_forecast_one(const MaFit& fit) {
    double v = fit.mean;
    const auto m = fit.innovations.size();
    for (int j = 0; j < fit.order; ++j) {
        if (static_cast<std::size_t>(j) >= m) break;
        v += fit.theta[static_cast<std::size_t>(j)] * fit.innovations[m - 1 - static_cast<std::size_t>(j)];
    }
    return v;
}

} // namespace cpf
