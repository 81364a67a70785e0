#pragma once

#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

#include "cpforecast/ols.hpp"

namespace cpf {

/// Linear autoregression with intercept, fitted by conditional least squares.
struct ArFit {
    int order = 0;
    std::vector<double> phi; // phi[0] multiplies the most recent lag
    double intercept = 0.0;
    double resid_variance = 0.0;
    bool used_ridge = false;
};

inline ArFit fit_ar_ls(std::span<const double> y, int d) {
    if (d < 1) throw std::invalid_argument("AR order must be >= 1");
    const auto n = static_cast<std::ptrdiff_t>(y.size());
    if (n < 10 * d) throw std::invalid_argument("degenerate series: need >= 10*d points");

    const auto rows = n - d;
    Eigen::MatrixXd X(rows, d + 1);
    Eigen::VectorXd t(rows);
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        X(i, 0) = 1.0;
        for (int j = 0; j < d; ++j) X(i, j + 1) = y[static_cast<std::size_t>(d + i - 1 - j)];
        t(i) = y[static_cast<std::size_t>(d + i)];
    }
    auto fit = solve_ols(X, t);

    ArFit out;
    out.order = d;
    out.intercept = fit.beta(0);
    out.phi.assign(static_cast<std::size_t>(d), 0.0);
    for (int j = 0; j < d; ++j) out.phi[static_cast<std::size_t>(j)] = fit.beta(j + 1);
    out.used_ridge = fit.used_ridge;
    Eigen::VectorXd resid = t - X * fit.beta;
    const auto dof = rows - (d + 1);
    out.resid_variance = dof > 0 ? resid.squaredNorm() / static_cast<double>(dof) : 0.0;
    if (out.resid_variance < 0.0) out.resid_variance = 0.0;
    return out;
}

/// Multi-step forecasts by plugging earlier forecasts back into the fitted
/// recursion: yhat(t+h) = c + sum_j phi_j * [y or yhat](t+h-j).
inline std::vector<double> forecast_recursive(const ArFit& fit,
                                              std::span<const double> history,
                                              int H) {
    const int d = fit.order;
    if (static_cast<int>(history.size()) < d)
        throw std::invalid_argument("history shorter than AR order");
    if (H < 1) throw std::invalid_argument("H must be >= 1");

    std::vector<double> state(history.end() - d, history.end()); // oldest..newest
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(H));
    for (int h = 0; h < H; ++h) {
        double v = fit.intercept;
        for (int j = 0; j < d; ++j)
            v += fit.phi[static_cast<std::size_t>(j)] * state[state.size() - 1 - static_cast<std::size_t>(j)];
        out.push_back(v);
        state.erase(state.begin());
        state.push_back(v);
    }
    return out;
}

} // namespace cpf
