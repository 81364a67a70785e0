#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cpforecast/forecasters/lag_regression.hpp"
#include "cpforecast/forecasters/ma.hpp"
#include "cpforecast/panels.hpp"

namespace cpf {

/// Equal-weight combination of the two error-model branches; a missing
/// branch yields the other one, and no branch at all yields 0.
inline double combine_error_forecast(std::optional<double> ma,
                                     std::optional<double> reg) {
    if (ma && reg) return 0.5 * (*ma + *reg);
    if (ma) return *ma;
    if (reg) return *reg;
    return 0.0;
}

/// Combined forecast of the h-step error at the current origin:
///  - an MA(h-1) fit on the origin-indexed h-step score series (one-step
///    forecast of that series),
///  - for h >= 2, a regression of the h-step error on same-origin errors at
///    horizons h-1..1, evaluated on the recursively substituted forecasts
///    for the lower horizons of this origin round (etilde_lower, index j-1
///    holding horizon j).
/// Either branch silently drops out when its history is too short.
inline double acmcp_error_forecast(const ScorePanel& panel, int h, int window,
                                   std::span<const double> h_step_scores,
                                   std::span<const double> etilde_lower) {
    if (h < 1) throw std::invalid_argument("h must be >= 1");
    if (static_cast<int>(etilde_lower.size()) != h - 1)
        throw std::invalid_argument("need one etilde per lower horizon");

    std::optional<double> ma_branch;
    {
        const int q = h - 1;
        const auto need = static_cast<std::size_t>(std::max(30, 10 * q));
        std::span<const double> train = h_step_scores;
        if (static_cast<int>(train.size()) > window)
            train = train.subspan(train.size() - static_cast<std::size_t>(window));
        if (train.size() >= need) {
            try {
                ma_branch = ma_forecast_one(fit_ma_hr(train, q));
            } catch (const std::invalid_argument&) {
            }
        }
    }

    std::optional<double> reg_branch;
    if (h >= 2) {
        try {
            auto fit = fit_lag_regression(panel, h, window);
            std::vector<double> regressors; // horizon h-1 first, down to 1
            regressors.reserve(etilde_lower.size());
            for (int j = h - 1; j >= 1; --j)
                regressors.push_back(etilde_lower[static_cast<std::size_t>(j - 1)]);
            reg_branch = lag_regression_predict(fit, regressors);
        } catch (const std::invalid_argument&) {
        }
    }

    return combine_error_forecast(ma_branch, reg_branch);
}

} // namespace cpf
