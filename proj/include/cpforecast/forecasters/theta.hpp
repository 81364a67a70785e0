#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace cpf {

/// Theta(2) decomposition via its SES-with-drift equivalence: simple
/// exponential smoothing supplies the level, half the linear-trend slope
/// supplies the drift.
struct ThetaFit {
    double alpha_ses = 0.5; // smoothing parameter, SSE-optimized on (0.01, 0.99)
    double level = 0.0;     // SES level after the last observation
    double slope = 0.0;     // OLS slope of the series on 1..n
};

namespace detail {

inline double ses_sse(std::span<const double> z, double alpha) {
    double level = z[0];
    double sse = 0.0;
    for (std::size_t i = 1; i < z.size(); ++i) {
        double e = z[i] - level;
        sse += e * e;
        level += alpha * e;
    }
    return sse;
}

inline double ses_level(std::span<const double> z, double alpha) {
    double level = z[0];
    for (std::size_t i = 1; i < z.size(); ++i) level += alpha * (z[i] - level);
    return level;
}

inline double golden_section_ses(std::span<const double> z) {
    const double gr = (std::sqrt(5.0) + 1.0) / 2.0;
    double a = 0.01, b = 0.99;
    double c = b - (b - a) / gr;
    double d = a + (b - a) / gr;
    double fc = ses_sse(z, c);
    double fd = ses_sse(z, d);
    while (b - a > 1e-6) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - (b - a) / gr;
            fc = ses_sse(z, c);
        } else {
            a = c; c = d; fc = fd;
            d = a + (b - a) / gr;
            fd = ses_sse(z, d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace detail

inline ThetaFit fit_theta(std::span<const double> z) {
    if (z.size() < 10) throw std::invalid_argument("theta needs >= 10 points");
    ThetaFit fit;
    fit.alpha_ses = detail::golden_section_ses(z);
    fit.level = detail::ses_level(z, fit.alpha_ses);

    // OLS time-trend slope on t = 1..n
    const auto n = static_cast<double>(z.size());
    double tbar = 0.5 * (n + 1.0);
    double zbar = 0.0;
    for (double v : z) zbar += v;
    zbar /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        double dt = static_cast<double>(i + 1) - tbar;
        num += dt * (z[i] - zbar);
        den += dt * dt;
    }
    fit.slope = den > 0.0 ? num / den : 0.0;
    return fit;
}

inline double theta_forecast(const ThetaFit& fit, int h) {
    if (h < 1) throw std::invalid_argument("h must be >= 1");
    return fit.level +
           0.5 * fit.slope * (static_cast<double>(h) - 1.0 + 1.0 / fit.alpha_ses);
}

inline double theta_forecast(std::span<const double> z, int h) {
    return theta_forecast(fit_theta(z), h);
}

} // namespace cpf
