#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpforecast/rng.hpp"
#include "cpforecast/series.hpp"

namespace cpf {

enum class DgpKind { ar2, nonlinear, custom_linear };

struct DgpSpec {
    DgpKind kind = DgpKind::ar2;
    int n = 5000;
    int burn_in = 500;
    std::uint64_t seed = 1;
    // custom_linear only
    std::vector<double> phi;
    double sigma2 = 1.0;

    void validate() const {
        if (n < 1) throw std::invalid_argument("n must be >= 1");
        if (burn_in < 100) throw std::invalid_argument("burn_in must be >= 100");
        if (kind == DgpKind::custom_linear) {
            if (phi.empty()) throw std::invalid_argument("custom_linear needs phi");
            if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be > 0");
        }
    }
};

struct SimResult {
    SeriesFrame frame;
    std::vector<double> innovations; // kept portion only
    long guard_events = 0;           // nonlinear log-domain clamps
};

/// Linear autoregression with zero intercept and Gaussian innovations.
inline SimResult simulate_linear(std::span<const double> phi, double sigma2, int n,
                                 int burn_in, std::uint64_t seed) {
    Rng rng(seed);
    const double sd = std::sqrt(sigma2);
    const auto d = phi.size();
    std::vector<double> lags(d, 0.0); // lags[0] = most recent
    SimResult res;
    res.frame.first_tick = 1;
    res.frame.y.reserve(static_cast<std::size_t>(n));
    res.innovations.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < burn_in + n; ++t) {
        double eps = sd * rng.gaussian();
        double v = eps;
        for (std::size_t j = 0; j < d; ++j) v += phi[j] * lags[j];
        for (std::size_t j = d; j-- > 1;) lags[j] = lags[j - 1];
        if (d > 0) lags[0] = v;
        if (t >= burn_in) {
            res.frame.y.push_back(v);
            res.innovations.push_back(eps);
        }
    }
    return res;
}

/// y_t = 0.8 y_{t-1} - 0.5 y_{t-2} + eps, eps ~ N(0, 1).
inline SimResult simulate_ar2(int n, std::uint64_t seed, int burn_in = 500) {
    const double phi[] = {0.8, -0.5};
    return simulate_linear(phi, 1.0, n, burn_in, seed);
}

/// y_t = sin(y_{t-1}) + 0.5 log(y_{t-2} + 1) + 0.1 y_{t-1} x1_t + 0.3 x2_t + eps,
/// x1, x2 ~ U[0,1], eps ~ N(0, 0.1). The log argument is clamped at 0.001
/// when y_{t-2} <= -0.999 and the event counted. Per-step draw order is
/// x1, x2, eps from a single stream.
inline SimResult simulate_nonlinear(int n, std::uint64_t seed, int burn_in = 500) {
    Rng rng(seed);
    const double sd = std::sqrt(0.1);
    double y1 = 0.0, y2 = 0.0; // y_{t-1}, y_{t-2}
    SimResult res;
    res.frame.first_tick = 1;
    res.frame.x_names = {"x1", "x2"};
    res.frame.x.resize(2);
    for (int t = 0; t < burn_in + n; ++t) {
        double x1 = rng.uniform01();
        double x2 = rng.uniform01();
        double eps = sd * rng.gaussian();
        double log_arg = y2 + 1.0;
        if (y2 <= -0.999) {
            log_arg = 0.001;
            ++res.guard_events;
        }
        double v = std::sin(y1) + 0.5 * std::log(log_arg) + 0.1 * y1 * x1 +
                   0.3 * x2 + eps;
        y2 = y1;
        y1 = v;
        if (t >= burn_in) {
            res.frame.y.push_back(v);
            res.frame.x[0].push_back(x1);
            res.frame.x[1].push_back(x2);
            res.innovations.push_back(eps);
        }
    }
    return res;
}

inline SimResult simulate(const DgpSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case DgpKind::ar2:
            return simulate_ar2(spec.n, spec.seed, spec.burn_in);
        case DgpKind::nonlinear:
            return simulate_nonlinear(spec.n, spec.seed, spec.burn_in);
        case DgpKind::custom_linear:
            return simulate_linear(spec.phi, spec.sigma2, spec.n, spec.burn_in,
                                   spec.seed);
    }
    throw std::logic_error("unreachable");
}

inline std::string to_string(DgpKind k) {
    switch (k) {
        case DgpKind::ar2: return "ar2";
        case DgpKind::nonlinear: return "nonlinear";
        case DgpKind::custom_linear: return "custom_linear";
    }
    return "?";
}

inline DgpKind dgp_from_string(const std::string& s) {
    if (s == "ar2") return DgpKind::ar2;
    if (s == "nonlinear") return DgpKind::nonlinear;
    if (s == "custom_linear") return DgpKind::custom_linear;
    throw std::invalid_argument("unknown dgp '" + s + "'");
}

} // namespace cpf
