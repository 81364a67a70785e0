#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cpforecast/numeric.hpp"

namespace cpf {

/// Rolling empirical coverage 1 - mean(err) over trailing windows. Entries
/// without an observed err are excluded from both numerator and denominator;
/// output position i (0-based, aligned with input) is defined for
/// i >= window-1 and NaN when the whole window is unobserved.
inline std::vector<double> rolling_coverage(std::span<const std::optional<int>> err,
                                            int window) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    const auto n = static_cast<std::ptrdiff_t>(err.size());
    std::vector<double> out;
    if (n < window) return out;
    out.assign(static_cast<std::size_t>(n), kNaN);
    long sum = 0, cnt = 0;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (err[static_cast<std::size_t>(i)]) {
            sum += *err[static_cast<std::size_t>(i)];
            ++cnt;
        }
        if (i >= window) {
            const auto& old = err[static_cast<std::size_t>(i - window)];
            if (old) {
                sum -= *old;
                --cnt;
            }
        }
        if (i >= window - 1 && cnt > 0)
            out[static_cast<std::size_t>(i)] =
                1.0 - static_cast<double>(sum) / static_cast<double>(cnt);
    }
    return out;
}

enum class WidthStat { mean, median };

/// Rolling mean or median of interval widths. Infinite widths propagate to
/// an infinite mean; the median stays finite while fewer than half the
/// window is infinite.
inline std::vector<double> rolling_width(std::span<const double> widths, int window,
                                         WidthStat stat) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    const auto n = static_cast<std::ptrdiff_t>(widths.size());
    std::vector<double> out;
    if (n < window) return out;
    out.assign(static_cast<std::size_t>(n), kNaN);
    std::vector<double> buf;
    for (std::ptrdiff_t i = window - 1; i < n; ++i) {
        auto first = widths.begin() + (i - window + 1);
        auto last = widths.begin() + i + 1;
        if (stat == WidthStat::mean) {
            KahanSum acc;
            bool has_inf = false;
            for (auto it = first; it != last; ++it) {
                if (std::isinf(*it)) has_inf = true;
                else acc.add(*it);
            }
            out[static_cast<std::size_t>(i)] =
                has_inf ? kInf : acc.value() / static_cast<double>(window);
        } else {
            buf.assign(first, last);
            std::sort(buf.begin(), buf.end());
            std::size_t m = buf.size();
            out[static_cast<std::size_t>(i)] =
                m % 2 == 1 ? buf[m / 2] : 0.5 * (buf[m / 2 - 1] + buf[m / 2]);
        }
    }
    return out;
}

/// alpha - mean(err): positive when covering more often than the target.
inline double coverage_gap(std::span<const std::optional<int>> err, double alpha) {
    long sum = 0, cnt = 0;
    for (const auto& e : err)
        if (e) {
            sum += *e;
            ++cnt;
        }
    if (cnt == 0) throw std::invalid_argument("no observed err entries");
    return alpha - static_cast<double>(sum) / static_cast<double>(cnt);
}

/// Sample autocorrelations rho(1..max_lag).
inline std::vector<double> sample_acf(std::span<const double> z, int max_lag) {
    const auto n = static_cast<std::ptrdiff_t>(z.size());
    if (n < 2) throw std::invalid_argument("series too short for acf");
    double m = mean_of(z);
    KahanSum g0;
    for (double v : z) g0.add((v - m) * (v - m));
    std::vector<double> rho;
    rho.reserve(static_cast<std::size_t>(max_lag));
    for (int k = 1; k <= max_lag; ++k) {
        KahanSum gk;
        for (std::ptrdiff_t t = k; t < n; ++t)
            gk.add((z[static_cast<std::size_t>(t)] - m) *
                   (z[static_cast<std::size_t>(t - k)] - m));
        rho.push_back(g0.value() > 0.0 ? gk.value() / g0.value() : 0.0);
    }
    return rho;
}

struct BoxplotSummary {
    double min = kNaN, q1 = kNaN, median = kNaN, q3 = kNaN, max = kNaN;
    double whisker_low = kNaN, whisker_high = kNaN; // 1.5 IQR convention
};

inline BoxplotSummary boxplot_summary(std::span<const double> values) {
    std::vector<double> v;
    v.reserve(values.size());
    for (double x : values)
        if (!std::isnan(x)) v.push_back(x);
    if (v.empty()) throw std::invalid_argument("no finite values to summarize");
    std::sort(v.begin(), v.end());
    auto quantile7 = [&](double p) { // type-7, matches common plotting defaults
        double idx = p * static_cast<double>(v.size() - 1);
        auto lo = static_cast<std::size_t>(std::floor(idx));
        auto hi = static_cast<std::size_t>(std::ceil(idx));
        double frac = idx - std::floor(idx);
        return (1.0 - frac) * v[lo] + frac * v[hi];
    };
    BoxplotSummary s;
    s.min = v.front();
    s.max = v.back();
    s.q1 = quantile7(0.25);
    s.median = quantile7(0.5);
    s.q3 = quantile7(0.75);
    double iqr = s.q3 - s.q1;
    double lo_fence = s.q1 - 1.5 * iqr;
    double hi_fence = s.q3 + 1.5 * iqr;
    s.whisker_low = s.max;
    s.whisker_high = s.min;
    for (double x : v) {
        if (x >= lo_fence) { s.whisker_low = x; break; }
    }
    for (auto it = v.rbegin(); it != v.rend(); ++it) {
        if (*it <= hi_fence) { s.whisker_high = *it; break; }
    }
    return s;
}

} // namespace cpf
