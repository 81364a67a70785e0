#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace cpf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Kahan compensated accumulator. Keeps summation drift below ~1e-12
/// relative for up to 1e6 terms regardless of ordering.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }
    void reset() { s_ = 0.0; c_ = 0.0; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

inline double mean_of(std::span<const double> v) {
    if (v.empty()) return kNaN;
    KahanSum acc;
    for (double x : v) acc.add(x);
    return acc.value() / static_cast<double>(v.size());
}

inline double variance_of(std::span<const double> v) {
    if (v.size() < 2) return kNaN;
    double m = mean_of(v);
    KahanSum acc;
    for (double x : v) acc.add((x - m) * (x - m));
    return acc.value() / static_cast<double>(v.size() - 1);
}

// Round-trip-exact double formatting. %.17g reproduces any finite double
// bit-exactly on parse; infinities use bare tokens for CSV friendliness.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline double parse_double(const std::string& s) {
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return kNaN;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || (end && *end != '\0'))
        throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

} // namespace cpf
