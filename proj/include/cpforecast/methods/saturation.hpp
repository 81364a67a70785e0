#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cpforecast/numeric.hpp"

namespace cpf {

/// Integrator nonlinearity r_t(x) = k_i * tan(x * log(t) / (t * c_sat)),
/// with tan taken as sign(x) * inf outside [-pi/2, pi/2]. Odd, nondecreasing
/// in x, zero at zero; blows up once |x| reaches (pi/2) * c_sat * t / log(t).
struct SaturationFn {
    double c_sat = 1.0;
    double k_i = 1.0;
};

inline double saturation_eval(const SaturationFn& fn, int t_eff, double x) {
    if (t_eff < 2) throw std::invalid_argument("saturation needs t_eff >= 2");
    if (!(fn.c_sat > 0.0) || !(fn.k_i > 0.0))
        throw std::invalid_argument("saturation constants must be > 0");
    if (x == 0.0) return 0.0;
    const double t = static_cast<double>(t_eff);
    const double arg = x * std::log(t) / (t * fn.c_sat);
    if (std::abs(arg) >= std::numbers::pi / 2.0)
        return x > 0.0 ? kInf : -kInf;
    return fn.k_i * std::tan(arg);
}

/// Saturation threshold in x for a given time argument: the smallest |x|
/// mapped to infinity. Equals (pi/2) * c_sat * g(t) with g(t) = t / log(t).
inline double saturation_pole(const SaturationFn& fn, int t_eff) {
    const double t = static_cast<double>(t_eff);
    return (std::numbers::pi / 2.0) * fn.c_sat * t / std::log(t);
}

} // namespace cpf
