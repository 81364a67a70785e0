#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cpf {

/// Seeded random source with fully pinned output. mt19937_64 is specified
/// bit-for-bit by the standard; the uniform and Gaussian mappings are
/// implemented here (std::normal_distribution is implementation-defined,
/// which would make fixtures non-portable across standard libraries).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (-1, 1), excluding exact 0 only with probability 2^-53.
    double uniform_sym() { return 2.0 * uniform01() - 1.0; }

    /// Standard normal via the Marsaglia polar method (pairs cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = uniform_sym();
            v = uniform_sym();
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    std::uint64_t next_u64() { return gen_(); }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace cpf
