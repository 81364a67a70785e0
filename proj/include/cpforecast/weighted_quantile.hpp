#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cpforecast/numeric.hpp"

namespace cpf {

/// One point mass of a finite discrete distribution. The value may be +inf
/// (the calibration-set augmentation atom); weights must be finite and >= 0.
struct Atom {
    double value = 0.0;
    double weight = 0.0;
};

using AtomDistribution = std::vector<Atom>;

inline void validate_atoms(const AtomDistribution& dist) {
    if (dist.empty()) throw std::invalid_argument("empty distribution");
    int inf_atoms = 0;
    double total = 0.0;
    for (const auto& a : dist) {
        if (std::isnan(a.value)) throw std::invalid_argument("NaN atom value");
        if (!(a.weight >= 0.0) || !std::isfinite(a.weight))
            throw std::invalid_argument("atom weight must be finite and >= 0");
        if (a.value == kInf) ++inf_atoms;
        if (a.value == -kInf) throw std::invalid_argument("-inf atom value");
        total += a.weight;
    }
    if (inf_atoms > 1) throw std::invalid_argument("more than one +inf atom");
    if (!(total > 0.0)) throw std::invalid_argument("total weight must be > 0");
}

/// Left-continuous quantile of a weighted point-mass distribution:
/// the smallest atom value v whose normalized cumulative weight reaches tau.
/// Ties among values merge weights before the scan; cumulative comparison is
/// exact (no tolerance) with compensated accumulation, and the scan compares
/// raw cumulative weight against tau * total so the result is scale-free.
inline double weighted_quantile(const AtomDistribution& dist, double tau) {
    if (!(tau > 0.0 && tau <= 1.0))
        throw std::invalid_argument("tau must be in (0, 1]");
    validate_atoms(dist);

    std::vector<Atom> atoms(dist.begin(), dist.end());
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });

    // merge equal values
    std::vector<Atom> merged;
    merged.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (!merged.empty() && merged.back().value == a.value)
            merged.back().weight += a.weight;
        else
            merged.push_back(a);
    }

    KahanSum total;
    for (const auto& a : merged) total.add(a.weight);
    const double threshold = tau * total.value();

    KahanSum cum;
    for (const auto& a : merged) {
        cum.add(a.weight);
        if (cum.value() >= threshold) return a.value;
    }
    return merged.back().value; // tau == 1 with rounding shortfall
}

/// Exponential-decay weights for the weighted conformal window: with scores
/// ordered oldest first, the oldest gets b^n down to b^1 for the newest,
/// plus a unit tail weight on the +inf atom; everything normalized to sum 1.
struct MwcpWeights {
    std::vector<double> weights; // oldest first, size n
    double tail_weight = 0.0;    // weight of the +inf atom
};

inline MwcpWeights mwcp_weights(int n, double decay_b) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(decay_b > 0.0 && decay_b < 1.0))
        throw std::invalid_argument("decay_b must be in (0, 1)");
    std::vector<double> w(static_cast<std::size_t>(n));
    double p = 1.0;
    for (int i = n - 1; i >= 0; --i) { // newest gets b^1
        p *= decay_b;
        w[static_cast<std::size_t>(i)] = p;
    }
    KahanSum total;
    for (double x : w) total.add(x);
    total.add(1.0);
    const double denom = total.value();
    for (double& x : w) x /= denom;
    return MwcpWeights{std::move(w), 1.0 / denom};
}

} // namespace cpf
