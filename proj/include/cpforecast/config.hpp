#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cpf {

enum class SidedMode { two_sided, upper_only };

inline std::string to_string(SidedMode m) {
    return m == SidedMode::two_sided ? "two" : "upper";
}

/// All tuning constants of an online run. c_sat / k_i left unset means
/// "derive at tracker initialization" (see trackers.hpp for the rule).
struct ExperimentConfig {
    double alpha = 0.1;        // target miscoverage, in (0,1)
    int H = 3;                 // max forecast horizon
    int t_r = 500;             // training window length
    int t_c = 500;             // calibration window length
    double gamma = 0.005;      // adaptive-level step size
    double decay_b = 0.99;     // weighted-window decay, in (0,1)
    std::optional<double> c_sat; // saturation scale (unset: derived)
    std::optional<double> k_i;   // saturation gain (unset: derived)
    double eta_scale = 0.01;   // learning rate = eta_scale * trailing max score
    int delta = 0;             // trailing-window length (0: same as t_c)
    SidedMode sided = SidedMode::two_sided;
    std::uint64_t seed = 1;

    int delta_effective() const { return delta > 0 ? delta : t_c; }
};

/// Returns every violated constraint, not just the first. Empty result = ok.
inline std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> errs;
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        errs.push_back("alpha out of (0,1)");
    if (cfg.H < 1) errs.push_back("H < 1");
    if (cfg.t_r < 1) errs.push_back("t_r < 1");
    if (cfg.t_c < 1) errs.push_back("t_c < 1");
    if (cfg.H >= 1 && cfg.t_c < 10 * cfg.H) errs.push_back("t_c < 10*H");
    if (!(cfg.gamma > 0.0)) errs.push_back("gamma <= 0");
    if (!(cfg.decay_b > 0.0 && cfg.decay_b < 1.0))
        errs.push_back("decay_b out of (0,1)");
    if (cfg.c_sat && !(*cfg.c_sat > 0.0)) errs.push_back("c_sat <= 0");
    if (cfg.k_i && !(*cfg.k_i > 0.0)) errs.push_back("k_i <= 0");
    if (!(cfg.eta_scale > 0.0)) errs.push_back("eta_scale <= 0");
    if (cfg.delta < 0) errs.push_back("delta < 0");
    return errs;
}

} // namespace cpf
