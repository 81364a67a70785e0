#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpforecast/config.hpp"
#include "cpforecast/methods/saturation.hpp"
#include "cpforecast/numeric.hpp"
#include "cpforecast/weighted_quantile.hpp"

namespace cpf {

enum class MethodId { mscp, mwcp, macp, macp_clipped, mpi, mpid, acmcp };

inline std::string to_string(MethodId m) {
    switch (m) {
        case MethodId::mscp: return "mscp";
        case MethodId::mwcp: return "mwcp";
        case MethodId::macp: return "macp";
        case MethodId::macp_clipped: return "macp_clipped";
        case MethodId::mpi: return "mpi";
        case MethodId::mpid: return "mpid";
        case MethodId::acmcp: return "acmcp";
    }
    return "?";
}

inline MethodId method_from_string(const std::string& s) {
    if (s == "mscp") return MethodId::mscp;
    if (s == "mwcp") return MethodId::mwcp;
    if (s == "macp") return MethodId::macp;
    if (s == "macp_clipped") return MethodId::macp_clipped;
    if (s == "mpi") return MethodId::mpi;
    if (s == "mpid") return MethodId::mpid;
    if (s == "acmcp") return MethodId::acmcp;
    throw std::invalid_argument("unknown method '" + s + "'");
}

enum class Side { lower, upper };

struct SidedLevels {
    bool lower_enabled = true;
    double alpha_lower = 0.0;
    double alpha_upper = 0.0;
};

/// Two-sided mode runs both side trackers at alpha/2 each; upper-only keeps
/// the literal one-sided set with the lower bound pinned at -inf.
inline SidedLevels sided_levels(double alpha, SidedMode mode) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha out of (0,1)");
    if (mode == SidedMode::two_sided) return {true, alpha / 2.0, alpha / 2.0};
    return {false, 0.0, alpha};
}

// ---- quantile thresholds (score space) ----

/// Quantile threshold from raw (unnormalized) weights plus a tail weight on
/// the +inf augmentation atom, at tau = 1 - alpha_side.
inline double weighted_threshold(std::span<const double> scores,
                                 std::span<const double> raw_weights,
                                 double raw_tail_weight, double alpha_side) {
    if (scores.empty()) throw std::invalid_argument("empty score window");
    if (scores.size() != raw_weights.size())
        throw std::invalid_argument("weight count mismatch");
    if (alpha_side >= 1.0) return -kInf; // empty side
    double tau = 1.0 - alpha_side;
    if (tau > 1.0) tau = 1.0;
    AtomDistribution atoms;
    atoms.reserve(scores.size() + 1);
    for (std::size_t i = 0; i < scores.size(); ++i)
        atoms.push_back({scores[i], raw_weights[i]});
    atoms.push_back({kInf, raw_tail_weight});
    return weighted_quantile(atoms, tau);
}

/// Equal-weight window plus the +inf atom, each carrying 1/(n+1) mass.
inline double mscp_threshold(std::span<const double> scores, double alpha_side) {
    std::vector<double> w(scores.size(), 1.0);
    return weighted_threshold(scores, w, 1.0, alpha_side);
}

/// Exponential-decay weights, oldest scores first.
inline double mwcp_threshold(std::span<const double> scores, double decay_b,
                             double alpha_side) {
    auto w = mwcp_weights(static_cast<int>(scores.size()), decay_b);
    return weighted_threshold(scores, w.weights, w.tail_weight, alpha_side);
}

// ---- per-horizon, per-side online tracker ----

/// Mutable state of one (method, horizon, side) tracker. Lower-side trackers
/// operate on negated scores so every method is implemented one-sided.
struct TrackerState {
    MethodId method = MethodId::mscp;
    int horizon = 1;
    Side side = Side::upper;
    double alpha_side = 0.05;   // per-side target level
    double alpha_hat = 0.05;    // adaptive level (macp family), init = target
    double q_hat = 0.0;         // accumulated quantile estimate (pid family)
    double integrator_sum = 0.0;
    std::vector<std::uint8_t> err_history;
    std::deque<double> score_window; // trailing side-scores, length <= cap
    std::size_t score_window_cap = 500;
    double max_score_seen = -kInf;
    double min_score_seen = kInf;

    void observe_score(double side_score) {
        score_window.push_back(side_score);
        if (score_window.size() > score_window_cap) score_window.pop_front();
        max_score_seen = std::max(max_score_seen, side_score);
        min_score_seen = std::min(min_score_seen, side_score);
    }

    /// Largest score over the trailing window (the eta scale base).
    double trailing_max() const {
        double m = -kInf;
        for (double s : score_window) m = std::max(m, s);
        return m;
    }
};

/// eta = eta_scale * trailing max score; falls back to eta_scale alone when
/// the window is empty or the max is not a usable positive scale.
inline double tracker_eta(const TrackerState& st, double eta_scale) {
    double b_hat = st.trailing_max();
    if (!std::isfinite(b_hat) || !(b_hat > 0.0)) return eta_scale;
    return eta_scale * b_hat;
}

namespace detail {

inline void record_err(TrackerState& st, int err) {
    if (err != 0 && err != 1) throw std::invalid_argument("err must be 0/1");
    st.err_history.push_back(static_cast<std::uint8_t>(err));
    st.integrator_sum += static_cast<double>(err) - st.alpha_side;
}

} // namespace detail

/// Adaptive-level step: alpha_hat <- alpha_hat + gamma * (alpha - err), then
/// an equal-weight quantile threshold at the adapted level. Levels outside
/// [0,1] give infinite / empty-side thresholds; the clipped variant
/// substitutes the most extreme finite score seen so far.
inline double macp_step(TrackerState& st, std::optional<int> err_prev, double gamma,
                        std::span<const double> cal_scores, bool clip) {
    if (err_prev) {
        st.alpha_hat += gamma * (st.alpha_side - static_cast<double>(*err_prev));
        detail::record_err(st, *err_prev);
    }
    double thr;
    if (st.alpha_hat >= 1.0)
        thr = -kInf;
    else
        thr = mscp_threshold(cal_scores, st.alpha_hat); // alpha_hat <= 0 -> +inf
    if (clip) {
        if (thr == kInf && st.max_score_seen > -kInf) thr = st.max_score_seen;
        else if (thr == -kInf && st.min_score_seen < kInf) thr = st.min_score_seen;
    }
    return thr;
}

/// Quantile-tracking step:
///   threshold = q_prev + eta*(err - alpha) + r_t(sum(err - alpha)) + scorecast.
/// Only the proportional increment accumulates in the stored estimate; the
/// integrator term (evaluated at t_eff = #recorded errs + 1) and the
/// scorecast enter the issued threshold pointwise. With eta = 0 and no
/// scorecast the update degenerates to the bare integrator iteration, and a
/// saturated (infinite) integrator value is never absorbing.
inline double pid_step(TrackerState& st, std::optional<int> err_prev, double eta,
                       const SaturationFn& sat, double scorecast) {
    if (err_prev) {
        st.q_hat += eta * (static_cast<double>(*err_prev) - st.alpha_side);
        detail::record_err(st, *err_prev);
    }
    double integ = 0.0;
    const int t_eff = static_cast<int>(st.err_history.size()) + 1;
    if (t_eff >= 2) integ = saturation_eval(sat, t_eff, st.integrator_sum);
    return st.q_hat + integ + scorecast;
}

/// Same algebra as pid_step with the scorecast replaced by the combined
/// error-model forecast; e_tilde = 0 recovers the plain P+I tracker.
inline double acmcp_step(TrackerState& st, std::optional<int> err_prev, double eta,
                         const SaturationFn& sat, double e_tilde) {
    return pid_step(st, err_prev, eta, sat, e_tilde);
}

} // namespace cpf
