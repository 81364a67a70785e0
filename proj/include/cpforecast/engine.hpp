#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpforecast/config.hpp"
#include "cpforecast/forecasters/point_forecaster.hpp"
#include "cpforecast/methods/error_forecast.hpp"
#include "cpforecast/methods/trackers.hpp"
#include "cpforecast/panels.hpp"
#include "cpforecast/series.hpp"

namespace cpf {

struct RunPlan {
    SeriesFrame series;
    ForecasterSpec forecaster;
    std::vector<MethodId> methods = {MethodId::mscp, MethodId::mwcp, MethodId::macp,
                                     MethodId::mpi, MethodId::mpid, MethodId::acmcp};
    ExperimentConfig cfg;
    int refit_every = 1;
    bool expanding = false;          // rolling training window by default
    bool acmcp_error_models = true;  // off: acmcp degenerates to mpi exactly
};

/// Per-(origin, horizon) tracker diagnostics. Thresholds are raw score-space
/// values before interval assembly (lower side in negated-score space); aux
/// holds the adaptive level for the macp family and eta for the pid family.
struct TraceRow {
    std::int64_t origin = 0;
    int horizon = 0;
    double thr_lower = kNaN;
    double thr_upper = kNaN;
    double aux_lower = kNaN;
    double aux_upper = kNaN;
    double dterm = 0.0; // scorecast / e_tilde, response-score space
};

struct RunResult {
    ScorePanel scores;
    std::map<MethodId, IntervalPanel> intervals;
    std::map<MethodId, std::vector<TraceRow>> traces;
    std::vector<std::string> warnings;
};

namespace detail {

inline bool is_pid_family(MethodId m) {
    return m == MethodId::mpi || m == MethodId::mpid || m == MethodId::acmcp;
}
inline bool is_macp_family(MethodId m) {
    return m == MethodId::macp || m == MethodId::macp_clipped;
}

/// One (method, horizon) unit holding both side trackers plus the raw
/// thresholds of intervals still awaiting realization.
struct HorizonUnit {
    TrackerState lower;
    TrackerState upper;
    SaturationFn sat_lower;
    SaturationFn sat_upper;
    bool sat_ready = false;

    // ring of raw issued thresholds keyed by origin, slot = origin % (H+1)
    std::vector<std::int64_t> ring_origin;
    std::vector<double> ring_lo, ring_up;

    std::optional<int> pending_err_lower;
    std::optional<int> pending_err_upper;
};

inline double derive_c_sat(int delta, double eta_scale) {
    // The quantile tracker needs an integrated miss excess of about
    // q* / eta <= 1 / eta_scale to climb to the target quantile; a pole
    // inside that range pins the err rate at alpha and freezes the tracker
    // on the saturation boundary. Place the pole at twice the transient:
    // (pi/2) * c_sat * g(delta) = 2 / eta_scale, g(t) = t / log(t).
    const double d = std::max(3, delta);
    const double g = d / std::log(d);
    return (2.0 / eta_scale) / ((std::numbers::pi / 2.0) * g);
}

inline SaturationFn make_saturation(const ExperimentConfig& cfg,
                                    const TrackerState& st) {
    SaturationFn fn;
    fn.c_sat = cfg.c_sat ? *cfg.c_sat
                         : derive_c_sat(cfg.delta_effective(), cfg.eta_scale);
    if (cfg.k_i) {
        fn.k_i = *cfg.k_i;
    } else {
        double b_hat = st.trailing_max();
        fn.k_i = (std::isfinite(b_hat) && b_hat > 0.0) ? 0.01 * b_hat : 0.01;
    }
    return fn;
}

} // namespace detail

/// Online learning with sequential splits: roll a t_r training window one
/// tick at a time, refit every refit_every origins, record nonconformity
/// scores as realizations arrive, and from origin t_r + t_c onward emit
/// H-step intervals for every requested method. Single-threaded and
/// deterministic given the plan.
inline RunResult run(const RunPlan& plan) {
    const auto& series = plan.series;
    series.validate();
    {
        auto errs = validate_config(plan.cfg);
        if (!errs.empty()) {
            std::string joined;
            for (const auto& e : errs) joined += (joined.empty() ? "" : "; ") + e;
            throw std::invalid_argument("invalid config: " + joined);
        }
    }
    if (plan.refit_every < 1) throw std::invalid_argument("refit_every must be >= 1");
    if (plan.methods.empty()) throw std::invalid_argument("no methods requested");

    const auto N = static_cast<std::int64_t>(series.size());
    const auto& cfg = plan.cfg;
    const int H = cfg.H;
    if (cfg.t_r + cfg.t_c + H > N)
        throw std::invalid_argument("series too short: need t_r + t_c + H points");

    const std::int64_t first_fc_pos = cfg.t_r;      // 1-based positions
    const std::int64_t last_fc_pos = N - H;
    const std::int64_t first_iv_pos = cfg.t_r + cfg.t_c;
    auto tick_of = [&](std::int64_t pos1) { return series.first_tick + pos1 - 1; };

    RunResult res;
    res.scores = ScorePanel(tick_of(first_fc_pos), tick_of(last_fc_pos), H);
    const SidedLevels levels = sided_levels(cfg.alpha, cfg.sided);

    std::map<MethodId, std::vector<detail::HorizonUnit>> units;
    for (MethodId m : plan.methods) {
        res.intervals.emplace(m, IntervalPanel(tick_of(first_iv_pos),
                                               tick_of(last_fc_pos), H));
        res.traces.emplace(m, std::vector<TraceRow>{});
        auto& per_h = units[m];
        per_h.resize(static_cast<std::size_t>(H));
        for (int h = 1; h <= H; ++h) {
            auto& u = per_h[static_cast<std::size_t>(h - 1)];
            for (Side side : {Side::lower, Side::upper}) {
                TrackerState& st = side == Side::lower ? u.lower : u.upper;
                st.method = m;
                st.horizon = h;
                st.side = side;
                st.alpha_side =
                    side == Side::lower ? levels.alpha_lower : levels.alpha_upper;
                st.alpha_hat = st.alpha_side;
                st.q_hat = 0.0;
                st.score_window_cap = static_cast<std::size_t>(cfg.delta_effective());
            }
            u.ring_origin.assign(static_cast<std::size_t>(H + 1), -1);
            u.ring_lo.assign(static_cast<std::size_t>(H + 1), kNaN);
            u.ring_up.assign(static_cast<std::size_t>(H + 1), kNaN);
        }
    }

    PointForecaster forecaster(plan.forecaster);
    bool have_fit = !forecaster.needs_fit();

    // forecasts awaiting realization, slot = position % (H + 1)
    std::vector<std::int64_t> fc_origin(static_cast<std::size_t>(H + 1), -1);
    std::vector<std::vector<double>> fc_vals(static_cast<std::size_t>(H + 1));

    // realized h-step scores ordered by origin, one vector per horizon
    std::vector<std::vector<double>> score_hist(static_cast<std::size_t>(H));

    std::vector<double> neg_buf;
    const int window = cfg.delta_effective();

    const bool want_mpid = units.count(MethodId::mpid) > 0;
    const bool want_acmcp =
        units.count(MethodId::acmcp) > 0 && plan.acmcp_error_models;
    bool any_adaptive = false;
    for (MethodId m : plan.methods)
        if (detail::is_macp_family(m) || detail::is_pid_family(m)) any_adaptive = true;

    for (std::int64_t pos = first_fc_pos; pos <= N; ++pos) {
        const std::int64_t tick = tick_of(pos);
        const double y_t = series.y[static_cast<std::size_t>(pos - 1)];

        // ---- realizations arriving at this tick ----
        for (int h = 1; h <= H; ++h) {
            const std::int64_t origin_pos = pos - h;
            if (origin_pos < first_fc_pos || origin_pos > last_fc_pos) continue;
            const auto slot = static_cast<std::size_t>(origin_pos % (H + 1));
            if (fc_origin[slot] != origin_pos) continue;
            const double s = y_t - fc_vals[slot][static_cast<std::size_t>(h - 1)];
            const std::int64_t origin_tick = tick_of(origin_pos);
            res.scores.set(origin_tick, h, s);
            score_hist[static_cast<std::size_t>(h - 1)].push_back(s);

            for (MethodId m : plan.methods) {
                auto& u = units[m][static_cast<std::size_t>(h - 1)];
                const bool adaptive =
                    detail::is_macp_family(m) || detail::is_pid_family(m);
                if (adaptive) {
                    u.lower.observe_score(-s);
                    u.upper.observe_score(s);
                    const auto rslot = static_cast<std::size_t>(origin_pos % (H + 1));
                    if (u.ring_origin[rslot] == origin_pos) {
                        u.pending_err_upper = s > u.ring_up[rslot] ? 1 : 0;
                        if (levels.lower_enabled)
                            u.pending_err_lower = -s > u.ring_lo[rslot] ? 1 : 0;
                        u.ring_origin[rslot] = -1;
                    }
                }
                auto& panel = res.intervals.at(m);
                if (panel.has(origin_tick, h)) panel.record_err(origin_tick, h, y_t);
            }
        }

        if (pos > last_fc_pos) continue; // realization mop-up only

        // ---- model refit ----
        if (forecaster.needs_fit() &&
            (!have_fit || (pos - first_fc_pos) % plan.refit_every == 0)) {
            const std::int64_t lo = plan.expanding ? 0 : pos - cfg.t_r;
            std::span<const double> win(series.y.data() + lo,
                                        static_cast<std::size_t>(pos - lo));
            try {
                forecaster.fit(win);
                have_fit = true;
            } catch (const std::exception& e) {
                std::ostringstream msg;
                msg << "origin " << tick << ": fit failed (" << e.what() << ")";
                if (!have_fit) throw std::runtime_error(msg.str());
                msg << "; reusing previous fit";
                res.warnings.push_back(msg.str());
            }
        }

        // ---- point forecasts from this origin ----
        std::span<const double> history(series.y.data(), static_cast<std::size_t>(pos));
        const auto slot = static_cast<std::size_t>(pos % (H + 1));
        fc_vals[slot] = forecaster.forecast(history, H, tick);
        fc_origin[slot] = pos;

        // Adaptive trackers iterate through the calibration window as well
        // (no panel cells emitted there), so they reach the test boundary
        // already burned in; stateless methods act only when emitting.
        const bool emit = pos >= first_iv_pos;
        if (!emit && !any_adaptive) continue;

        // ---- shared per-horizon tracker inputs ----
        std::vector<double> scorecast(static_cast<std::size_t>(H), 0.0);
        std::vector<double> etilde(static_cast<std::size_t>(H), 0.0);
        for (int h = 1; h <= H; ++h) {
            const auto& hist = score_hist[static_cast<std::size_t>(h - 1)];
            std::span<const double> tail(hist);
            if (static_cast<int>(tail.size()) > window)
                tail = tail.subspan(tail.size() - static_cast<std::size_t>(window));
            if (want_mpid && tail.size() >= 10)
                scorecast[static_cast<std::size_t>(h - 1)] = theta_forecast(tail, h);
            if (want_acmcp)
                etilde[static_cast<std::size_t>(h - 1)] = acmcp_error_forecast(
                    res.scores, h, window, hist,
                    std::span<const double>(etilde.data(),
                                            static_cast<std::size_t>(h - 1)));
        }

        // ---- method steps and interval emission ----
        for (MethodId m : plan.methods) {
            const bool pid_family = detail::is_pid_family(m);
            const bool macp_family = detail::is_macp_family(m);
            if (!emit && !pid_family && !macp_family) continue;
            auto& per_h = units[m];
            auto& panel = res.intervals.at(m);
            for (int h = 1; h <= H; ++h) {
                auto& u = per_h[static_cast<std::size_t>(h - 1)];
                const auto& hist = score_hist[static_cast<std::size_t>(h - 1)];
                if (macp_family && hist.empty()) continue; // no window yet
                const auto cal_n =
                    std::min<std::size_t>(hist.size(), static_cast<std::size_t>(cfg.t_c));
                std::span<const double> cal(hist.data() + hist.size() - cal_n, cal_n);
                neg_buf.assign(cal.begin(), cal.end());
                for (double& v : neg_buf) v = -v;

                double dterm = 0.0;
                if (m == MethodId::mpid) dterm = scorecast[static_cast<std::size_t>(h - 1)];
                if (m == MethodId::acmcp) dterm = etilde[static_cast<std::size_t>(h - 1)];

                TraceRow tr;
                tr.origin = tick;
                tr.horizon = h;
                tr.dterm = dterm;

                double q_up = kNaN, q_lo = kNaN;
                switch (m) {
                    case MethodId::mscp:
                        q_up = mscp_threshold(cal, levels.alpha_upper);
                        if (levels.lower_enabled)
                            q_lo = mscp_threshold(neg_buf, levels.alpha_lower);
                        break;
                    case MethodId::mwcp:
                        q_up = mwcp_threshold(cal, cfg.decay_b, levels.alpha_upper);
                        if (levels.lower_enabled)
                            q_lo = mwcp_threshold(neg_buf, cfg.decay_b,
                                                  levels.alpha_lower);
                        break;
                    case MethodId::macp:
                    case MethodId::macp_clipped: {
                        const bool clip = m == MethodId::macp_clipped;
                        q_up = macp_step(u.upper, u.pending_err_upper, cfg.gamma, cal,
                                         clip);
                        tr.aux_upper = u.upper.alpha_hat;
                        if (levels.lower_enabled) {
                            q_lo = macp_step(u.lower, u.pending_err_lower, cfg.gamma,
                                             neg_buf, clip);
                            tr.aux_lower = u.lower.alpha_hat;
                        }
                        break;
                    }
                    case MethodId::mpi:
                    case MethodId::mpid:
                    case MethodId::acmcp: {
                        if (!u.sat_ready) {
                            // latch constants once a positive score scale exists
                            u.sat_upper = detail::make_saturation(cfg, u.upper);
                            u.sat_lower = detail::make_saturation(cfg, u.lower);
                            u.sat_ready = cfg.k_i.has_value() ||
                                          (u.upper.trailing_max() > 0.0 &&
                                           u.lower.trailing_max() > 0.0);
                        }
                        const double eta_up = tracker_eta(u.upper, cfg.eta_scale);
                        q_up = pid_step(u.upper, u.pending_err_upper, eta_up,
                                        u.sat_upper, dterm);
                        tr.aux_upper = eta_up;
                        if (levels.lower_enabled) {
                            const double eta_lo = tracker_eta(u.lower, cfg.eta_scale);
                            q_lo = pid_step(u.lower, u.pending_err_lower, eta_lo,
                                            u.sat_lower, -dterm);
                            tr.aux_lower = eta_lo;
                        }
                        break;
                    }
                }
                u.pending_err_upper.reset();
                u.pending_err_lower.reset();

                if (pid_family || macp_family) {
                    const auto rslot = static_cast<std::size_t>(pos % (H + 1));
                    u.ring_origin[rslot] = pos;
                    u.ring_lo[rslot] = q_lo;
                    u.ring_up[rslot] = q_up;
                }
                if (!emit) continue;

                const double yhat = fc_vals[slot][static_cast<std::size_t>(h - 1)];
                double lower = levels.lower_enabled ? yhat - q_lo : -kInf;
                double upper = yhat + q_up;
                if (upper == -kInf || lower == kInf || !(lower <= upper)) {
                    // empty set: store a degenerate point
                    double c;
                    if (std::isfinite(lower) && std::isfinite(upper))
                        c = 0.5 * (lower + upper);
                    else if (std::isfinite(lower))
                        c = lower;
                    else if (std::isfinite(upper))
                        c = upper;
                    else
                        c = yhat;
                    lower = upper = c;
                }
                panel.set_bounds(tick, h, lower, upper);

                tr.thr_lower = q_lo;
                tr.thr_upper = q_up;
                res.traces.at(m).push_back(tr);
            }
        }
    }
    return res;
}

// ---- trace serialization (origin,horizon,field,value) ----

inline std::string to_csv(const std::vector<TraceRow>& trace) {
    std::ostringstream out;
    out << "origin,horizon,field,value\n";
    for (const auto& r : trace) {
        out << r.origin << ',' << r.horizon << ",thr_lower,"
            << format_double(r.thr_lower) << '\n';
        out << r.origin << ',' << r.horizon << ",thr_upper,"
            << format_double(r.thr_upper) << '\n';
        out << r.origin << ',' << r.horizon << ",aux_lower,"
            << format_double(r.aux_lower) << '\n';
        out << r.origin << ',' << r.horizon << ",aux_upper,"
            << format_double(r.aux_upper) << '\n';
        out << r.origin << ',' << r.horizon << ",dterm," << format_double(r.dterm)
            << '\n';
    }
    return out.str();
}

} // namespace cpf
