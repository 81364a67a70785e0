#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpforecast/csv.hpp"
#include "cpforecast/forecasters/ar.hpp"
#include "cpforecast/forecasters/theta.hpp"
#include "cpforecast/numeric.hpp"

namespace cpf {

enum class ForecasterKind { ar_ls, mean, theta, external };

struct ForecasterSpec {
    ForecasterKind kind = ForecasterKind::ar_ls;
    int order = 2;              // ar_ls only
    std::string external_path;  // external only: CSV origin,horizon,yhat

    static ForecasterSpec parse(const std::string& text) {
        ForecasterSpec s;
        auto colon = text.find(':');
        std::string head = colon == std::string::npos ? text : text.substr(0, colon);
        std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
        if (head == "ar_ls") {
            s.kind = ForecasterKind::ar_ls;
            if (!arg.empty()) s.order = std::stoi(arg);
            if (s.order < 1) throw std::invalid_argument("ar_ls order must be >= 1");
        } else if (head == "mean") {
            s.kind = ForecasterKind::mean;
        } else if (head == "theta") {
            s.kind = ForecasterKind::theta;
        } else if (head == "external") {
            s.kind = ForecasterKind::external;
            if (arg.empty()) throw std::invalid_argument("external forecaster needs a path");
            s.external_path = arg;
        } else {
            throw std::invalid_argument("unknown forecaster '" + text + "'");
        }
        return s;
    }

    std::string describe() const {
        switch (kind) {
            case ForecasterKind::ar_ls: return "ar_ls:" + std::to_string(order);
            case ForecasterKind::mean: return "mean";
            case ForecasterKind::theta: return "theta";
            case ForecasterKind::external: return "external:" + external_path;
        }
        return "?";
    }
};

/// Precomputed point forecasts keyed by (origin, horizon).
class ExternalForecasts {
public:
    ExternalForecasts() = default;
    explicit ExternalForecasts(const std::string& path) {
        auto t = read_csv(path);
        if (t.header != std::vector<std::string>{"origin", "horizon", "yhat"})
            throw std::runtime_error(path + ": header must be 'origin,horizon,yhat'");
        for (const auto& r : t.rows)
            table_[{std::stoll(r[0]), std::stoi(r[1])}] = parse_double(r[2]);
    }
    double at(std::int64_t origin, int h) const {
        auto it = table_.find({origin, h});
        if (it == table_.end()) {
            std::ostringstream msg;
            msg << "no external forecast for origin " << origin << " horizon " << h;
            throw std::runtime_error(msg.str());
        }
        return it->second;
    }

private:
    std::map<std::pair<std::int64_t, int>, double> table_;
};

/// Pluggable point forecaster driven by the engine: fit() on a trailing
/// window every refit_every origins, forecast() each origin. The AR kind
/// applies its stored coefficients to the updated history between refits;
/// mean and theta forecast from their stored fit until the next refit.
class PointForecaster {
public:
    explicit PointForecaster(ForecasterSpec spec) : spec_(std::move(spec)) {
        if (spec_.kind == ForecasterKind::external)
            external_ = ExternalForecasts(spec_.external_path);
    }

    bool needs_fit() const { return spec_.kind != ForecasterKind::external; }

    void fit(std::span<const double> window) {
        switch (spec_.kind) {
            case ForecasterKind::ar_ls:
                ar_ = fit_ar_ls(window, spec_.order);
                break;
            case ForecasterKind::mean:
                mean_ = mean_of(window);
                break;
            case ForecasterKind::theta:
                theta_ = fit_theta(window);
                break;
            case ForecasterKind::external:
                break;
        }
        fitted_ = true;
    }

    std::vector<double> forecast(std::span<const double> history, int H,
                                 std::int64_t origin) const {
        if (spec_.kind == ForecasterKind::external) {
            std::vector<double> out;
            out.reserve(static_cast<std::size_t>(H));
            for (int h = 1; h <= H; ++h) out.push_back(external_.at(origin, h));
            return out;
        }
        if (!fitted_) throw std::logic_error("forecast before fit");
        switch (spec_.kind) {
            case ForecasterKind::ar_ls:
                return forecast_recursive(ar_, history, H);
            case ForecasterKind::mean:
                return std::vector<double>(static_cast<std::size_t>(H), mean_);
            case ForecasterKind::theta: {
                std::vector<double> out;
                out.reserve(static_cast<std::size_t>(H));
                for (int h = 1; h <= H; ++h) out.push_back(theta_forecast(theta_, h));
                return out;
            }
            case ForecasterKind::external:
                break;
        }
        throw std::logic_error("unreachable");
    }

    const ArFit& ar_fit() const { return ar_; }

private:
    ForecasterSpec spec_;
    ExternalForecasts external_;
    ArFit ar_;
    ThetaFit theta_;
    double mean_ = 0.0;
    bool fitted_ = false;
};

} // namespace cpf
