// cpforecast: simulate reference series, run online conformal interval
// methods over them, and evaluate coverage/width metrics.
//
// Exit codes: 0 ok, 1 usage, 2 validation, 3 runtime.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpforecast/cpforecast.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string lowercase(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// ---- run configuration file: `key = value` lines, '#' comments ----

struct RunConfig {
    std::string series_path;
    cpf::ExperimentConfig cfg;
    std::string forecaster = "ar_ls:2";
    std::vector<std::string> methods = {"mscp", "mwcp", "macp",
                                        "mpi",  "mpid", "acmcp"};
    int refit_every = 1;
    bool expanding = false;
    bool acmcp_error_models = true;
    std::string out_dir = "runout";

    void apply(const std::string& key, const std::string& value) {
        auto& c = cfg;
        if (key == "series") series_path = value;
        else if (key == "alpha") c.alpha = cpf::parse_double(value);
        else if (key == "H") c.H = std::stoi(value);
        else if (key == "t_r") c.t_r = std::stoi(value);
        else if (key == "t_c") c.t_c = std::stoi(value);
        else if (key == "gamma") c.gamma = cpf::parse_double(value);
        else if (key == "decay_b") c.decay_b = cpf::parse_double(value);
        else if (key == "c_sat") {
            if (lowercase(value) == "auto") c.c_sat.reset();
            else c.c_sat = cpf::parse_double(value);
        } else if (key == "k_i") {
            if (lowercase(value) == "auto") c.k_i.reset();
            else c.k_i = cpf::parse_double(value);
        } else if (key == "eta_scale") c.eta_scale = cpf::parse_double(value);
        else if (key == "delta") c.delta = std::stoi(value);
        else if (key == "sided") {
            auto v = lowercase(value);
            if (v == "two" || v == "two_sided") c.sided = cpf::SidedMode::two_sided;
            else if (v == "upper" || v == "upper_only") c.sided = cpf::SidedMode::upper_only;
            else throw ValidationError("sided must be 'two' or 'upper'");
        } else if (key == "seed") c.seed = std::stoull(value);
        else if (key == "forecaster") forecaster = value;
        else if (key == "methods") methods = split_list(value);
        else if (key == "refit_every") refit_every = std::stoi(value);
        else if (key == "expanding") expanding = (value == "true" || value == "1");
        else if (key == "acmcp_error_models")
            acmcp_error_models = !(value == "off" || value == "false" || value == "0");
        else if (key == "out") out_dir = value;
        else throw ValidationError("unknown config key '" + key + "'");
    }

    std::string echo() const {
        std::ostringstream out;
        out << "series = " << series_path << '\n';
        out << "alpha = " << cpf::format_double(cfg.alpha) << '\n';
        out << "H = " << cfg.H << '\n';
        out << "t_r = " << cfg.t_r << '\n';
        out << "t_c = " << cfg.t_c << '\n';
        out << "gamma = " << cpf::format_double(cfg.gamma) << '\n';
        out << "decay_b = " << cpf::format_double(cfg.decay_b) << '\n';
        out << "c_sat = " << (cfg.c_sat ? cpf::format_double(*cfg.c_sat) : "auto") << '\n';
        out << "k_i = " << (cfg.k_i ? cpf::format_double(*cfg.k_i) : "auto") << '\n';
        out << "eta_scale = " << cpf::format_double(cfg.eta_scale) << '\n';
        out << "delta = " << cfg.delta << '\n';
        out << "sided = " << cpf::to_string(cfg.sided) << '\n';
        out << "seed = " << cfg.seed << '\n';
        out << "forecaster = " << forecaster << '\n';
        out << "methods = ";
        for (std::size_t i = 0; i < methods.size(); ++i)
            out << (i ? "," : "") << methods[i];
        out << '\n';
        out << "refit_every = " << refit_every << '\n';
        out << "expanding = " << (expanding ? "true" : "false") << '\n';
        out << "acmcp_error_models = " << (acmcp_error_models ? "on" : "off") << '\n';
        out << "out = " << out_dir << '\n';
        return out.str();
    }
};

RunConfig load_run_config(const std::string& path) {
    std::string text = cpf::read_file(path);
    RunConfig rc;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
            if (blank) continue;
            throw ValidationError(path + ":" + std::to_string(lineno) +
                                  ": expected 'key = value'");
        }
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        rc.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return rc;
}

// ---- subcommands ----

int cmd_simulate(const std::string& dgp, int n, std::uint64_t seed, int burn_in,
                 const std::string& out_path) {
    cpf::DgpSpec spec;
    spec.kind = cpf::dgp_from_string(dgp);
    spec.n = n;
    spec.seed = seed;
    spec.burn_in = burn_in;
    spec.validate();

    auto sim = cpf::simulate(spec);
    cpf::write_file(out_path, cpf::to_csv(sim.frame));

    std::ostringstream canon;
    canon << "dgp=" << cpf::to_string(spec.kind) << ",n=" << spec.n
          << ",burn_in=" << spec.burn_in << ",seed=" << spec.seed;
    json manifest{{"dgp", cpf::to_string(spec.kind)},
                  {"n", spec.n},
                  {"burn_in", spec.burn_in},
                  {"seed", spec.seed},
                  {"spec_hash", fnv1a64(canon.str())},
                  {"guard_events", sim.guard_events},
                  {"series", out_path}};
    cpf::write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << out_path << " (" << sim.frame.size() << " rows)\n";
    return 0;
}

int cmd_run(const RunConfig& rc) {
    auto cfg_errors = cpf::validate_config(rc.cfg);
    if (!cfg_errors.empty()) {
        std::string joined;
        for (const auto& e : cfg_errors) joined += (joined.empty() ? "" : "; ") + e;
        throw ValidationError(joined);
    }
    if (rc.series_path.empty()) throw ValidationError("config is missing 'series'");

    cpf::RunPlan plan;
    plan.series = cpf::load_series_csv(rc.series_path);
    plan.forecaster = cpf::ForecasterSpec::parse(rc.forecaster);
    plan.methods.clear();
    for (const auto& m : rc.methods) plan.methods.push_back(cpf::method_from_string(m));
    plan.cfg = rc.cfg;
    plan.refit_every = rc.refit_every;
    plan.expanding = rc.expanding;
    plan.acmcp_error_models = rc.acmcp_error_models;

    auto result = cpf::run(plan);

    fs::create_directories(rc.out_dir);
    auto out = [&](const std::string& name) { return (fs::path(rc.out_dir) / name).string(); };
    cpf::write_file(out("scores.csv"), cpf::to_csv(result.scores));
    for (const auto& [m, panel] : result.intervals)
        cpf::write_file(out("intervals_" + cpf::to_string(m) + ".csv"),
                        cpf::to_csv(panel));
    for (const auto& [m, trace] : result.traces)
        cpf::write_file(out("trace_" + cpf::to_string(m) + ".csv"), cpf::to_csv(trace));
    cpf::write_file(out("config_resolved.txt"), rc.echo());

    std::cout << rc.echo();
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "wrote panels for " << result.intervals.size() << " methods to "
              << rc.out_dir << '\n';
    return 0;
}

struct PanelSeries {
    std::vector<std::int64_t> origins;
    std::vector<std::optional<int>> err;
    std::vector<double> width;
};

PanelSeries extract_series(const cpf::IntervalPanel& p, int h) {
    PanelSeries s;
    for (std::int64_t t = p.first_origin(); t <= p.last_origin(); ++t) {
        if (!p.has(t, h)) continue;
        const auto& c = p.at(t, h);
        s.origins.push_back(t);
        s.err.push_back(c.err);
        s.width.push_back(c.upper - c.lower);
    }
    return s;
}

int cmd_evaluate(const std::string& dir, int window, double alpha, bool boxplot,
                 const std::string& out_path) {
    std::vector<std::pair<std::string, cpf::IntervalPanel>> panels;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        auto name = e.path().filename().string();
        if (name.rfind("intervals_", 0) == 0 && e.path().extension() == ".csv")
            files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no intervals_*.csv in " + dir);
    for (const auto& f : files) {
        auto method = f.filename().string();
        method = method.substr(10, method.size() - 14); // strip prefix/suffix
        panels.emplace_back(method,
                            cpf::interval_panel_from_csv(cpf::read_csv(f.string())));
    }

    std::ostringstream out;
    out << "method,horizon,position,metric,value\n";
    auto emit = [&](const std::string& m, int h, std::int64_t pos,
                    const std::string& metric, double v) {
        out << m << ',' << h << ',' << pos << ',' << metric << ','
            << cpf::format_double(v) << '\n';
    };

    bool warned_window = false;
    for (const auto& [method, panel] : panels) {
        for (int h = 1; h <= panel.horizons(); ++h) {
            auto s = extract_series(panel, h);
            if (s.origins.empty()) continue;

            // aggregates (position 0)
            long n_err = 0, sum_err = 0;
            for (const auto& e : s.err)
                if (e) { ++n_err; sum_err += *e; }
            if (n_err > 0) {
                double cov = 1.0 - static_cast<double>(sum_err) / static_cast<double>(n_err);
                emit(method, h, 0, "coverage", cov);
                emit(method, h, 0, "coverage_gap", alpha - (1.0 - cov));
            }
            cpf::KahanSum wsum;
            long inf_widths = 0;
            for (double w : s.width) {
                if (std::isinf(w)) ++inf_widths;
                else wsum.add(w);
            }
            emit(method, h, 0, "mean_width",
                 inf_widths > 0 ? cpf::kInf
                                : wsum.value() / static_cast<double>(s.width.size()));
            emit(method, h, 0, "inf_width_count", static_cast<double>(inf_widths));
            {
                std::vector<double> sorted(s.width);
                std::sort(sorted.begin(), sorted.end());
                std::size_t m2 = sorted.size();
                emit(method, h, 0, "median_width",
                     m2 % 2 == 1 ? sorted[m2 / 2]
                                 : 0.5 * (sorted[m2 / 2 - 1] + sorted[m2 / 2]));
            }

            if (static_cast<int>(s.origins.size()) < window) {
                if (!warned_window) {
                    std::cerr << "warning: window " << window
                              << " exceeds test length; aggregate-only output\n";
                    warned_window = true;
                }
                continue;
            }
            auto cov = cpf::rolling_coverage(s.err, window);
            auto wmean = cpf::rolling_width(s.width, window, cpf::WidthStat::mean);
            auto wmed = cpf::rolling_width(s.width, window, cpf::WidthStat::median);
            for (std::size_t i = 0; i < s.origins.size(); ++i) {
                if (!std::isnan(cov[i]))
                    emit(method, h, s.origins[i], "rolling_coverage", cov[i]);
                if (!std::isnan(wmean[i]))
                    emit(method, h, s.origins[i], "rolling_mean_width", wmean[i]);
                if (!std::isnan(wmed[i]))
                    emit(method, h, s.origins[i], "rolling_median_width", wmed[i]);
            }
            if (boxplot) {
                auto emit_box = [&](const std::string& prefix,
                                    const std::vector<double>& series) {
                    std::vector<double> vals;
                    for (double v : series)
                        if (!std::isnan(v) && !std::isinf(v)) vals.push_back(v);
                    if (vals.empty()) return;
                    auto b = cpf::boxplot_summary(vals);
                    emit(method, h, 0, prefix + "_min", b.min);
                    emit(method, h, 0, prefix + "_q1", b.q1);
                    emit(method, h, 0, prefix + "_median", b.median);
                    emit(method, h, 0, prefix + "_q3", b.q3);
                    emit(method, h, 0, prefix + "_max", b.max);
                    emit(method, h, 0, prefix + "_whisker_low", b.whisker_low);
                    emit(method, h, 0, prefix + "_whisker_high", b.whisker_high);
                };
                emit_box("box_rolling_coverage", cov);
                emit_box("box_rolling_mean_width", wmean);
            }
        }
    }
    cpf::write_file(out_path, out.str());
    std::cout << "wrote " << out_path << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online conformal prediction for multi-step time series forecasting"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "generate a reference series CSV");
    std::string sim_dgp;
    int sim_n = 0;
    std::uint64_t sim_seed = 1;
    int sim_burn = 500;
    std::string sim_out = "series.csv";
    sim->add_option("--dgp", sim_dgp, "ar2 | nonlinear")->required();
    sim->add_option("--n", sim_n, "number of points to keep")->required();
    sim->add_option("--seed", sim_seed, "rng seed");
    sim->add_option("--burn-in", sim_burn, "burn-in length");
    sim->add_option("--out", sim_out, "output CSV path");

    auto* runc = app.add_subcommand("run", "run conformal methods over a series");
    std::string run_config;
    std::vector<std::string> run_sets;
    std::string run_out;
    runc->add_option("--config", run_config, "key = value config file")->required();
    runc->add_option("--set", run_sets, "override: key=value (repeatable)");
    runc->add_option("--out", run_out, "override output directory");

    auto* eval = app.add_subcommand("evaluate", "compute metrics from run panels");
    std::string eval_dir;
    int eval_window = 500;
    double eval_alpha = 0.1;
    bool eval_box = false;
    std::string eval_out;
    eval->add_option("--panels", eval_dir, "directory holding intervals_*.csv")
        ->required();
    eval->add_option("--window", eval_window, "rolling window length");
    eval->add_option("--alpha", eval_alpha, "target miscoverage for the gap metric");
    eval->add_flag("--boxplot", eval_box, "emit boxplot summaries");
    eval->add_option("--out", eval_out, "output CSV (default <panels>/metrics.csv)");

    auto* ver = app.add_subcommand("version", "print version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "E_USAGE: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*ver) {
            std::cout << "cpforecast " << CPFORECAST_VERSION << '\n';
            return 0;
        }
        if (*sim) return cmd_simulate(sim_dgp, sim_n, sim_seed, sim_burn, sim_out);
        if (*runc) {
            auto rc = load_run_config(run_config);
            for (const auto& kv : run_sets) {
                auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw ValidationError("--set expects key=value, got '" + kv + "'");
                rc.apply(kv.substr(0, eq), kv.substr(eq + 1));
            }
            if (!run_out.empty()) rc.out_dir = run_out;
            return cmd_run(rc);
        }
        if (*eval) {
            if (eval_window < 1) throw ValidationError("window must be >= 1");
            if (!(eval_alpha > 0.0 && eval_alpha < 1.0))
                throw ValidationError("alpha out of (0,1)");
            std::string out_path =
                eval_out.empty() ? (fs::path(eval_dir) / "metrics.csv").string()
                                 : eval_out;
            return cmd_evaluate(eval_dir, eval_window, eval_alpha, eval_box, out_path);
        }
    } catch (const ValidationError& e) {
        std::cerr << "E_VALIDATION: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "E_VALIDATION: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "E_RUNTIME: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
