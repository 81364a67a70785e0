#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "cpforecast/config.hpp"
#include "cpforecast/numeric.hpp"
#include "cpforecast/panels.hpp"
#include "cpforecast/rng.hpp"
#include "cpforecast/series.hpp"

using namespace cpf;

namespace {

bool has_error(const std::vector<std::string>& errs, const std::string& needle) {
    return std::any_of(errs.begin(), errs.end(), [&](const std::string& e) {
        return e.find(needle) != std::string::npos;
    });
}

} // namespace

TEST(Config, ValidDefaults) {
    ExperimentConfig cfg;
    cfg.alpha = 0.1;
    cfg.H = 3;
    cfg.t_c = 500;
    EXPECT_TRUE(validate_config(cfg).empty());
}

TEST(Config, AlphaBoundary) {
    ExperimentConfig cfg;
    cfg.alpha = 0.0;
    auto errs = validate_config(cfg);
    EXPECT_TRUE(has_error(errs, "alpha out of (0,1)"));
}

TEST(Config, CalibrationTooShortForHorizon) {
    ExperimentConfig cfg;
    cfg.t_c = 5;
    cfg.H = 3;
    auto errs = validate_config(cfg);
    EXPECT_TRUE(has_error(errs, "t_c < 10*H"));
}

TEST(Config, ReportsEveryViolation) {
    ExperimentConfig cfg;
    cfg.alpha = 1.5;
    cfg.H = 0;
    cfg.t_r = 0;
    cfg.gamma = -1.0;
    cfg.decay_b = 1.0;
    cfg.c_sat = -2.0;
    cfg.k_i = 0.0;
    cfg.eta_scale = 0.0;
    cfg.delta = -1;
    auto errs = validate_config(cfg);
    EXPECT_GE(errs.size(), 8u);
    EXPECT_TRUE(has_error(errs, "alpha"));
    EXPECT_TRUE(has_error(errs, "H"));
    EXPECT_TRUE(has_error(errs, "gamma"));
    EXPECT_TRUE(has_error(errs, "decay_b"));
    EXPECT_TRUE(has_error(errs, "c_sat"));
    EXPECT_TRUE(has_error(errs, "k_i"));
    EXPECT_TRUE(has_error(errs, "eta_scale"));
    EXPECT_TRUE(has_error(errs, "delta"));
}

TEST(Numeric, DoubleFormatRoundTrips) {
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        double x = rng.gaussian() * std::pow(10.0, static_cast<double>(
                                                       rng.next_u64() % 61) -
                                                       30.0);
        EXPECT_EQ(parse_double(format_double(x)), x);
    }
    EXPECT_EQ(parse_double("inf"), kInf);
    EXPECT_EQ(parse_double("-inf"), -kInf);
    EXPECT_THROW(parse_double("12x"), std::invalid_argument);
    EXPECT_THROW(parse_double(""), std::invalid_argument);
}

TEST(SeriesFrame, CsvRoundTripIsBitExact) {
    Rng rng(5);
    SeriesFrame f;
    f.first_tick = -3;
    f.x_names = {"x1", "x2"};
    f.x.resize(2);
    for (int i = 0; i < 200; ++i) {
        f.y.push_back(rng.gaussian() * 1e6);
        f.x[0].push_back(rng.uniform01());
        f.x[1].push_back(rng.gaussian() * 1e-8);
    }
    auto csv = to_csv(f);
    std::istringstream is(csv);
    auto reloaded = series_from_csv([&] {
        CsvTable t;
        std::string line;
        bool first = true;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            auto fields = split_csv_line(line);
            if (first) { t.header = fields; first = false; }
            else t.rows.push_back(fields);
        }
        return t;
    }());
    ASSERT_EQ(reloaded.y.size(), f.y.size());
    EXPECT_EQ(reloaded.first_tick, f.first_tick);
    for (std::size_t i = 0; i < f.y.size(); ++i) {
        EXPECT_EQ(reloaded.y[i], f.y[i]);
        EXPECT_EQ(reloaded.x[0][i], f.x[0][i]);
        EXPECT_EQ(reloaded.x[1][i], f.x[1][i]);
    }
    EXPECT_EQ(to_csv(reloaded), csv);
}

TEST(SeriesFrame, ValidationCatchesBadInput) {
    SeriesFrame f;
    f.y = {1.0, kNaN};
    EXPECT_THROW(f.validate(), std::invalid_argument);
    f.y = {1.0, 2.0};
    f.x_names = {"x1"};
    f.x = {{1.0}}; // wrong length
    EXPECT_THROW(f.validate(), std::invalid_argument);

    CsvTable t;
    t.header = {"tick", "y"};
    t.rows = {{"1", "1.5"}, {"3", "2.5"}}; // gap in ticks
    EXPECT_THROW(series_from_csv(t), std::runtime_error);
}

TEST(ScorePanel, AppendOnlyCells) {
    ScorePanel p(10, 20, 3);
    EXPECT_FALSE(p.has(10, 1));
    p.set(10, 1, 2.0);  // yhat 10, y 12
    p.set(10, 2, -2.0); // yhat 12, y 10
    EXPECT_EQ(p.at(10, 1), 2.0);
    EXPECT_EQ(p.at(10, 2), -2.0);
    EXPECT_THROW(p.set(10, 1, 5.0), std::logic_error); // duplicate write
    EXPECT_THROW(p.set(9, 1, 0.0), std::out_of_range);
    EXPECT_THROW(p.set(10, 4, 0.0), std::out_of_range);
    EXPECT_THROW(p.at(11, 1), std::out_of_range);
}

TEST(ScorePanel, CsvRoundTripIsBitExact) {
    Rng rng(9);
    ScorePanel p(100, 180, 4);
    for (std::int64_t t = 100; t <= 180; ++t)
        for (int h = 1; h <= 4; ++h)
            if (rng.next_u64() % 3 != 0) p.set(t, h, rng.gaussian());
    auto csv = to_csv(p);
    std::istringstream is(csv);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (first) { t.header = fields; first = false; }
        else t.rows.push_back(fields);
    }
    auto reloaded = score_panel_from_csv(t);
    EXPECT_TRUE(reloaded == p);
    EXPECT_EQ(to_csv(reloaded), csv);
}

TEST(IntervalPanel, ErrSemantics) {
    IntervalPanel p(1, 10, 2);
    p.set_bounds(1, 1, -1.0, 1.0);
    p.record_err(1, 1, 0.5);
    EXPECT_EQ(*p.at(1, 1).err, 0);
    p.set_bounds(2, 1, -1.0, 1.0);
    p.record_err(2, 1, 1.5);
    EXPECT_EQ(*p.at(2, 1).err, 1);
    // boundary values covered
    p.set_bounds(3, 1, -1.0, 1.0);
    p.record_err(3, 1, 1.0);
    EXPECT_EQ(*p.at(3, 1).err, 0);
    // infinite bounds
    p.set_bounds(4, 1, -kInf, kInf);
    p.record_err(4, 1, 1e12);
    EXPECT_EQ(*p.at(4, 1).err, 0);
    EXPECT_THROW(p.record_err(4, 1, 0.0), std::logic_error);
    EXPECT_THROW(p.set_bounds(5, 1, 2.0, 1.0), std::invalid_argument);
}

TEST(IntervalPanel, ErrRecomputeMatchesStored) {
    Rng rng(21);
    IntervalPanel p(1, 200, 2);
    std::vector<double> ys;
    for (std::int64_t t = 1; t <= 200; ++t) {
        double lo = rng.gaussian();
        double up = lo + 2.0 * rng.uniform01();
        if (rng.next_u64() % 7 == 0) up = kInf;
        p.set_bounds(t, 1, lo, up);
        double y = rng.gaussian();
        ys.push_back(y);
        p.record_err(t, 1, y);
    }
    for (std::int64_t t = 1; t <= 200; ++t) {
        const auto& c = p.at(t, 1);
        int recomputed =
            IntervalPanel::miscovered(c, ys[static_cast<std::size_t>(t - 1)]) ? 1 : 0;
        EXPECT_EQ(*c.err, recomputed);
    }
}

TEST(IntervalPanel, CsvRoundTripIsBitExact) {
    Rng rng(33);
    IntervalPanel p(50, 120, 3);
    for (std::int64_t t = 50; t <= 120; ++t)
        for (int h = 1; h <= 3; ++h) {
            if (rng.next_u64() % 4 == 0) continue;
            double lo = rng.gaussian();
            double up = rng.next_u64() % 6 == 0 ? kInf : lo + rng.uniform01();
            p.set_bounds(t, h, lo, up);
            if (rng.next_u64() % 3 != 0) p.record_err(t, h, rng.gaussian());
        }
    auto csv = to_csv(p);
    std::istringstream is(csv);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (first) { t.header = fields; first = false; }
        else t.rows.push_back(fields);
    }
    auto reloaded = interval_panel_from_csv(t);
    EXPECT_TRUE(reloaded == p);
    EXPECT_EQ(to_csv(reloaded), csv);
}
