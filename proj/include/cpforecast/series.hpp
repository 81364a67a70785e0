#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpforecast/csv.hpp"
#include "cpforecast/numeric.hpp"

namespace cpf {

/// A response series on a unit-step integer tick axis, plus optional
/// exogenous predictor columns aligned to the same ticks. Calendar
/// structure, if any, lives outside this type.
struct SeriesFrame {
    std::int64_t first_tick = 1;
    std::vector<double> y;
    std::vector<std::string> x_names;          // one per predictor column
    std::vector<std::vector<double>> x;        // x[j] aligned with y

    std::size_t size() const { return y.size(); }
    std::int64_t tick_at(std::size_t pos) const {
        return first_tick + static_cast<std::int64_t>(pos);
    }
    std::int64_t last_tick() const {
        return first_tick + static_cast<std::int64_t>(y.size()) - 1;
    }

    void validate() const {
        if (y.empty()) throw std::invalid_argument("series is empty");
        if (x_names.size() != x.size())
            throw std::invalid_argument("predictor name/column count mismatch");
        for (const auto& col : x)
            if (col.size() != y.size())
                throw std::invalid_argument("predictor column length mismatch");
        for (double v : y)
            if (!std::isfinite(v))
                throw std::invalid_argument("missing or non-finite response value");
        for (const auto& col : x)
            for (double v : col)
                if (!std::isfinite(v))
                    throw std::invalid_argument("missing or non-finite predictor value");
    }
};

inline std::string to_csv(const SeriesFrame& f) {
    std::ostringstream out;
    out << "tick,y";
    for (const auto& n : f.x_names) out << ',' << n;
    out << '\n';
    for (std::size_t i = 0; i < f.y.size(); ++i) {
        out << f.tick_at(i) << ',' << format_double(f.y[i]);
        for (const auto& col : f.x) out << ',' << format_double(col[i]);
        out << '\n';
    }
    return out.str();
}

inline SeriesFrame series_from_csv(const CsvTable& t) {
    if (t.header.size() < 2 || t.header[0] != "tick" || t.header[1] != "y")
        throw std::runtime_error("series header must start with 'tick,y'");
    SeriesFrame f;
    for (std::size_t j = 2; j < t.header.size(); ++j)
        f.x_names.push_back(t.header[j]);
    f.x.resize(f.x_names.size());
    std::int64_t prev_tick = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        std::int64_t tick = std::stoll(r[0]);
        if (i == 0)
            f.first_tick = tick;
        else if (tick != prev_tick + 1)
            throw std::runtime_error("ticks must increase with unit step at row " +
                                     std::to_string(i + 2));
        prev_tick = tick;
        f.y.push_back(parse_double(r[1]));
        for (std::size_t j = 0; j < f.x.size(); ++j)
            f.x[j].push_back(parse_double(r[j + 2]));
    }
    f.validate();
    return f;
}

inline SeriesFrame load_series_csv(const std::string& path) {
    return series_from_csv(read_csv(path));
}

} // namespace cpf
