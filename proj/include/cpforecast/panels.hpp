#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpforecast/csv.hpp"
#include "cpforecast/numeric.hpp"

namespace cpf {

/// Signed nonconformity scores s(t+h|t) = y(t+h) - yhat(t+h|t), indexed by
/// (forecast origin, horizon). Cells are absent until the realization
/// arrives; writes are append-only.
class ScorePanel {
public:
    ScorePanel() = default;
    ScorePanel(std::int64_t first_origin, std::int64_t last_origin, int H)
        : first_(first_origin), last_(last_origin), H_(H) {
        if (last_ < first_ || H_ < 1)
            throw std::invalid_argument("bad score panel shape");
        cells_.assign(static_cast<std::size_t>(last_ - first_ + 1) *
                          static_cast<std::size_t>(H_),
                      kNaN);
    }

    std::int64_t first_origin() const { return first_; }
    std::int64_t last_origin() const { return last_; }
    int horizons() const { return H_; }

    bool in_range(std::int64_t origin, int h) const {
        return origin >= first_ && origin <= last_ && h >= 1 && h <= H_;
    }
    bool has(std::int64_t origin, int h) const {
        return in_range(origin, h) && !std::isnan(cells_[idx(origin, h)]);
    }
    double at(std::int64_t origin, int h) const {
        if (!has(origin, h)) throw std::out_of_range("absent score cell");
        return cells_[idx(origin, h)];
    }

    void set(std::int64_t origin, int h, double score) {
        if (!in_range(origin, h)) throw std::out_of_range("score cell out of range");
        double& cell = cells_[idx(origin, h)];
        if (!std::isnan(cell))
            throw std::logic_error("score cell already written (panels are append-only)");
        if (std::isnan(score)) throw std::invalid_argument("NaN score");
        cell = score;
    }

    bool operator==(const ScorePanel& o) const {
        if (first_ != o.first_ || last_ != o.last_ || H_ != o.H_) return false;
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            bool a = std::isnan(cells_[i]), b = std::isnan(o.cells_[i]);
            if (a != b) return false;
            if (!a && cells_[i] != o.cells_[i]) return false;
        }
        return true;
    }

private:
    std::size_t idx(std::int64_t origin, int h) const {
        return static_cast<std::size_t>(origin - first_) * static_cast<std::size_t>(H_) +
               static_cast<std::size_t>(h - 1);
    }
    std::int64_t first_ = 0, last_ = 0;
    int H_ = 1;
    std::vector<double> cells_;
};

struct IntervalCell {
    double lower = -kInf;
    double upper = kInf;
    std::optional<int> err; // set once the realization is observed
};

/// Lower/upper interval bounds and miscoverage indicators per
/// (origin, horizon). Bounds are extended reals.
class IntervalPanel {
public:
    IntervalPanel() = default;
    IntervalPanel(std::int64_t first_origin, std::int64_t last_origin, int H)
        : first_(first_origin), last_(last_origin), H_(H) {
        if (last_ < first_ || H_ < 1)
            throw std::invalid_argument("bad interval panel shape");
        cells_.resize(static_cast<std::size_t>(last_ - first_ + 1) *
                      static_cast<std::size_t>(H_));
    }

    std::int64_t first_origin() const { return first_; }
    std::int64_t last_origin() const { return last_; }
    int horizons() const { return H_; }

    bool in_range(std::int64_t origin, int h) const {
        return origin >= first_ && origin <= last_ && h >= 1 && h <= H_;
    }
    bool has(std::int64_t origin, int h) const {
        return in_range(origin, h) && cells_[idx(origin, h)].has_value();
    }
    const IntervalCell& at(std::int64_t origin, int h) const {
        if (!has(origin, h)) throw std::out_of_range("absent interval cell");
        return *cells_[idx(origin, h)];
    }

    void set_bounds(std::int64_t origin, int h, double lower, double upper) {
        if (!in_range(origin, h))
            throw std::out_of_range("interval cell out of range");
        auto& cell = cells_[idx(origin, h)];
        if (cell.has_value())
            throw std::logic_error("interval cell already written");
        if (std::isnan(lower) || std::isnan(upper))
            throw std::invalid_argument("NaN interval bound");
        if (std::isfinite(lower) && std::isfinite(upper) && lower > upper)
            throw std::invalid_argument("lower > upper");
        cell = IntervalCell{lower, upper, std::nullopt};
    }

    void record_err(std::int64_t origin, int h, double realized_y) {
        auto& cell = cells_[idx(origin, h)];
        if (!cell) throw std::out_of_range("absent interval cell");
        if (cell->err) throw std::logic_error("err already recorded");
        cell->err = miscovered(*cell, realized_y) ? 1 : 0;
    }

    /// Deserialization path: store an err value as-is.
    void force_err(std::int64_t origin, int h, int err) {
        auto& cell = cells_[idx(origin, h)];
        if (!cell) throw std::out_of_range("absent interval cell");
        if (err != 0 && err != 1) throw std::invalid_argument("err must be 0/1");
        cell->err = err;
    }

    static bool miscovered(const IntervalCell& c, double y) {
        return !(y >= c.lower && y <= c.upper);
    }

    bool operator==(const IntervalPanel& o) const {
        if (first_ != o.first_ || last_ != o.last_ || H_ != o.H_) return false;
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            const auto& a = cells_[i];
            const auto& b = o.cells_[i];
            if (a.has_value() != b.has_value()) return false;
            if (a && (a->lower != b->lower || a->upper != b->upper || a->err != b->err))
                return false;
        }
        return true;
    }

private:
    std::size_t idx(std::int64_t origin, int h) const {
        return static_cast<std::size_t>(origin - first_) * static_cast<std::size_t>(H_) +
               static_cast<std::size_t>(h - 1);
    }
    std::int64_t first_ = 0, last_ = 0;
    int H_ = 1;
    std::vector<std::optional<IntervalCell>> cells_;
};

// ---- long-format CSV (origin,horizon,field,value) ----

inline std::string to_csv(const ScorePanel& p) {
    std::ostringstream out;
    out << "origin,horizon,field,value\n";
    out << "0,0,shape_first_origin," << p.first_origin() << '\n';
    out << "0,0,shape_last_origin," << p.last_origin() << '\n';
    out << "0,0,shape_h," << p.horizons() << '\n';
    for (std::int64_t t = p.first_origin(); t <= p.last_origin(); ++t)
        for (int h = 1; h <= p.horizons(); ++h)
            if (p.has(t, h))
                out << t << ',' << h << ",score," << format_double(p.at(t, h)) << '\n';
    return out.str();
}

inline std::string to_csv(const IntervalPanel& p) {
    std::ostringstream out;
    out << "origin,horizon,field,value\n";
    out << "0,0,shape_first_origin," << p.first_origin() << '\n';
    out << "0,0,shape_last_origin," << p.last_origin() << '\n';
    out << "0,0,shape_h," << p.horizons() << '\n';
    for (std::int64_t t = p.first_origin(); t <= p.last_origin(); ++t)
        for (int h = 1; h <= p.horizons(); ++h)
            if (p.has(t, h)) {
                const auto& c = p.at(t, h);
                out << t << ',' << h << ",lower," << format_double(c.lower) << '\n';
                out << t << ',' << h << ",upper," << format_double(c.upper) << '\n';
                if (c.err)
                    out << t << ',' << h << ",err," << *c.err << '\n';
            }
    return out.str();
}

namespace detail {

struct PanelShape {
    std::int64_t first = 0, last = 0;
    int H = 1;
};

inline PanelShape read_shape(const CsvTable& t, const std::string& what) {
    if (t.header != std::vector<std::string>{"origin", "horizon", "field", "value"})
        throw std::runtime_error(what + ": bad panel header");
    PanelShape s;
    bool f = false, l = false, h = false;
    for (const auto& r : t.rows) {
        if (r[2] == "shape_first_origin") { s.first = std::stoll(r[3]); f = true; }
        if (r[2] == "shape_last_origin") { s.last = std::stoll(r[3]); l = true; }
        if (r[2] == "shape_h") { s.H = std::stoi(r[3]); h = true; }
    }
    if (!f || !l || !h) throw std::runtime_error(what + ": missing shape rows");
    return s;
}

} // namespace detail

inline ScorePanel score_panel_from_csv(const CsvTable& t) {
    auto s = detail::read_shape(t, "score panel");
    ScorePanel p(s.first, s.last, s.H);
    for (const auto& r : t.rows) {
        if (r[2] != "score") continue;
        p.set(std::stoll(r[0]), std::stoi(r[1]), parse_double(r[3]));
    }
    return p;
}

inline IntervalPanel interval_panel_from_csv(const CsvTable& t) {
    auto s = detail::read_shape(t, "interval panel");
    IntervalPanel p(s.first, s.last, s.H);
    // bounds come in (lower, upper) row pairs; err rows may follow
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        if (r[2] != "lower") continue;
        if (i + 1 >= t.rows.size() || t.rows[i + 1][2] != "upper")
            throw std::runtime_error("interval panel: lower row without upper");
        p.set_bounds(std::stoll(r[0]), std::stoi(r[1]), parse_double(r[3]),
                     parse_double(t.rows[i + 1][3]));
    }
    for (const auto& r : t.rows) {
        if (r[2] != "err") continue;
        p.force_err(std::stoll(r[0]), std::stoi(r[1]), std::stoi(r[3]));
    }
    return p;
}

} // namespace cpf
