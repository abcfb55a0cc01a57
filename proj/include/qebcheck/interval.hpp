// Closed real intervals with sign-directed endpoint arithmetic.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qeb {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double l, double h) : lo(l), hi(h) {
        if (!(l <= h))
            throw std::invalid_argument("interval endpoints out of order: [" +
                                        std::to_string(l) + ", " + std::to_string(h) + "]");
    }

    static Interval point(double v) { return Interval(v, v); }

    bool operator==(const Interval&) const = default;

    bool contains(double v) const { return lo <= v && v <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    double width() const { return hi - lo; }
};

inline Interval operator+(const Interval& a, const Interval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}

inline Interval operator-(const Interval& a, const Interval& b) {
    return {a.lo - b.hi, a.hi - b.lo};
}

inline Interval operator+(const Interval& a, double c) { return {a.lo + c, a.hi + c}; }

// c * [lo, hi] with endpoints reordered when c < 0.
inline Interval scale(double c, const Interval& a) {
    return c >= 0 ? Interval{c * a.lo, c * a.hi} : Interval{c * a.hi, c * a.lo};
}

inline Interval hull(const Interval& a, const Interval& b) {
    return {a.lo < b.lo ? a.lo : b.lo, a.hi > b.hi ? a.hi : b.hi};
}

inline std::optional<Interval> try_intersect(const Interval& a, const Interval& b) {
    double lo = a.lo > b.lo ? a.lo : b.lo;
    double hi = a.hi < b.hi ? a.hi : b.hi;
    if (lo > hi) return std::nullopt;
    return Interval{lo, hi};
}

// Minimum of sum(coef[k] * x[k]) + constant over the box, by per-coordinate
// corner selection.
inline double corner_min(std::span<const double> coef, std::span<const Interval> box,
                         double constant = 0.0) {
    double v = constant;
    for (size_t k = 0; k < coef.size(); ++k)
        v += coef[k] >= 0 ? coef[k] * box[k].lo : coef[k] * box[k].hi;
    return v;
}

inline double corner_max(std::span<const double> coef, std::span<const Interval> box,
                         double constant = 0.0) {
    double v = constant;
    for (size_t k = 0; k < coef.size(); ++k)
        v += coef[k] >= 0 ? coef[k] * box[k].hi : coef[k] * box[k].lo;
    return v;
}

// sum(coef[k] * x[k]) over interval vector x, as an interval.
inline Interval dot(std::span<const double> coef, std::span<const Interval> x) {
    return {corner_min(coef, x), corner_max(coef, x)};
}

// Integer interval; endpoints kept exact (no float drift) for the concrete
// fixed-point analysis.
struct IntInterval {
    int64_t lo = 0;
    int64_t hi = 0;

    IntInterval() = default;
    IntInterval(int64_t l, int64_t h) : lo(l), hi(h) {
        if (l > h) throw std::invalid_argument("integer interval endpoints out of order");
    }

    Interval to_real() const { return {double(lo), double(hi)}; }
    bool contains(int64_t v) const { return lo <= v && v <= hi; }
};

} // namespace qeb
