#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "macrospin/vec.hpp"

namespace macrospin {

/// Piecewise-linear scalar waveform. Breakpoints must be sorted by time;
/// the value is clamped to the first/last breakpoint outside the range and
/// duplicate times encode an instantaneous step (the later value wins at
/// exactly that time).
struct Waveform {
    struct Point {
        double t = 0.0;
        double v = 0.0;
    };
    std::vector<Point> points;

    Waveform() = default;
    explicit Waveform(std::vector<Point> pts) : points(std::move(pts)) { check_sorted(); }

    static Waveform constant(double v) { return Waveform({{0.0, v}}); }

    bool empty() const { return points.empty(); }

    double value(double t) const {
        if (points.empty()) return 0.0;
        if (t <= points.front().t) {
            // A step at the very first time still takes the pre-step value.
            return points.front().v;
        }
        if (t >= points.back().t) return points.back().v;
        auto it = std::upper_bound(points.begin(), points.end(), t,
                                   [](double x, const Point& p) { return x < p.t; });
        const Point& hi = *it;
        const Point& lo = *(it - 1);
        const double dt = hi.t - lo.t;
        if (dt <= 0.0) return hi.v;
        return lo.v + (hi.v - lo.v) * (t - lo.t) / dt;
    }

    void check_sorted() const {
        for (std::size_t i = 1; i < points.size(); ++i)
            if (points[i].t < points[i - 1].t)
                throw std::invalid_argument("waveform breakpoints must be sorted by time");
    }
};

/// Piecewise-constant vector waveform (external field). Each breakpoint's
/// value holds from its time until the next breakpoint; the first value also
/// applies before the first time. Empty means zero field.
struct FieldWaveform {
    struct Point {
        double t = 0.0;
        Vec3 v{};
    };
    std::vector<Point> points;

    FieldWaveform() = default;
    explicit FieldWaveform(std::vector<Point> pts) : points(std::move(pts)) { check_sorted(); }

    bool empty() const { return points.empty(); }

    Vec3 value(double t) const {
        if (points.empty()) return {0.0, 0.0, 0.0};
        auto it = std::upper_bound(points.begin(), points.end(), t,
                                   [](double x, const Point& p) { return x < p.t; });
        if (it == points.begin()) return points.front().v;
        return (it - 1)->v;
    }

    void check_sorted() const {
        for (std::size_t i = 1; i < points.size(); ++i)
            if (points[i].t < points[i - 1].t)
                throw std::invalid_argument("field waveform breakpoints must be sorted by time");
    }
};

/// One segment of a pulse train: wait `delay` at the base level, ramp over
/// `rise` to `amplitude`, hold for `width`, ramp back over `fall`.
struct PulseSegment {
    double delay = 0.0;
    double rise = 0.0;
    double width = 0.0;
    double fall = 0.0;
    double amplitude = 0.0;
};

/// Compile a pulse train into waveform breakpoints. Zero rise/fall produces
/// an instantaneous step (duplicate-time breakpoints).
inline Waveform pulse_train(const std::vector<PulseSegment>& segments, double base = 0.0) {
    std::vector<Waveform::Point> pts;
    double t = 0.0;
    pts.push_back({t, base});
    for (const auto& s : segments) {
        if (s.delay < 0 || s.rise < 0 || s.width < 0 || s.fall < 0)
            throw std::invalid_argument("pulse segment durations must be >= 0");
        t += s.delay;
        pts.push_back({t, base});
        t += s.rise;
        pts.push_back({t, s.amplitude});
        t += s.width;
        pts.push_back({t, s.amplitude});
        t += s.fall;
        pts.push_back({t, base});
    }
    return Waveform(std::move(pts));
}

/// Everything the solver needs about external forcing.
struct Drive {
    Waveform current;     ///< charge current I(t) [A], positive writes AP
    FieldWaveform h_ext;  ///< applied field H_ext(t) [A/m]
};

} // namespace macrospin
