#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "cmech/errors.hpp"
#include "cmech/hamiltonian.hpp"

namespace cmech::ode {

/// A solution sample: time, state and the vector field at that state.
struct Sample {
    double t = 0.0;
    Vec4 y = Vec4::Zero();
    Vec4 dy = Vec4::Zero();
};

enum class Termination { TEnd, Escape, StepFailure };

struct Result {
    std::vector<Sample> samples;
    Termination terminated_by = Termination::TEnd;
    std::size_t n_steps = 0;
    std::size_t n_rejected = 0;
    double last_step = 0.0;  ///< proposed next step size (adaptive only)
};

/// Smallest step the adaptive controller may take before reporting a failure.
inline constexpr double kMinStep = 1e-14;

inline bool all_finite(const Vec4& v) { return v.allFinite(); }

/// Cubic Hermite interpolation between two samples.
inline Vec4 hermite(const Sample& a, const Sample& b, double t) {
    const double h = b.t - a.t;
    const double s = (t - a.t) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * a.y + (s3 - 2 * s2 + s) * h * a.dy + (-2 * s3 + 3 * s2) * b.y +
           (s3 - s2) * h * b.dy;
}

/// Dense output over samples ordered by increasing t. Exact at sample times.
inline Vec4 interpolate(const std::vector<Sample>& samples, double t) {
    if (samples.empty()) throw ConfigError("cannot interpolate an empty trajectory");
    if (samples.size() == 1 || t <= samples.front().t) return samples.front().y;
    if (t >= samples.back().t) return samples.back().y;
    auto hi = std::upper_bound(samples.begin(), samples.end(), t,
                               [](double value, const Sample& s) { return value < s.t; });
    const Sample& b = *hi;
    const Sample& a = *(hi - 1);
    if (t == a.t) return a.y;
    return hermite(a, b, t);
}

/// Fixed-step driver for an arbitrary one-step map `step(y, h)`. Samples are
/// recorded every dt; the last step is shortened to land on t_end.
template <class Step, class Rhs, class Escaped>
Result integrate_fixed(Step&& step, Rhs&& f, const Vec4& y0, double t_end, double dt, Escaped&& escaped) {
    Result res;
    res.samples.push_back({0.0, y0, f(y0)});
    if (t_end <= 0.0) return res;
    const auto n_full = static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12)));
    Vec4 y = y0;
    for (std::size_t k = 1;; ++k) {
        double t = static_cast<double>(k) * dt;
        double h = dt;
        if (k > n_full) {
            t = t_end;
            h = t_end - static_cast<double>(k - 1) * dt;
            if (h <= 0.0) break;
        }
        y = step(y, h);
        ++res.n_steps;
        const Vec4 dy = f(y);
        if (!all_finite(y) || !all_finite(dy)) {
            res.terminated_by = Termination::StepFailure;
            return res;
        }
        res.samples.push_back({std::min(t, t_end), y, dy});
        if (escaped(y)) {
            res.terminated_by = Termination::Escape;
            return res;
        }
        if (t >= t_end) break;
    }
    return res;
}

/// Classical fourth-order Runge-Kutta step.
template <class Rhs>
Vec4 rk4_step(Rhs&& f, const Vec4& y, double h) {
    const Vec4 k1 = f(y);
    const Vec4 k2 = f(Vec4(y + 0.5 * h * k1));
    const Vec4 k3 = f(Vec4(y + 0.5 * h * k2));
    const Vec4 k4 = f(Vec4(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <class Rhs, class Escaped>
Result integrate_rk4(Rhs&& f, const Vec4& y0, double t_end, double dt, Escaped&& escaped) {
    return integrate_fixed([&](const Vec4& y, double h) { return rk4_step(f, y, h); }, f, y0, t_end, dt,
                           escaped);
}

struct Tolerances {
    double rel = 1e-10;
    double abs = 1e-10;
};

/**
 * Dormand-Prince 5(4) with local extrapolation and an elementary step-size
 * controller. Error is measured in the max norm scaled by
 * abs + rel * max(|y|, |y_new|). A non-finite stage counts as a rejection.
 * Samples are recorded at accepted steps; t_end is hit exactly. The vector
 * field must be autonomous, so the stage nodes c_i are not needed.
 */
template <class Rhs, class Escaped>
Result integrate_dopri5(Rhs&& f, const Vec4& y0, double t_end, Tolerances tol, Escaped&& escaped,
                        double h_init = 0.0) {
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    Result res;
    Vec4 y = y0;
    Vec4 k1 = f(y);
    res.samples.push_back({0.0, y, k1});
    if (t_end <= 0.0) return res;
    if (!all_finite(k1)) {
        res.terminated_by = Termination::StepFailure;
        return res;
    }

    auto scale = [&](const Vec4& a, const Vec4& b) {
        return (tol.abs + tol.rel * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array()).matrix();
    };

    double h = h_init;
    if (!(h > 0.0)) {
        const Vec4 sc = scale(y, y);
        const double d0 = y.cwiseQuotient(sc).cwiseAbs().maxCoeff();
        const double d1 = k1.cwiseQuotient(sc).cwiseAbs().maxCoeff();
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, t_end);
        const Vec4 k = f(Vec4(y + h0 * k1));
        const double d2 = all_finite(k) ? (k - k1).cwiseQuotient(sc).cwiseAbs().maxCoeff() / h0
                                        : std::numeric_limits<double>::infinity();
        const double dmax = std::max(d1, d2);
        const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
        h = std::min(100.0 * h0, h1);
    }
    h = std::min(h, t_end);

    double t = 0.0;
    while (t < t_end) {
        if (h < kMinStep) {
            res.terminated_by = Termination::StepFailure;
            return res;
        }
        bool last = false;
        double step = h;
        if (t + step >= t_end * (1.0 - 1e-14)) {
            step = t_end - t;
            last = true;
        }
        const Vec4 k2 = f(Vec4(y + step * a21 * k1));
        const Vec4 k3 = f(Vec4(y + step * (a31 * k1 + a32 * k2)));
        const Vec4 k4 = f(Vec4(y + step * (a41 * k1 + a42 * k2 + a43 * k3)));
        const Vec4 k5 = f(Vec4(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        const Vec4 k6 = f(Vec4(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
        const Vec4 y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vec4 k7 = f(y_new);
        const Vec4 err_vec = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = err_vec.cwiseQuotient(scale(y, y_new)).cwiseAbs().maxCoeff();
        if (!all_finite(y_new) || !all_finite(k7) || !std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            t = last ? t_end : t + step;
            y = y_new;
            k1 = k7;
            ++res.n_steps;
            res.samples.push_back({t, y, k1});
            if (escaped(y)) {
                res.terminated_by = Termination::Escape;
                return res;
            }
            // a shortened final step says nothing about the next one
            if (!last || step == h)
                h *= err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            res.last_step = h;
        } else {
            ++res.n_rejected;
            h = step * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        }
    }
    return res;
}

}  // namespace cmech::ode
