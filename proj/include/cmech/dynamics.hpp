#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "cmech/errors.hpp"
#include "cmech/hamiltonian.hpp"
#include "cmech/ode.hpp"

namespace cmech {

enum class Method { FixedRk4, AdaptiveRk45, SplitStep };
enum class Frame { Complex, Darboux };
using ode::Termination;

inline std::string to_string(Method m) {
    switch (m) {
        case Method::FixedRk4: return "rk4";
        case Method::AdaptiveRk45: return "rk45";
        case Method::SplitStep: return "split";
    }
    return "?";
}

inline std::string to_string(Termination t) {
    switch (t) {
        case Termination::TEnd: return "t_end";
        case Termination::Escape: return "escape";
        case Termination::StepFailure: return "step_failure";
    }
    return "?";
}

inline std::string to_string(Frame f) { return f == Frame::Complex ? "complex" : "darboux"; }

struct IntegratorConfig {
    Method method = Method::AdaptiveRk45;
    double dt = 1e-3;       ///< step of rk4 / split, sampling interval
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double t_end = 1.0;
    double escape_radius = 1e3;

    void validate() const {
        if (!std::isfinite(t_end) || t_end < 0.0) throw ConfigError("t_end must be finite and non-negative");
        if (!(escape_radius > 0.0)) throw ConfigError("escape radius must be positive");
        if (method == Method::AdaptiveRk45) {
            auto ok = [](double tol) { return tol > 0.0 && tol <= 1e-2; };
            if (!ok(rel_tol) || !ok(abs_tol)) throw ConfigError("tolerances must lie in (0, 1e-2]");
        } else {
            if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
            if (t_end > 0.0 && dt > t_end) throw ConfigError("dt must not exceed t_end");
        }
    }
};

struct TrajectorySample {
    double t = 0.0;
    Vec4 state = Vec4::Zero();  ///< (x, p, y, q) or (x1, p1, x2, p2), depending on the frame
    Vec4 rate = Vec4::Zero();   ///< time derivative of state
    double Hr = 0.0;
    double Hi = 0.0;
};

/// Integrated trajectory with the two integrals of motion monitored per sample.
struct Trajectory {
    Frame frame = Frame::Complex;
    std::vector<TrajectorySample> samples;
    double drift_Hr = 0.0;  ///< max |H_r(t) - H_r(0)|
    double drift_Hi = 0.0;  ///< max |H_i(t) - H_i(0)|
    Termination terminated_by = Termination::TEnd;
    std::size_t n_steps = 0;

    double t_begin() const { return samples.front().t; }
    double t_final() const { return samples.back().t; }

    /// State at t by cubic Hermite interpolation between samples.
    Vec4 state_at(double t) const {
        auto hi = std::upper_bound(samples.begin(), samples.end(), t,
                                   [](double value, const TrajectorySample& s) { return value < s.t; });
        if (hi == samples.begin()) return samples.front().state;
        if (hi == samples.end()) return samples.back().state;
        const TrajectorySample& a = *(hi - 1);
        if (a.t == t) return a.state;
        const TrajectorySample& b = *hi;
        return ode::hermite({a.t, a.state, a.rate}, {b.t, b.state, b.rate}, t);
    }

    /// State at t expressed in Darboux coordinates.
    DarbouxPoint darboux_at(double t) const {
        const Vec4 s = state_at(t);
        return frame == Frame::Darboux ? DarbouxPoint::from(s) : to_darboux(RealPhasePoint::from(s));
    }

    /// State at t as a real phase point (x, p, y, q).
    RealPhasePoint real_at(double t) const {
        const Vec4 s = state_at(t);
        return frame == Frame::Complex ? RealPhasePoint::from(s) : from_darboux(DarbouxPoint::from(s));
    }
};

/// Vector field of the complex Hamilton equations on w = (x, p, y, q).
inline Vec4 complex_rhs(const System& sys, const Vec4& w) {
    const Complex d = sys.dv({w[0], w[2]});
    const double m = sys.mass();
    return {w[1] / m, -d.real(), w[3] / m, -d.imag()};
}

/// Standard Hamilton equations of h on (x1, p1, x2, p2).
inline Vec4 darboux_rhs(const System& sys, const Vec4& xi) {
    const Vec4 g = grad_h(sys, DarbouxPoint::from(xi));
    return {g[1], -g[0], g[3], -g[2]};
}

/// Standard Hamilton equations generated by H_i, with epsilon as the flow parameter.
inline Vec4 hi_rhs(const System& sys, const Vec4& xi) {
    const Vec4 g = grad_Hi_darboux(sys, DarbouxPoint::from(xi));
    return {g[1], -g[0], g[3], -g[2]};
}

/**
 * One Strang step of h = F(p1, x2) + G(x1, p2) with F = (p1^2 - x2^2)/(2m) and
 * G = 2 v_r(x1/sqrt2, p2/sqrt2): half kick by G, full drift by F, half kick by G.
 * Each partial flow is solved exactly because it leaves its own arguments fixed.
 */
inline DarbouxPoint split_step(const System& sys, const DarbouxPoint& xi, double dt) {
    if (!(dt > 0.0)) throw ConfigError("split step needs dt > 0");
    DarbouxPoint s = xi;
    auto kick = [&](double tau) {
        const Complex d = sys.dv(darboux_position(s));
        s.p1 -= tau * kSqrt2 * d.real();
        s.x2 -= tau * kSqrt2 * d.imag();
    };
    kick(0.5 * dt);
    s.x1 += dt * s.p1 / sys.mass();
    s.p2 += dt * s.x2 / sys.mass();
    kick(0.5 * dt);
    return s;
}

namespace detail {

inline Trajectory finish(Frame frame, const ode::Result& res,
                         const std::function<HamiltonianSplit(const Vec4&)>& invariants) {
    Trajectory tr;
    tr.frame = frame;
    tr.terminated_by = res.terminated_by;
    tr.n_steps = res.n_steps;
    tr.samples.reserve(res.samples.size());
    for (const auto& s : res.samples) {
        const HamiltonianSplit h = invariants(s.y);
        tr.samples.push_back({s.t, s.y, s.dy, h.real, h.imag});
    }
    const double hr0 = tr.samples.front().Hr, hi0 = tr.samples.front().Hi;
    for (const auto& s : tr.samples) {
        tr.drift_Hr = std::max(tr.drift_Hr, std::abs(s.Hr - hr0));
        tr.drift_Hi = std::max(tr.drift_Hi, std::abs(s.Hi - hi0));
    }
    return tr;
}

inline bool escaped_complex(const Vec4& w, double radius) {
    return std::hypot(w[0], w[2]) > radius || std::hypot(w[1], w[3]) > radius;
}

inline bool escaped_darboux(const Vec4& xi, double radius) {
    return std::hypot(xi[0], xi[3]) / kSqrt2 > radius || std::hypot(xi[1], xi[2]) / kSqrt2 > radius;
}

inline HamiltonianSplit darboux_invariants(const System& sys, const Vec4& xi) {
    const DarbouxPoint p = DarbouxPoint::from(xi);
    return {0.5 * eval_h(sys, p), eval_Hi_darboux(sys, p)};
}

}  // namespace detail

inline Trajectory integrate_darboux(const System& sys, const DarbouxPoint& xi0, const IntegratorConfig& cfg);

/// Integrates (x, p, y, q) under Hamilton's equations of H = p^2/(2m) + v(z).
inline Trajectory integrate_complex(const System& sys, Complex z0, Complex p0, const IntegratorConfig& cfg) {
    cfg.validate();
    const RealPhasePoint w0 = to_real({z0, p0});
    if (!w0.vec().allFinite()) throw ConfigError("initial data must be finite");
    auto invariants = [&](const Vec4& w) { return eval_Hr_Hi(sys, RealPhasePoint::from(w)); };

    if (cfg.method == Method::SplitStep) {
        // The splitting lives in the Darboux frame; the two frames are linearly equivalent.
        Trajectory d = integrate_darboux(sys, to_darboux(w0), cfg);
        ode::Result res;
        res.terminated_by = d.terminated_by;
        res.n_steps = d.n_steps;
        for (const auto& s : d.samples) {
            const Vec4 w = from_darboux(DarbouxPoint::from(s.state)).vec();
            res.samples.push_back({s.t, w, complex_rhs(sys, w)});
        }
        return detail::finish(Frame::Complex, res, invariants);
    }

    auto f = [&](const Vec4& w) { return complex_rhs(sys, w); };
    auto escaped = [&](const Vec4& w) { return detail::escaped_complex(w, cfg.escape_radius); };
    const ode::Result res = cfg.method == Method::FixedRk4
                                ? ode::integrate_rk4(f, w0.vec(), cfg.t_end, cfg.dt, escaped)
                                : ode::integrate_dopri5(f, w0.vec(), cfg.t_end, {cfg.rel_tol, cfg.abs_tol}, escaped);
    return detail::finish(Frame::Complex, res, invariants);
}

/// Integrates (x1, p1, x2, p2) under the standard Hamilton equations of h.
inline Trajectory integrate_darboux(const System& sys, const DarbouxPoint& xi0, const IntegratorConfig& cfg) {
    cfg.validate();
    if (!xi0.vec().allFinite()) throw ConfigError("initial data must be finite");
    auto f = [&](const Vec4& xi) { return darboux_rhs(sys, xi); };
    auto escaped = [&](const Vec4& xi) { return detail::escaped_darboux(xi, cfg.escape_radius); };
    auto invariants = [&](const Vec4& xi) { return detail::darboux_invariants(sys, xi); };
    ode::Result res;
    switch (cfg.method) {
        case Method::FixedRk4: res = ode::integrate_rk4(f, xi0.vec(), cfg.t_end, cfg.dt, escaped); break;
        case Method::AdaptiveRk45:
            res = ode::integrate_dopri5(f, xi0.vec(), cfg.t_end, {cfg.rel_tol, cfg.abs_tol}, escaped);
            break;
        case Method::SplitStep:
            res = ode::integrate_fixed(
                [&](const Vec4& xi, double h) { return split_step(sys, DarbouxPoint::from(xi), h).vec(); }, f,
                xi0.vec(), cfg.t_end, cfg.dt, escaped);
            break;
    }
    return detail::finish(Frame::Darboux, res, invariants);
}

/// Sampling of the symmetry flow generated by H_i.
struct FlowConfig {
    double epsilon_end = 1.0;  ///< may be negative to flow backwards
    double d_epsilon = 0.01;   ///< sampling interval
    double tolerance = 1e-12;  ///< relative and absolute tolerance of the integrator
};

/**
 * Flows xi0 along d xi/d eps = {xi, H_i}. Samples are taken every d_epsilon
 * (the last interval may be shorter); `t` holds epsilon, so it decreases when
 * epsilon_end < 0. Each interval is integrated adaptively on its own, which
 * keeps the samples free of interpolation error.
 */
inline Trajectory hi_flow(const System& sys, const DarbouxPoint& xi0, const FlowConfig& flow,
                          double escape_radius = 1e3) {
    if (!std::isfinite(flow.epsilon_end)) throw ConfigError("epsilon_end must be finite");
    if (!(flow.d_epsilon > 0.0)) throw ConfigError("d_epsilon must be positive");
    const double direction = flow.epsilon_end < 0.0 ? -1.0 : 1.0;
    const double span = std::abs(flow.epsilon_end);
    auto f = [&](const Vec4& xi) { return Vec4(direction * hi_rhs(sys, xi)); };
    auto escaped = [&](const Vec4& xi) { return detail::escaped_darboux(xi, escape_radius); };

    ode::Result res;
    res.samples.push_back({0.0, xi0.vec(), f(xi0.vec())});
    double h_hint = 0.0;
    const auto n = static_cast<std::size_t>(std::ceil(span / flow.d_epsilon * (1.0 - 1e-12)));
    for (std::size_t k = 0; k < n; ++k) {
        const double start = static_cast<double>(k) * flow.d_epsilon;
        const double stop = std::min(span, static_cast<double>(k + 1) * flow.d_epsilon);
        const ode::Result seg = ode::integrate_dopri5(f, res.samples.back().y, stop - start,
                                                      {flow.tolerance, flow.tolerance}, escaped, h_hint);
        res.n_steps += seg.n_steps;
        h_hint = seg.last_step;
        const ode::Sample& end = seg.samples.back();
        res.samples.push_back({stop, end.y, end.dy});
        if (seg.terminated_by != Termination::TEnd) {
            res.samples.back().t = start + end.t;
            res.terminated_by = seg.terminated_by;
            break;
        }
    }
    for (auto& s : res.samples) {
        s.t *= direction;
        s.dy *= direction;
    }
    return detail::finish(Frame::Darboux, res,
                          [&](const Vec4& xi) { return detail::darboux_invariants(sys, xi); });
}

/// Result of solving H_i = 0 for x2.
struct HiZeroSolution {
    bool any_value = false;  ///< p1 = 0 and v_i = 0: every x2 satisfies the constraint
    double x2 = 0.0;
};

/// Solves x2 p1/(2m) + v_i(x1/sqrt2, p2/sqrt2) = 0 for x2.
inline HiZeroSolution solve_hi_zero(const System& sys, double x1, double p1, double p2) {
    const double vi = eval_v(sys.potential(), {x1 / kSqrt2, p2 / kSqrt2}).imag();
    if (p1 == 0.0) {
        if (std::abs(vi) <= 1e-12) return {true, 0.0};
        throw DivisionByZero("H_i = 0 has no solution for x2 when p1 = 0 and v_i != 0");
    }
    return {false, -2.0 * sys.mass() * vi / p1};
}

struct EquivalenceReport {
    double max_deviation = 0.0;  ///< max-abs difference in Darboux coordinates
    double t_at_max = 0.0;
    std::size_t n_points = 0;
    double tolerance = 1e-6;
    bool passed = false;
};

/**
 * Compares two trajectories of the same system on the union of their sample
 * times, after mapping both into Darboux coordinates. Both must cover the same
 * time range.
 */
inline EquivalenceReport equivalence_report(const Trajectory& a, const Trajectory& b, double tolerance = 1e-6) {
    if (a.samples.empty() || b.samples.empty()) throw GridMismatch("empty trajectory");
    const double span = std::max({1.0, std::abs(a.t_final()), std::abs(b.t_final())});
    if (std::abs(a.t_begin() - b.t_begin()) > 1e-12 * span || std::abs(a.t_final() - b.t_final()) > 1e-12 * span)
        throw GridMismatch("trajectories cover different time ranges: [" + std::to_string(a.t_begin()) + ", " +
                           std::to_string(a.t_final()) + "] vs [" + std::to_string(b.t_begin()) + ", " +
                           std::to_string(b.t_final()) + "]");
    std::vector<double> grid;
    grid.reserve(a.samples.size() + b.samples.size());
    for (const auto& s : a.samples) grid.push_back(s.t);
    for (const auto& s : b.samples) grid.push_back(s.t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    EquivalenceReport rep;
    rep.tolerance = tolerance;
    rep.n_points = grid.size();
    for (double t : grid) {
        const double dev = (a.darboux_at(t).vec() - b.darboux_at(t).vec()).cwiseAbs().maxCoeff();
        if (!(dev <= rep.max_deviation)) {
            rep.max_deviation = dev;
            rep.t_at_max = t;
        }
    }
    rep.passed = rep.max_deviation <= tolerance;
    return rep;
}

}  // namespace cmech
