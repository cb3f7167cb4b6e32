#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "cmech/errors.hpp"
#include "cmech/expression.hpp"

namespace cmech {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

inline const double kSqrt2 = std::sqrt(2.0);

/// Point (z, p) of the complex phase space C^2.
struct ComplexPhasePoint {
    Complex z;
    Complex p;
};

/// Real image w = (x, p, y, q) of a complex phase point, x + iy = z and p + iq = p.
struct RealPhasePoint {
    double x = 0.0, p = 0.0, y = 0.0, q = 0.0;

    Vec4 vec() const { return {x, p, y, q}; }
    static RealPhasePoint from(const Vec4& w) { return {w[0], w[1], w[2], w[3]}; }
};

/// Canonical coordinates (x1, p1, x2, p2) for the standard structure.
struct DarbouxPoint {
    double x1 = 0.0, p1 = 0.0, x2 = 0.0, p2 = 0.0;

    Vec4 vec() const { return {x1, p1, x2, p2}; }
    static DarbouxPoint from(const Vec4& xi) { return {xi[0], xi[1], xi[2], xi[3]}; }
};

inline RealPhasePoint to_real(const ComplexPhasePoint& pt) {
    return {pt.z.real(), pt.p.real(), pt.z.imag(), pt.p.imag()};
}
inline ComplexPhasePoint to_complex(const RealPhasePoint& w) { return {{w.x, w.y}, {w.p, w.q}}; }

/// (x1, p1, x2, p2) = sqrt(2) (x, p, q, y): Darboux coordinates of the a = b = alpha = 0 structure.
inline DarbouxPoint to_darboux(const RealPhasePoint& w) {
    return {kSqrt2 * w.x, kSqrt2 * w.p, kSqrt2 * w.q, kSqrt2 * w.y};
}
inline DarbouxPoint to_darboux(const ComplexPhasePoint& pt) { return to_darboux(to_real(pt)); }

inline RealPhasePoint from_darboux(const DarbouxPoint& xi) {
    return {xi.x1 / kSqrt2, xi.p1 / kSqrt2, xi.p2 / kSqrt2, xi.x2 / kSqrt2};
}
inline ComplexPhasePoint complex_from_darboux(const DarbouxPoint& xi) {
    return to_complex(from_darboux(xi));
}

/// Position z = (x1 + i p2)/sqrt(2) encoded in a Darboux point.
inline Complex darboux_position(const DarbouxPoint& xi) { return {xi.x1 / kSqrt2, xi.p2 / kSqrt2}; }

/// A potential together with a mass. The derivative is built once on construction.
class System {
public:
    explicit System(Expr potential, double mass = 0.5)
        : potential_(std::move(potential)), dpotential_(derivative(potential_)), mass_(mass) {
        if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError("mass must be positive and finite");
    }

    const Expr& potential() const { return potential_; }
    const Expr& dpotential() const { return dpotential_; }
    double mass() const { return mass_; }

    Complex v(Complex z) const { return evaluate(potential_, z); }
    Complex dv(Complex z) const { return evaluate(dpotential_, z); }

private:
    Expr potential_;
    Expr dpotential_;
    double mass_;
};

/// H = p^2/(2m) + v(z). Throws OverflowError on non-finite results.
inline Complex eval_H(const System& sys, const ComplexPhasePoint& pt) {
    const Complex h = pt.p * pt.p / (2.0 * sys.mass()) + eval_v(sys.potential(), pt.z);
    if (!is_finite(h)) throw OverflowError("Hamiltonian overflowed");
    return h;
}

struct HamiltonianSplit {
    double real = 0.0;  ///< H_r
    double imag = 0.0;  ///< H_i
};

/// H_r = (p^2 - q^2)/(2m) + v_r(x, y),  H_i = pq/m + v_i(x, y).
inline HamiltonianSplit eval_Hr_Hi(const System& sys, const RealPhasePoint& w) {
    const Complex v = sys.v({w.x, w.y});
    const double m = sys.mass();
    return {(w.p * w.p - w.q * w.q) / (2.0 * m) + v.real(), w.p * w.q / m + v.imag()};
}

/// Equivalent real Hamiltonian h = (p1^2 - x2^2)/(2m) + 2 v_r(x1/sqrt2, p2/sqrt2) = 2 H_r.
inline double eval_h(const System& sys, const DarbouxPoint& xi) {
    const Complex v = sys.v(darboux_position(xi));
    return (xi.p1 * xi.p1 - xi.x2 * xi.x2) / (2.0 * sys.mass()) + 2.0 * v.real();
}

/// H_i = x2 p1/(2m) + v_i(x1/sqrt2, p2/sqrt2) in Darboux coordinates.
inline double eval_Hi_darboux(const System& sys, const DarbouxPoint& xi) {
    const Complex v = sys.v(darboux_position(xi));
    return xi.x2 * xi.p1 / (2.0 * sys.mass()) + v.imag();
}

/// Gradient of h with respect to (x1, p1, x2, p2).
inline Vec4 grad_h(const System& sys, const DarbouxPoint& xi) {
    const Complex d = sys.dv(darboux_position(xi));
    const double m = sys.mass();
    // d/dx1 v_r(x1/s, p2/s) = Re v'/s, d/dp2 v_r(...) = -Im v'/s
    return {kSqrt2 * d.real(), xi.p1 / m, -xi.x2 / m, -kSqrt2 * d.imag()};
}

/// Gradient of H_i with respect to (x1, p1, x2, p2).
inline Vec4 grad_Hi_darboux(const System& sys, const DarbouxPoint& xi) {
    const Complex d = sys.dv(darboux_position(xi));
    const double m = sys.mass();
    return {d.imag() / kSqrt2, xi.x2 / (2.0 * m), xi.p1 / (2.0 * m), d.real() / kSqrt2};
}

}  // namespace cmech
