#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <utility>

#include <Eigen/Dense>

#include "cmech/errors.hpp"
#include "cmech/hamiltonian.hpp"

namespace cmech {

using Vec4c = Eigen::Vector4cd;
using Mat4c = Eigen::Matrix4cd;

inline constexpr double kDegeneracyTolerance = 1e-12;
inline constexpr double kConditioningWarning = 1e-6;

/// Parameters (a, b, alpha) of the compatible structures; invertible iff |alpha|^2 - ab != 1.
struct SymplecticParams {
    double a = 0.0;
    double b = 0.0;
    Complex alpha{0.0, 0.0};

    /// |alpha|^2 - ab - 1, proportional to the Pfaffian of the real structure matrix.
    double defect() const { return std::norm(alpha) - a * b - 1.0; }
    bool degenerate() const { return std::abs(defect()) <= kDegeneracyTolerance; }
};

/// Structure matrix over (z, p, z*, p*).
struct ComplexSymplecticMatrix {
    Mat4c m;
    bool degenerate = false;
};

inline ComplexSymplecticMatrix build_complex_J(const SymplecticParams& s) {
    const Complex I{0.0, 1.0};
    Mat4c m = Mat4c::Zero();
    m(0, 1) = 1.0;
    m(0, 2) = I * s.a;
    m(0, 3) = s.alpha;
    m(1, 2) = -std::conj(s.alpha);
    m(1, 3) = I * s.b;
    m(2, 3) = 1.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < i; ++j) m(i, j) = -m(j, i);
    return {m, s.degenerate()};
}

/// The real template over (x, p, y, q) without the invertibility check.
inline Mat4 real_structure_template(const SymplecticParams& s) {
    const double ar = s.alpha.real(), ai = s.alpha.imag();
    Mat4 J;
    J << 0.0, 1.0 + ar, -s.a, -ai,
        -(1.0 + ar), 0.0, -ai, -s.b,
        s.a, ai, 0.0, -1.0 + ar,
        ai, s.b, 1.0 - ar, 0.0;
    return 0.5 * J;
}

/// Real antisymmetric structure matrix J over w = (x, p, y, q).
class RealSymplecticMatrix {
public:
    explicit RealSymplecticMatrix(const Mat4& m) : m_(m) {
        if (!(m + m.transpose()).isZero(0.0)) throw ConfigError("structure matrix must be antisymmetric");
    }
    const Mat4& matrix() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

private:
    Mat4 m_;
};

inline RealSymplecticMatrix build_real_J(const SymplecticParams& s) {
    if (s.degenerate())
        throw DegenerateStructure("structure is singular: |alpha|^2 - a b = 1");
    return RealSymplecticMatrix(real_structure_template(s));
}

/// Standard structure on (x, p, y, q): x paired with p, y paired with q.
inline Mat4 standard_matrix() {
    Mat4 J = Mat4::Zero();
    J(0, 1) = 1.0;
    J(1, 0) = -1.0;
    J(2, 3) = 1.0;
    J(3, 2) = -1.0;
    return J;
}

/// Complex-valued scalar function on R^4 with an optional exact gradient.
struct Field {
    std::function<Complex(const Vec4&)> value;
    std::function<Vec4c(const Vec4&)> gradient;  ///< empty: central differences

    Vec4c gradient_at(const Vec4& w) const {
        if (gradient) return gradient(w);
        const double h = 1e-6 * std::max(1.0, w.norm());
        Vec4c g;
        for (int k = 0; k < 4; ++k) {
            Vec4 plus = w, minus = w;
            plus[k] += h;
            minus[k] -= h;
            g[k] = (value(plus) - value(minus)) / (plus[k] - minus[k]);
        }
        return g;
    }
};

namespace fields {

/// Coordinate w_k (0-based over x, p, y, q).
inline Field coordinate(int k) {
    Vec4c g = Vec4c::Zero();
    g[k] = 1.0;
    return {[k](const Vec4& w) { return Complex{w[k], 0.0}; }, [g](const Vec4&) { return g; }};
}

/// z = x + iy.
inline Field position() {
    const Vec4c g{1.0, 0.0, Complex{0.0, 1.0}, 0.0};
    return {[](const Vec4& w) { return Complex{w[0], w[2]}; }, [g](const Vec4&) { return g; }};
}

/// p = p + iq.
inline Field momentum() {
    const Vec4c g{0.0, 1.0, 0.0, Complex{0.0, 1.0}};
    return {[](const Vec4& w) { return Complex{w[1], w[3]}; }, [g](const Vec4&) { return g; }};
}

/// Complex Hamiltonian H. Being holomorphic, d_x H = v', d_y H = i v', d_p H = p/m, d_q H = i p/m.
inline Field hamiltonian(const System& sys) {
    return {[sys](const Vec4& w) {
                return Complex{w[1], w[3]} * Complex{w[1], w[3]} / (2.0 * sys.mass()) + sys.v({w[0], w[2]});
            },
            [sys](const Vec4& w) {
                const Complex I{0.0, 1.0};
                const Complex d = sys.dv({w[0], w[2]});
                const Complex pm = Complex{w[1], w[3]} / sys.mass();
                return Vec4c{d, pm, I * d, I * pm};
            }};
}

inline Field hamiltonian_real(const System& sys) {
    Field h = hamiltonian(sys);
    return {[h](const Vec4& w) { return Complex{h.value(w).real(), 0.0}; },
            [h](const Vec4& w) { return Vec4c(h.gradient(w).real().cast<Complex>()); }};
}

inline Field hamiltonian_imag(const System& sys) {
    Field h = hamiltonian(sys);
    return {[h](const Vec4& w) { return Complex{h.value(w).imag(), 0.0}; },
            [h](const Vec4& w) { return Vec4c(h.gradient(w).imag().cast<Complex>()); }};
}

/// Arbitrary field; its gradient is taken by central differences.
inline Field from_function(std::function<Complex(const Vec4&)> f) { return {std::move(f), {}}; }

}  // namespace fields

/// {{A, B}} = sum_ij J_ij d_i A d_j B at w.
inline Complex bracket(const Field& A, const Field& B, const Mat4& J, const RealPhasePoint& w) {
    const Vec4 x = w.vec();
    const Vec4c ga = A.gradient_at(x), gb = B.gradient_at(x);
    Complex sum{0.0, 0.0};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (J(i, j) != 0.0) sum += J(i, j) * ga[i] * gb[j];
    return sum;
}

inline Complex bracket(const Field& A, const Field& B, const RealSymplecticMatrix& J, const RealPhasePoint& w) {
    return bracket(A, B, J.matrix(), w);
}

/// Conventional Poisson bracket {A, B}.
inline Complex standard_bracket(const Field& A, const Field& B, const RealPhasePoint& w) {
    return bracket(A, B, standard_matrix(), w);
}

struct RPair {
    double plus = 0.0;
    double minus = 0.0;
};

/// Eigen-magnitudes r+ >= r- >= 0 of the real structure matrix (eigenvalues +-i r+-).
///
/// r+ uses the closed form directly. r- is recovered from r+ r- = |Pf J| = ||alpha|^2 - ab - 1|/4,
/// which avoids the cancellation of the closed form near the degenerate set.
inline RPair r_pm(const SymplecticParams& s) {
    const double a = s.a, b = s.b, al2 = std::norm(s.alpha);
    const double root = std::sqrt(((a + b) * (a + b) + 4.0) * ((a - b) * (a - b) + 4.0 * al2));
    const double plus = std::sqrt((a * a + b * b + 2.0 * (al2 + 1.0) + root) / 8.0);
    const double minus = std::abs(s.defect()) / (4.0 * plus);
    return {plus, std::min(minus, plus)};
}

/// Orthogonal S with S^T J S block-diagonal [[0, r+], [-r+, 0]] (+) [[0, r-], [-r-, 0]].
struct DarbouxFrame {
    Mat4 S;
    double r_plus = 0.0;
    double r_minus = 0.0;
    Mat4 J;  ///< the structure the frame was built for

    bool near_degenerate() const { return r_minus < kConditioningWarning; }
};

/// Block form the frame maps J to.
inline Mat4 block_normal_form(double r_plus, double r_minus) {
    Mat4 B = Mat4::Zero();
    B(0, 1) = r_plus;
    B(1, 0) = -r_plus;
    B(2, 3) = r_minus;
    B(3, 2) = -r_minus;
    return B;
}

namespace detail {

// Deterministic unit vector from the columns of a projector: the first column
// whose squared norm reaches half the largest one, flipped so its first
// non-negligible component is positive.
inline Vec4 pick_projector_column(const Mat4& P) {
    double best = 0.0;
    for (int j = 0; j < 4; ++j) best = std::max(best, P.col(j).squaredNorm());
    int chosen = 0;
    for (int j = 0; j < 4; ++j) {
        if (P.col(j).squaredNorm() >= 0.5 * best) {
            chosen = j;
            break;
        }
    }
    Vec4 u = P.col(chosen).normalized();
    for (int k = 0; k < 4; ++k) {
        if (std::abs(u[k]) > 1e-9) {
            if (u[k] < 0.0) u = -u;
            break;
        }
    }
    return u;
}

}  // namespace detail

/**
 * Builds the Darboux frame of the structure with parameters s.
 *
 * The fast pair comes from the projector onto ker(J^2 + r+^2 I): its chosen
 * column is u1+ and u2+ = -J u1+ / r+. The slow pair lives in the orthogonal
 * complement of the fast pair; there the chosen column seeds u2-, and u1- is
 * the unit vector completing the plane, oriented so that u1-^T J u2- = r-.
 * Seeding the slow pair through its second vector makes a = b = alpha = 0
 * produce S = [e_x, e_p, e_q, e_y], the frame whose coordinates are
 * sqrt(2) (x, p, q, y).
 *
 * When r+ and r- coincide the kernel is all of R^4 and the same rules apply.
 */
inline DarbouxFrame darboux_frame(const SymplecticParams& s) {
    const RPair r = r_pm(s);
    if (s.degenerate() || r.minus <= kDegeneracyTolerance)
        throw DegenerateStructure("no Darboux frame: |alpha|^2 - a b = 1 makes the structure singular");
    const Mat4 J = real_structure_template(s);
    const Mat4 J2 = J * J;
    const double gap = r.plus * r.plus - r.minus * r.minus;

    Mat4 fast_projector = Mat4::Identity();
    if (gap > 1e-10 * r.plus * r.plus)
        fast_projector = (J2 + r.minus * r.minus * Mat4::Identity()) / (-gap);

    const Vec4 u1p = detail::pick_projector_column(fast_projector);
    const Vec4 u2p = -(J * u1p) / r.plus;

    const Mat4 slow_projector = Mat4::Identity() - u1p * u1p.transpose() - u2p * u2p.transpose();
    const Vec4 u2m = detail::pick_projector_column(slow_projector);
    // J u2m / r- in exact arithmetic, but dividing by a small r- would amplify
    // rounding; the remaining direction of the slow plane is taken instead.
    Vec4 u1m = detail::pick_projector_column(slow_projector - u2m * u2m.transpose());
    if (u1m.dot(J * u2m) < 0.0) u1m = -u1m;

    DarbouxFrame frame;
    frame.S.col(0) = u1p;
    frame.S.col(1) = u2p;
    frame.S.col(2) = u1m;
    frame.S.col(3) = u2m;
    frame.r_plus = r.plus;
    frame.r_minus = r.minus;
    frame.J = J;
    return frame;
}

/// Linear map M = D^{-1/2} S^T taking w to Darboux coordinates, D = diag(r+, r+, r-, r-).
inline Mat4 darboux_linear_map(const DarbouxFrame& f) {
    Vec4 scale{1.0 / std::sqrt(f.r_plus), 1.0 / std::sqrt(f.r_plus), 1.0 / std::sqrt(f.r_minus),
               1.0 / std::sqrt(f.r_minus)};
    return scale.asDiagonal() * f.S.transpose();
}

inline DarbouxPoint darboux_map(const DarbouxFrame& f, const RealPhasePoint& w) {
    return DarbouxPoint::from(darboux_linear_map(f) * w.vec());
}

inline RealPhasePoint darboux_unmap(const DarbouxFrame& f, const DarbouxPoint& xi) {
    Vec4 scale{std::sqrt(f.r_plus), std::sqrt(f.r_plus), std::sqrt(f.r_minus), std::sqrt(f.r_minus)};
    return RealPhasePoint::from(f.S * scale.asDiagonal() * xi.vec());
}

/// Residuals of a frame, all in the max-abs norm.
struct FrameResiduals {
    double orthogonality = 0.0;  ///< ||S^T S - I||
    double normal_form = 0.0;    ///< ||S^T J S - J'||
    double canonicity = 0.0;     ///< ||M J M^T - J_st||, M = D^{-1/2} S^T
};

inline FrameResiduals frame_residuals(const DarbouxFrame& f) {
    const Mat4 M = darboux_linear_map(f);
    return {
        (f.S.transpose() * f.S - Mat4::Identity()).cwiseAbs().maxCoeff(),
        (f.S.transpose() * f.J * f.S - block_normal_form(f.r_plus, f.r_minus)).cwiseAbs().maxCoeff(),
        (M * f.J * M.transpose() - standard_matrix()).cwiseAbs().maxCoeff(),
    };
}

/// Outcome of checking z' = {{z, H}}, p' = {{p, H}} against Hamilton's equations.
struct CompatibilityReport {
    double position_residual = 0.0;  ///< |{{z, H}} - p/m|
    double momentum_residual = 0.0;  ///< |{{p, H}} + v'(z)|
    double tolerance = 1e-10;
    bool passed = false;
};

inline CompatibilityReport verify_compatibility(const Mat4& J, const System& sys, const RealPhasePoint& w,
                                                double tolerance = 1e-10) {
    const Field H = fields::hamiltonian(sys);
    const ComplexPhasePoint pt = to_complex(w);
    CompatibilityReport rep;
    rep.tolerance = tolerance;
    rep.position_residual = std::abs(bracket(fields::position(), H, J, w) - pt.p / sys.mass());
    rep.momentum_residual = std::abs(bracket(fields::momentum(), H, J, w) + sys.dv(pt.z));
    rep.passed = rep.position_residual <= tolerance && rep.momentum_residual <= tolerance;
    return rep;
}

inline CompatibilityReport verify_compatibility(const SymplecticParams& s, const System& sys,
                                                const RealPhasePoint& w, double tolerance = 1e-10) {
    return verify_compatibility(real_structure_template(s), sys, w, tolerance);
}

}  // namespace cmech
