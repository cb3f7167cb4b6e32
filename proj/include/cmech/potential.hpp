#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmech/errors.hpp"
#include "cmech/expression.hpp"
#include "cmech/parser.hpp"

namespace cmech {

/// Real and imaginary parts of v at z = x + iy.
struct RealPair {
    double vr = 0.0;
    double vi = 0.0;
};

inline RealPair split_real_imag(const Expr& v, double x, double y) {
    const Complex value = eval_v(v, {x, y});
    return {value.real(), value.imag()};
}

/// Cauchy-Riemann residuals (d_x v_r - d_y v_i, d_y v_r + d_x v_i), both by
/// central differences of split_real_imag with the given step.
inline std::pair<double, double> cauchy_riemann_residual(const Expr& v, double x, double y, double step) {
    if (!(step > 0.0)) throw ConfigError("finite-difference step must be positive");
    const RealPair xp = split_real_imag(v, x + step, y);
    const RealPair xm = split_real_imag(v, x - step, y);
    const RealPair yp = split_real_imag(v, x, y + step);
    const RealPair ym = split_real_imag(v, x, y - step);
    const double h2 = 2.0 * step;
    const double dx_vr = (xp.vr - xm.vr) / h2, dx_vi = (xp.vi - xm.vi) / h2;
    const double dy_vr = (yp.vr - ym.vr) / h2, dy_vi = (yp.vi - ym.vi) / h2;
    return {dx_vr - dy_vi, dy_vr + dx_vi};
}

struct NamedPotential {
    std::string name;
    std::string text;  ///< source form accepted by parse_potential
    Expr expr;
};

/// The six PT-symmetric reference potentials: iz, z^2, iz^3, -z^4, exp(iz), i sin z.
inline const std::vector<NamedPotential>& builtin_potentials() {
    static const std::vector<NamedPotential> table = [] {
        const Expr z = Expr::variable();
        const Expr i = Expr::constant({0.0, 1.0});
        std::vector<NamedPotential> out;
        out.push_back({"iz", "i*z", Expr::mul(i, z)});
        out.push_back({"z2", "z^2", Expr::pow(z, 2)});
        out.push_back({"iz3", "i*z^3", Expr::mul(i, Expr::pow(z, 3))});
        out.push_back({"-z4", "-z^4", Expr::neg(Expr::pow(z, 4))});
        out.push_back({"exp_iz", "exp(i*z)", Expr::apply(Function::Exp, Expr::mul(i, z))});
        out.push_back({"isin_z", "i*sin(z)", Expr::mul(i, Expr::apply(Function::Sin, z))});
        return out;
    }();
    return table;
}

inline const NamedPotential& builtin_potential(std::string_view name) {
    for (const auto& p : builtin_potentials())
        if (p.name == name) return p;
    throw NotFound("no builtin potential named '" + std::string(name) + "'");
}

/// Resolves a builtin name first, then falls back to parsing the text.
/// Builtin names are never valid expressions, so the two cannot collide.
inline Expr resolve_potential(std::string_view text) {
    for (const auto& p : builtin_potentials())
        if (p.name == text) return p.expr;
    return parse_potential(text);
}

}  // namespace cmech
