#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "cmech/errors.hpp"

namespace cmech {

using Complex = std::complex<double>;

/// Node kinds of a potential expression.
enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Func };

/// Entire elementary functions admitted in a potential.
enum class Function { Exp, Sin, Cos, Sinh, Cosh };

inline std::string_view function_name(Function f) {
    switch (f) {
        case Function::Exp: return "exp";
        case Function::Sin: return "sin";
        case Function::Cos: return "cos";
        case Function::Sinh: return "sinh";
        case Function::Cosh: return "cosh";
    }
    return "?";
}

/// z^n for n >= 0 by repeated squaring, so that small powers are exact where
/// the arithmetic allows it (std::pow goes through polar form).
inline Complex ipow(Complex base, int n) {
    Complex result{1.0, 0.0};
    while (n > 0) {
        if (n & 1) result *= base;
        n >>= 1;
        if (n > 0) base *= base;
    }
    return result;
}

inline Complex apply_function(Function f, Complex u) {
    switch (f) {
        case Function::Exp: return std::exp(u);
        case Function::Sin: return std::sin(u);
        case Function::Cos: return std::cos(u);
        case Function::Sinh: return std::sinh(u);
        case Function::Cosh: return std::cosh(u);
    }
    return {};
}

/**
 * Immutable abstract syntax tree of an entire function v(z).
 *
 * Nodes are shared between copies, so an Expr is cheap to copy and safe to
 * read from several threads. The factory functions fold purely numeric
 * subtrees into a single constant and do nothing else, which keeps structural
 * equality predictable: parse(to_string(e)) == e.
 */
class Expr {
public:
    struct Node {
        Op op;
        Complex value{};                      // Const
        int exponent = 0;                     // Pow
        Function function = Function::Exp;    // Func
        std::shared_ptr<const Node> lhs, rhs; // operands; unary ops use lhs
    };

    /// The constant 0.
    Expr() : Expr(constant(0.0)) {}

    static Expr constant(Complex c) { return Expr(make(Node{Op::Const, c, 0, Function::Exp, nullptr, nullptr})); }
    static Expr variable() { return Expr(make(Node{Op::Var, {}, 0, Function::Exp, nullptr, nullptr})); }

    static Expr neg(const Expr& a) {
        if (a.is_const()) return constant(-a.value());
        return Expr(make(Node{Op::Neg, {}, 0, Function::Exp, a.node_, nullptr}));
    }
    static Expr add(const Expr& a, const Expr& b) {
        if (a.is_const() && b.is_const()) return constant(a.value() + b.value());
        return binary(Op::Add, a, b);
    }
    static Expr sub(const Expr& a, const Expr& b) {
        if (a.is_const() && b.is_const()) return constant(a.value() - b.value());
        return binary(Op::Sub, a, b);
    }
    static Expr mul(const Expr& a, const Expr& b) {
        if (a.is_const() && b.is_const()) return constant(a.value() * b.value());
        return binary(Op::Mul, a, b);
    }
    /// Quotient by a constant. A non-constant denominator would introduce poles.
    static Expr div(const Expr& a, const Expr& b) {
        if (!b.is_const())
            throw UnsupportedFunction("division by a non-constant expression", 0);
        if (b.value() == Complex{0.0, 0.0}) throw DivisionByZero("division by zero in potential");
        if (a.is_const()) return constant(a.value() / b.value());
        return binary(Op::Div, a, b);
    }
    static Expr pow(const Expr& base, int n) {
        if (n < 0) throw UnsupportedFunction("negative integer power", 0);
        if (base.is_const()) return constant(ipow(base.value(), n));
        Node node{Op::Pow, {}, n, Function::Exp, base.node_, nullptr};
        return Expr(make(std::move(node)));
    }
    static Expr apply(Function f, const Expr& arg) {
        if (arg.is_const()) return constant(apply_function(f, arg.value()));
        return Expr(make(Node{Op::Func, {}, 0, f, arg.node_, nullptr}));
    }

    Op op() const { return node_->op; }
    bool is_const() const { return node_->op == Op::Const; }
    Complex value() const { return node_->value; }
    int exponent() const { return node_->exponent; }
    Function function() const { return node_->function; }
    Expr lhs() const { return Expr(node_->lhs); }
    Expr rhs() const { return Expr(node_->rhs); }

    friend bool operator==(const Expr& a, const Expr& b) { return equal(*a.node_, *b.node_); }

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    static std::shared_ptr<const Node> make(Node n) {
        return std::make_shared<const Node>(std::move(n));
    }
    static Expr binary(Op op, const Expr& a, const Expr& b) {
        return Expr(make(Node{op, {}, 0, Function::Exp, a.node_, b.node_}));
    }
    static bool equal(const Node& a, const Node& b) {
        if (a.op != b.op) return false;
        switch (a.op) {
            case Op::Const: return a.value == b.value;
            case Op::Var: return true;
            case Op::Neg: return equal(*a.lhs, *b.lhs);
            case Op::Pow: return a.exponent == b.exponent && equal(*a.lhs, *b.lhs);
            case Op::Func: return a.function == b.function && equal(*a.lhs, *b.lhs);
            default: return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
        }
    }

    std::shared_ptr<const Node> node_;
};

/// Evaluates v(z) in complex double arithmetic. The result may be non-finite
/// when an intermediate overflows; see eval_v for the checked variant.
inline Complex evaluate(const Expr& e, Complex z) {
    switch (e.op()) {
        case Op::Const: return e.value();
        case Op::Var: return z;
        case Op::Neg: return -evaluate(e.lhs(), z);
        case Op::Add: return evaluate(e.lhs(), z) + evaluate(e.rhs(), z);
        case Op::Sub: return evaluate(e.lhs(), z) - evaluate(e.rhs(), z);
        case Op::Mul: return evaluate(e.lhs(), z) * evaluate(e.rhs(), z);
        case Op::Div: return evaluate(e.lhs(), z) / evaluate(e.rhs(), z);
        case Op::Pow: return ipow(evaluate(e.lhs(), z), e.exponent());
        case Op::Func: return apply_function(e.function(), evaluate(e.lhs(), z));
    }
    return {};
}

inline bool is_finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

/// Checked evaluation: throws OverflowError when a finite argument produces a
/// non-finite value (e.g. exp of a large argument).
inline Complex eval_v(const Expr& e, Complex z) {
    const Complex v = evaluate(e, z);
    if (!is_finite(v) && is_finite(z))
        throw OverflowError("potential overflowed at z = (" + std::to_string(z.real()) + ", " +
                            std::to_string(z.imag()) + ")");
    return v;
}

namespace detail {

// Builders used only by the derivative: on top of constant folding they drop
// additive zeros and multiplicative ones so that 0*exp(huge) never appears.
inline bool is_value(const Expr& e, double v) { return e.is_const() && e.value() == Complex{v, 0.0}; }

inline Expr d_add(const Expr& a, const Expr& b) {
    if (is_value(a, 0.0)) return b;
    if (is_value(b, 0.0)) return a;
    return Expr::add(a, b);
}
inline Expr d_mul(const Expr& a, const Expr& b) {
    if (is_value(a, 0.0) || is_value(b, 0.0)) return Expr::constant(0.0);
    if (is_value(a, 1.0)) return b;
    if (is_value(b, 1.0)) return a;
    return Expr::mul(a, b);
}
inline Expr d_neg(const Expr& a) { return is_value(a, 0.0) ? a : Expr::neg(a); }

}  // namespace detail

/// Exact symbolic derivative dv/dz.
inline Expr derivative(const Expr& e) {
    using namespace detail;
    switch (e.op()) {
        case Op::Const: return Expr::constant(0.0);
        case Op::Var: return Expr::constant(1.0);
        case Op::Neg: return d_neg(derivative(e.lhs()));
        case Op::Add: return d_add(derivative(e.lhs()), derivative(e.rhs()));
        case Op::Sub: {
            Expr da = derivative(e.lhs()), db = derivative(e.rhs());
            if (is_value(db, 0.0)) return da;
            if (is_value(da, 0.0)) return d_neg(db);
            return Expr::sub(da, db);
        }
        case Op::Mul:
            return d_add(d_mul(derivative(e.lhs()), e.rhs()), d_mul(e.lhs(), derivative(e.rhs())));
        case Op::Div: {
            Expr du = derivative(e.lhs());
            return is_value(du, 0.0) ? du : Expr::div(du, e.rhs());
        }
        case Op::Pow: {
            const int n = e.exponent();
            if (n == 0) return Expr::constant(0.0);
            Expr du = derivative(e.lhs());
            if (n == 1) return du;
            Expr lowered = n == 2 ? e.lhs() : Expr::pow(e.lhs(), n - 1);
            return d_mul(d_mul(Expr::constant(static_cast<double>(n)), lowered), du);
        }
        case Op::Func: {
            const Expr u = e.lhs();
            const Expr du = derivative(u);
            switch (e.function()) {
                case Function::Exp: return d_mul(e, du);
                case Function::Sin: return d_mul(Expr::apply(Function::Cos, u), du);
                case Function::Cos: return d_neg(d_mul(Expr::apply(Function::Sin, u), du));
                case Function::Sinh: return d_mul(Expr::apply(Function::Cosh, u), du);
                case Function::Cosh: return d_mul(Expr::apply(Function::Sinh, u), du);
            }
        }
    }
    return Expr::constant(0.0);
}

namespace detail {

inline std::string format_real(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, end);
}

inline std::string format_constant(Complex c) {
    const double re = c.real(), im = c.imag();
    if (im == 0.0) {
        if (re >= 0.0) return format_real(re == 0.0 ? 0.0 : re);
        return "(-" + format_real(-re) + ")";
    }
    std::string imag_part = std::abs(im) == 1.0 ? "i" : format_real(std::abs(im)) + "*i";
    if (re == 0.0) {
        if (im == 1.0) return "i";
        return im > 0 ? "(" + imag_part + ")" : "(-" + imag_part + ")";
    }
    std::string real_part = re < 0 ? "-" + format_real(-re) : format_real(re);
    return "(" + real_part + (im > 0 ? "+" : "-") + imag_part + ")";
}

// Binding strength of each node when printed; atoms bind tightest.
inline int precedence(const Expr& e) {
    switch (e.op()) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        default: return 5;
    }
}

inline std::string print(const Expr& e, int min_prec) {
    std::string s;
    switch (e.op()) {
        case Op::Const: s = format_constant(e.value()); break;
        case Op::Var: s = "z"; break;
        case Op::Neg: s = "-" + print(e.lhs(), 3); break;
        case Op::Add: s = print(e.lhs(), 1) + " + " + print(e.rhs(), 2); break;
        case Op::Sub: s = print(e.lhs(), 1) + " - " + print(e.rhs(), 2); break;
        case Op::Mul: s = print(e.lhs(), 2) + "*" + print(e.rhs(), 3); break;
        case Op::Div: s = print(e.lhs(), 2) + "/" + print(e.rhs(), 3); break;
        case Op::Pow: s = print(e.lhs(), 5) + "^" + std::to_string(e.exponent()); break;
        case Op::Func:
            s = std::string(function_name(e.function())) + "(" + print(e.lhs(), 0) + ")";
            break;
    }
    return precedence(e) < min_prec ? "(" + s + ")" : s;
}

}  // namespace detail

/// Prints an expression in the input grammar with minimal parentheses.
inline std::string to_string(const Expr& e) { return detail::print(e, 0); }

}  // namespace cmech
