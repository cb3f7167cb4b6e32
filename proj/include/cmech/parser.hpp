#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>

#include "cmech/errors.hpp"
#include "cmech/expression.hpp"

namespace cmech {

namespace detail {

/// Recursive-descent parser for
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | base ('^' integer)?
///   base   := number | 'i' | 'z' | func '(' expr ')' | '(' expr ')'
///   func   := 'exp' | 'sin' | 'cos' | 'sinh' | 'cosh'
///
/// Unary minus binds looser than '^', so "-z^4" is -(z^4).
class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr parse() {
        skip_ws();
        if (pos_ == text_.size()) throw SyntaxError("empty potential", pos_);
        Expr e = expr();
        skip_ws();
        if (pos_ != text_.size())
            throw SyntaxError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ == text_.size())
                throw SyntaxError(std::string("expected '") + c + "' but input ended", pos_);
            throw SyntaxError(std::string("expected '") + c + "'", pos_);
        }
    }

    Expr expr() {
        Expr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = Expr::add(lhs, term());
            else if (accept('-'))
                lhs = Expr::sub(lhs, term());
            else
                return lhs;
        }
    }

    Expr term() {
        Expr lhs = factor();
        for (;;) {
            if (accept('*')) {
                lhs = Expr::mul(lhs, factor());
            } else if (accept('/')) {
                skip_ws();
                const std::size_t at = pos_;
                Expr rhs = factor();
                if (!rhs.is_const())
                    throw UnsupportedFunction("division by a non-constant expression introduces poles", at);
                if (rhs.value() == Complex{0.0, 0.0}) throw SyntaxError("division by zero", at);
                lhs = Expr::div(lhs, rhs);
            } else {
                return lhs;
            }
        }
    }

    Expr factor() {
        if (accept('-')) return Expr::neg(factor());
        Expr b = base();
        if (accept('^')) return Expr::pow(b, exponent());
        return b;
    }

    int exponent() {
        skip_ws();
        const std::size_t at = pos_;
        if (pos_ < text_.size() && text_[pos_] == '-')
            throw UnsupportedFunction("negative powers are not entire", at);
        if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            std::size_t end = pos_;
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
            const bool plain = end == text_.size() || !(text_[end] == '.' || text_[end] == 'e' || text_[end] == 'E');
            if (!plain) {
                const double v = number();
                if (v != std::floor(v)) throw UnsupportedFunction("fractional powers have branch cuts", at);
                throw SyntaxError("exponent must be an integer literal", at);
            }
            int n = 0;
            auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + end, n);
            if (ec != std::errc() || ptr != text_.data() + end)
                throw SyntaxError("exponent out of range", at);
            pos_ = end;
            return n;
        }
        if (pos_ < text_.size() && text_[pos_] == '(')
            throw UnsupportedFunction("only integer literal powers are entire in general", at);
        throw SyntaxError("expected an integer exponent", at);
    }

    double number() {
        const std::size_t at = pos_;
        std::size_t end = pos_;
        auto digit = [&](std::size_t k) {
            return k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]));
        };
        while (digit(end)) ++end;
        if (end < text_.size() && text_[end] == '.') {
            ++end;
            while (digit(end)) ++end;
        }
        if (end == at + 1 && text_[at] == '.') throw SyntaxError("malformed number", at);
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            std::size_t k = end + 1;
            if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
            if (digit(k)) {
                while (digit(k)) ++k;
                end = k;
            }
        }
        const std::string literal(text_.substr(at, end - at));
        char* stop = nullptr;
        const double v = std::strtod(literal.c_str(), &stop);
        if (stop != literal.c_str() + literal.size() || !std::isfinite(v))
            throw SyntaxError("malformed number '" + literal + "'", at);
        pos_ = end;
        return v;
    }

    std::string_view identifier() {
        const std::size_t at = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        return text_.substr(at, pos_ - at);
    }

    Expr base() {
        skip_ws();
        const std::size_t at = pos_;
        if (pos_ == text_.size()) throw SyntaxError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr::constant(number());
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::string_view name = identifier();
            skip_ws();
            const bool call = pos_ < text_.size() && text_[pos_] == '(';
            if (!call) {
                if (name == "i") return Expr::constant({0.0, 1.0});
                if (name == "z") return Expr::variable();
                if (name == "e")
                    throw SyntaxError("unknown identifier 'e'; write exp(...) for the exponential", at);
                throw SyntaxError("unknown identifier '" + std::string(name) + "'", at);
            }
            static constexpr std::array<std::pair<std::string_view, Function>, 5> functions{{
                {"exp", Function::Exp},
                {"sin", Function::Sin},
                {"cos", Function::Cos},
                {"sinh", Function::Sinh},
                {"cosh", Function::Cosh},
            }};
            for (const auto& [fname, f] : functions) {
                if (name == fname) {
                    ++pos_;
                    Expr arg = expr();
                    expect(')');
                    return Expr::apply(f, arg);
                }
            }
            throw UnsupportedFunction("'" + std::string(name) + "' is not an entire function", at);
        }
        throw SyntaxError("unexpected '" + std::string(1, c) + "'", at);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a potential v(z). Throws SyntaxError or UnsupportedFunction.
inline Expr parse_potential(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace cmech
