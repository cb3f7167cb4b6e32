#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cmech/hamiltonian.hpp"
#include "cmech/potential.hpp"

namespace cmech {

/// Reference closed forms of h and H_i for one potential at m = 1/2,
/// kept exactly as tabulated, misprints included.
struct ReferenceRow {
    std::string potential;  ///< builtin name
    std::string h_text;
    std::string hi_text;
    std::function<double(const DarbouxPoint&)> h;
    std::function<double(const DarbouxPoint&)> hi;
};

inline const std::vector<ReferenceRow>& reference_table() {
    static const std::vector<ReferenceRow> rows = [] {
        const double s = std::sqrt(2.0);
        std::vector<ReferenceRow> r;
        r.push_back({"iz", "p1^2 - p2/sqrt2 - x2^2", "x2 p1 + x1/sqrt2",
                     [s](const DarbouxPoint& q) { return q.p1 * q.p1 - q.p2 / s - q.x2 * q.x2; },
                     [s](const DarbouxPoint& q) { return q.x2 * q.p1 + q.x1 / s; }});
        r.push_back({"z2", "p1^2 - p2^2 + x1^2 - x2^2", "x2 p1 + x1 p2",
                     [](const DarbouxPoint& q) {
                         return q.p1 * q.p1 - q.p2 * q.p2 + q.x1 * q.x1 - q.x2 * q.x2;
                     },
                     [](const DarbouxPoint& q) { return q.x2 * q.p1 + q.x1 * q.p2; }});
        r.push_back({"iz3", "p1^2 + (p2^3 - 3 x1^2 p2)/sqrt2 - x2^2", "x2 p1 + (x1^3 - 3 x1 p2^2)/(2 sqrt2)",
                     [s](const DarbouxPoint& q) {
                         return q.p1 * q.p1 + (std::pow(q.p2, 3) - 3 * q.x1 * q.x1 * q.p2) / s - q.x2 * q.x2;
                     },
                     [s](const DarbouxPoint& q) {
                         return q.x2 * q.p1 + (std::pow(q.x1, 3) - 3 * q.x1 * q.p2 * q.p2) / (2 * s);
                     }});
        r.push_back({"-z4", "p1^2 - (x1^4 - 6 x1^2 p2^2 + p2^4)/2 - x2^2", "x2 p1 - x1^3 p2 - x1 p2^3",
                     [](const DarbouxPoint& q) {
                         return q.p1 * q.p1 -
                                (std::pow(q.x1, 4) - 6 * q.x1 * q.x1 * q.p2 * q.p2 + std::pow(q.p2, 4)) / 2 -
                                q.x2 * q.x2;
                     },
                     [](const DarbouxPoint& q) {
                         return q.x2 * q.p1 - std::pow(q.x1, 3) * q.p2 - q.x1 * std::pow(q.p2, 3);
                     }});
        r.push_back({"exp_iz", "p1^2 + 2 exp(-p2/sqrt2) cos(x1/sqrt2) - x2^2",
                     "x2 p1 + exp(-p2/sqrt2) sin(x1/sqrt2)",
                     [s](const DarbouxPoint& q) {
                         return q.p1 * q.p1 + 2 * std::exp(-q.p2 / s) * std::cos(q.x1 / s) - q.x2 * q.x2;
                     },
                     [s](const DarbouxPoint& q) { return q.x2 * q.p1 + std::exp(-q.p2 / s) * std::sin(q.x1 / s); }});
        r.push_back({"isin_z", "p1^2 - 2 cos(x1/sqrt2) sinh(p2/sqrt2) - x2^2",
                     "x2 p1 + sin(x1/sqrt2) cosh(p2/sqrt2)",
                     [s](const DarbouxPoint& q) {
                         return q.p1 * q.p1 - 2 * std::cos(q.x1 / s) * std::sinh(q.p2 / s) - q.x2 * q.x2;
                     },
                     [s](const DarbouxPoint& q) { return q.x2 * q.p1 + std::sin(q.x1 / s) * std::cosh(q.p2 / s); }});
        return r;
    }();
    return rows;
}

/// Comparison of one printed column against the generic h / H_i.
struct ColumnCheck {
    std::string potential;
    std::string column;  ///< "h" or "Hi"
    std::string printed;
    double max_deviation = 0.0;
    bool discrepant = false;
    DarbouxPoint worst;  ///< point of largest deviation
    double printed_value = 0.0;
    double computed_value = 0.0;
};

/// Draws `points` seeded points in [-2, 2]^4 and compares every printed column
/// with eval_h / eval_Hi_darboux at m = 1/2. Columns off by more than
/// `tolerance` are marked discrepant.
inline std::vector<ColumnCheck> verify_reference_table(std::uint64_t seed, int points = 100,
                                                       double tolerance = 1e-12) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::vector<DarbouxPoint> pts(static_cast<std::size_t>(points));
    for (auto& p : pts) p = {coord(rng), coord(rng), coord(rng), coord(rng)};

    std::vector<ColumnCheck> out;
    for (const auto& row : reference_table()) {
        const System sys(builtin_potential(row.potential).expr, 0.5);
        for (int col = 0; col < 2; ++col) {
            ColumnCheck c;
            c.potential = row.potential;
            c.column = col == 0 ? "h" : "Hi";
            c.printed = col == 0 ? row.h_text : row.hi_text;
            c.max_deviation = -1.0;
            for (const auto& p : pts) {
                const double printed = col == 0 ? row.h(p) : row.hi(p);
                const double computed = col == 0 ? eval_h(sys, p) : eval_Hi_darboux(sys, p);
                const double dev = std::abs(printed - computed);
                if (!(dev <= c.max_deviation)) {
                    c.max_deviation = dev;
                    c.worst = p;
                    c.printed_value = printed;
                    c.computed_value = computed;
                }
            }
            c.discrepant = !(c.max_deviation <= tolerance);
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace cmech
