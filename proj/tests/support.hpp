#pragma once

#include <cstdint>
#include <random>

#include "cmech/cmech.hpp"

namespace cmech::test {

/// Seeded uniform sampler shared by the property tests.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed = 20240611) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    Vec4 vec(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
    RealPhasePoint real_point(double r = 1.0) { return RealPhasePoint::from(vec(-r, r)); }
    DarbouxPoint darboux_point(double r = 1.0) { return DarbouxPoint::from(vec(-r, r)); }

    /// Structure parameters in [-2, 2] kept away from the degenerate set.
    SymplecticParams params(double min_r_minus = 1e-3) {
        for (;;) {
            SymplecticParams s{uniform(-2, 2), uniform(-2, 2), {uniform(-2, 2), uniform(-2, 2)}};
            if (r_pm(s).minus >= min_r_minus) return s;
        }
    }

private:
    std::mt19937_64 rng_;
};

inline double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

/// Standard structure on (q1, p1, q2, p2).
inline Mat4 j_standard() {
    Mat4 j = Mat4::Zero();
    j(0, 1) = 1;
    j(1, 0) = -1;
    j(2, 3) = 1;
    j(3, 2) = -1;
    return j;
}

}  // namespace cmech::test
