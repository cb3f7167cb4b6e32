#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cmech/dynamics.hpp"
#include "cmech/errors.hpp"
#include "cmech/symplectic.hpp"

namespace cmech::io {

using Json = nlohmann::ordered_json;

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/**
 * Parses a complex literal of the form RE+IMi: "1.5", "-2", "3i", "-i",
 * "1.0+0.0i", "1e-3-2.5e2i". Bare reals are purely real.
 */
inline Complex parse_complex_literal(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    auto fail = [&]() -> Complex {
        throw ConfigError("malformed complex literal '" + std::string(text) + "' (expected RE+IMi)");
    };
    if (s.empty()) return fail();

    // Splits "[sign]number" off the front; an empty number before 'i' means 1.
    auto read = [&](std::size_t& pos, double& out) -> bool {
        const char* begin = s.c_str() + pos;
        char* end = nullptr;
        out = std::strtod(begin, &end);
        if (end == begin) {
            if (s[pos] == '+' || s[pos] == '-') {
                if (pos + 1 < s.size() && s[pos + 1] == 'i') {
                    out = s[pos] == '-' ? -1.0 : 1.0;
                    pos += 1;
                    return true;
                }
            } else if (s[pos] == 'i') {
                out = 1.0;
                return true;
            }
            return false;
        }
        pos = static_cast<std::size_t>(end - s.c_str());
        return true;
    };

    std::size_t pos = 0;
    double first = 0.0;
    if (!read(pos, first) || !std::isfinite(first)) return fail();
    if (pos == s.size()) return {first, 0.0};
    if (s[pos] == 'i') return pos + 1 == s.size() ? Complex{0.0, first} : fail();
    if (s[pos] != '+' && s[pos] != '-') return fail();
    double second = 0.0;
    if (!read(pos, second)) return fail();
    if (pos + 1 != s.size() || s[pos] != 'i') return fail();
    if (!std::isfinite(second)) return fail();
    return {first, second};
}

inline Json matrix_json(const Mat4& m) {
    Json rows = Json::array();
    for (int i = 0; i < 4; ++i) {
        Json row = Json::array();
        for (int j = 0; j < 4; ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline Json params_json(const SymplecticParams& s) {
    return {{"a", s.a}, {"b", s.b}, {"alpha", {{"re", s.alpha.real()}, {"im", s.alpha.imag()}}}};
}

/// Header of the trajectory CSV.
inline constexpr std::string_view kCsvHeader = "t,x,y,p,q,x1,p1,x2,p2,Hr,Hi";

/**
 * Writes one row per sample of `primary`. Both coordinate sets are filled in:
 * the ones not integrated are obtained by the linear frame map, unless a
 * `darboux` companion trajectory is supplied, in which case its own (dense
 * output) values are written in the x1..p2 columns.
 */
inline void write_trajectory_csv(std::ostream& os, const Trajectory& primary, const Trajectory* darboux = nullptr) {
    os << kCsvHeader << '\n';
    for (const auto& s : primary.samples) {
        const RealPhasePoint w = primary.real_at(s.t);
        const DarbouxPoint xi = darboux ? darboux->darboux_at(s.t) : primary.darboux_at(s.t);
        const double cols[] = {s.t, w.x, w.y, w.p, w.q, xi.x1, xi.p1, xi.x2, xi.p2, s.Hr, s.Hi};
        for (std::size_t k = 0; k < std::size(cols); ++k) os << (k ? "," : "") << format_double(cols[k]);
        os << '\n';
    }
}

inline Json config_json(const IntegratorConfig& cfg) {
    return {{"method", to_string(cfg.method)}, {"dt", cfg.dt},           {"rel_tol", cfg.rel_tol},
            {"abs_tol", cfg.abs_tol},          {"t_end", cfg.t_end},     {"escape_radius", cfg.escape_radius}};
}

inline Json trajectory_json(const Trajectory& tr) {
    return {{"frame", to_string(tr.frame)},
            {"drift_Hr", tr.drift_Hr},
            {"drift_Hi", tr.drift_Hi},
            {"terminated_by", to_string(tr.terminated_by)},
            {"n_steps", tr.n_steps},
            {"n_samples", tr.samples.size()}};
}

inline Json frame_json(const DarbouxFrame& f) {
    const FrameResiduals r = frame_residuals(f);
    return {{"J", matrix_json(f.J)},
            {"S", matrix_json(f.S)},
            {"r_plus", f.r_plus},
            {"r_minus", f.r_minus},
            {"residuals", {{"orthogonality", r.orthogonality},
                           {"normal_form", r.normal_form},
                           {"canonicity", r.canonicity}}},
            {"near_degenerate", f.near_degenerate()}};
}

/// Writes `content` to `path` through a temporary file in the same directory and a rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw ConfigError("failed writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace cmech::io
