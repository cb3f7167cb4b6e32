// Command-line front end: simulation, verification sweeps and Darboux frames.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmech/cmech.hpp"

namespace {

using cmech::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitDegenerate = 3;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("CMECH_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw cmech::ConfigError(std::string("CMECH_SEED is not an unsigned integer: ") + env);
        }
    }
    return 42;
}

void emit(const std::string& out, const std::string& content) {
    if (out.empty() || out == "-")
        std::cout << content;
    else
        cmech::io::atomic_write(out, content);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

cmech::DarbouxPoint parse_xi(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double x = std::strtod(item.c_str(), &end);
        if (item.empty() || *end != '\0') throw cmech::ConfigError("malformed Darboux point '" + text + "'");
        v.push_back(x);
    }
    if (v.size() != 4) throw cmech::ConfigError("Darboux point needs four values x1,p1,x2,p2");
    return {v[0], v[1], v[2], v[3]};
}

struct Common {
    std::string potential = "i*z^3";
    double mass = 0.5;
    std::string out;
};

void add_system_options(CLI::App* cmd, Common& c) {
    cmd->add_option("--potential", c.potential, "Entire potential v(z), or a builtin name (iz, z2, iz3, -z4, exp_iz, isin_z)")
        ->capture_default_str();
    cmd->add_option("--mass", c.mass, "Mass m")->capture_default_str();
}

cmech::SymplecticParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (;;) {
        cmech::SymplecticParams s{u(rng), u(rng), {u(rng), u(rng)}};
        if (cmech::r_pm(s).minus >= 1e-3) return s;
    }
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
    Common common;
    std::string z0 = "0", p0 = "1", xi0;
    std::string frame = "complex", method = "rk45";
    cmech::IntegratorConfig cfg;
    std::string summary;
};

int run_simulate(SimulateArgs& a) {
    const cmech::System sys(cmech::resolve_potential(a.common.potential), a.common.mass);
    if (a.method == "rk4")
        a.cfg.method = cmech::Method::FixedRk4;
    else if (a.method == "split")
        a.cfg.method = cmech::Method::SplitStep;
    else
        a.cfg.method = cmech::Method::AdaptiveRk45;

    cmech::ComplexPhasePoint start{cmech::io::parse_complex_literal(a.z0), cmech::io::parse_complex_literal(a.p0)};
    if (!a.xi0.empty()) start = cmech::complex_from_darboux(parse_xi(a.xi0));
    const cmech::DarbouxPoint xi_start = a.xi0.empty() ? cmech::to_darboux(start) : parse_xi(a.xi0);

    Json summary = {{"system", {{"potential", a.common.potential},
                              {"parsed", cmech::to_string(sys.potential())},
                              {"mass", sys.mass()}}},
                    {"config", cmech::io::config_json(a.cfg)},
                    {"initial", {{"z", {start.z.real(), start.z.imag()}}, {"p", {start.p.real(), start.p.imag()}}}}};

    std::ostringstream csv;
    cmech::Termination term = cmech::Termination::TEnd;
    if (a.frame == "complex") {
        const auto tr = cmech::integrate_complex(sys, start.z, start.p, a.cfg);
        cmech::io::write_trajectory_csv(csv, tr);
        summary.update(cmech::io::trajectory_json(tr));
        term = tr.terminated_by;
    } else if (a.frame == "darboux") {
        const auto tr = cmech::integrate_darboux(sys, xi_start, a.cfg);
        cmech::io::write_trajectory_csv(csv, tr);
        summary.update(cmech::io::trajectory_json(tr));
        term = tr.terminated_by;
    } else {
        const auto tc = cmech::integrate_complex(sys, start.z, start.p, a.cfg);
        const auto td = cmech::integrate_darboux(sys, xi_start, a.cfg);
        cmech::io::write_trajectory_csv(csv, tc, &td);
        summary.update(cmech::io::trajectory_json(tc));
        summary["frame"] = "both";
        summary["darboux"] = cmech::io::trajectory_json(td);
        try {
            const auto eq = cmech::equivalence_report(tc, td);
            summary["equivalence"] = {{"max_deviation", eq.max_deviation},
                                      {"t_at_max", eq.t_at_max},
                                      {"n_points", eq.n_points},
                                      {"tolerance", eq.tolerance},
                                      {"passed", eq.passed}};
        } catch (const cmech::GridMismatch& e) {
            summary["equivalence"] = {{"error", e.what()}};
        }
        term = tc.terminated_by == cmech::Termination::StepFailure ? tc.terminated_by : td.terminated_by;
    }

    const std::string out = a.common.out.empty() ? "traj.csv" : a.common.out;
    std::string summary_path = a.summary;
    if (summary_path.empty()) {
        const std::filesystem::path p(out);
        summary_path = out == "-" ? "-" : (p.parent_path() / p.stem()).string() + ".json";
    }
    emit(out, csv.str());
    emit(summary_path, dump(summary));
    std::cerr << "simulate: terminated_by=" << summary["terminated_by"].get<std::string>()
              << " drift_Hr=" << cmech::io::format_double(summary["drift_Hr"].get<double>())
              << " drift_Hi=" << cmech::io::format_double(summary["drift_Hi"].get<double>()) << "\n";
    return term == cmech::Termination::StepFailure ? kExitNumerical : kExitOk;
}

// --- verify-table1 --------------------------------------------------------

int run_verify_table(std::uint64_t seed, int points, const std::string& out) {
    const auto checks = cmech::verify_reference_table(seed, points);
    Json rows = Json::array();
    int discrepant = 0;
    for (const auto& c : checks) {
        rows.push_back({{"potential", c.potential},
                        {"column", c.column},
                        {"printed", c.printed},
                        {"status", c.discrepant ? "DISCREPANT" : "PASS"},
                        {"max_deviation", c.max_deviation},
                        {"worst_point", {c.worst.x1, c.worst.p1, c.worst.x2, c.worst.p2}},
                        {"printed_value", c.printed_value},
                        {"computed_value", c.computed_value}});
        discrepant += c.discrepant;
        std::cerr << c.potential << " " << c.column << ": " << (c.discrepant ? "DISCREPANT" : "PASS");
        if (c.discrepant)
            std::cerr << " printed=" << cmech::io::format_double(c.printed_value)
                      << " computed=" << cmech::io::format_double(c.computed_value);
        std::cerr << "\n";
    }
    const Json report = {{"seed", seed},        {"points", points},         {"mass", 0.5},
                         {"tolerance", 1e-12},  {"discrepant", discrepant}, {"rows", rows}};
    emit(out, dump(report));
    return kExitOk;
}

// --- verify-symplectic / darboux -----------------------------------------

struct StructureArgs {
    double a = 0.0, b = 0.0;
    std::string alpha = "0";
    int random = 0;
    std::uint64_t seed = 0;
    std::string out;
};

constexpr double kFrameTolerance = 1e-10;

Json structure_entry(const cmech::SymplecticParams& s, std::mt19937_64& rng, bool& pass) {
    Json entry = {{"params", cmech::io::params_json(s)}, {"degenerate", s.degenerate()}};
    const cmech::DarbouxFrame f = cmech::darboux_frame(s);
    entry.update(cmech::io::frame_json(f));
    const auto r = cmech::frame_residuals(f);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const cmech::RealPhasePoint w{u(rng), u(rng), u(rng), u(rng)};
    double worst_pos = 0.0, worst_mom = 0.0;
    for (const auto& p : cmech::builtin_potentials()) {
        const auto rep = cmech::verify_compatibility(s, cmech::System(p.expr, 0.5), w);
        worst_pos = std::max(worst_pos, rep.position_residual);
        worst_mom = std::max(worst_mom, rep.momentum_residual);
    }
    entry["residuals"]["compatibility_position"] = worst_pos;
    entry["residuals"]["compatibility_momentum"] = worst_mom;
    pass = r.orthogonality <= kFrameTolerance && r.normal_form <= kFrameTolerance &&
           r.canonicity <= kFrameTolerance && worst_pos <= kFrameTolerance && worst_mom <= kFrameTolerance;
    entry["status"] = pass ? "PASS" : "FAIL";
    return entry;
}

int run_structure(const StructureArgs& a, bool sweep_allowed) {
    std::mt19937_64 rng(a.seed);
    if (sweep_allowed && a.random > 0) {
        Json entries = Json::array();
        int passed = 0;
        for (int k = 0; k < a.random; ++k) {
            bool ok = false;
            entries.push_back(structure_entry(random_params(rng), rng, ok));
            passed += ok;
        }
        emit(a.out, dump({{"seed", a.seed}, {"passed", passed}, {"total", a.random}, {"entries", entries}}));
        std::cerr << "verify-symplectic: " << passed << "/" << a.random << " PASS (seed " << a.seed << ")\n";
        return passed == a.random ? kExitOk : kExitNumerical;
    }
    const cmech::SymplecticParams s{a.a, a.b, cmech::io::parse_complex_literal(a.alpha)};
    const cmech::RPair r = cmech::r_pm(s);
    if (s.degenerate() || r.minus <= cmech::kDegeneracyTolerance) {
        emit(a.out, dump({{"params", cmech::io::params_json(s)},
                          {"r_plus", r.plus},
                          {"r_minus", r.minus},
                          {"degenerate", true}}));
        std::cerr << "degenerate structure: |alpha|^2 - a b = 1, the matrix J is singular and has no Darboux frame\n";
        return kExitDegenerate;
    }
    bool ok = false;
    Json report = {{"seed", a.seed}};
    report.update(structure_entry(s, rng, ok));
    emit(a.out, dump(report));
    std::cerr << "r+ = " << cmech::io::format_double(r.plus) << ", r- = " << cmech::io::format_double(r.minus)
              << ": " << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitNumerical;
}

// --- hi-flow / constrain --------------------------------------------------

int run_hi_flow(const Common& c, const std::string& z0, const std::string& p0, const std::string& xi0,
                const cmech::FlowConfig& flow) {
    const cmech::System sys(cmech::resolve_potential(c.potential), c.mass);
    const cmech::DarbouxPoint start =
        xi0.empty()
            ? cmech::to_darboux(cmech::ComplexPhasePoint{cmech::io::parse_complex_literal(z0),
                                                         cmech::io::parse_complex_literal(p0)})
            : parse_xi(xi0);
    const auto tr = cmech::hi_flow(sys, start, flow);
    std::ostringstream csv;
    cmech::io::write_trajectory_csv(csv, tr);
    emit(c.out.empty() ? "hi_flow.csv" : c.out, csv.str());
    Json summary = {{"system", {{"potential", c.potential}, {"mass", sys.mass()}}},
                    {"epsilon_end", flow.epsilon_end},
                    {"d_epsilon", flow.d_epsilon}};
    summary.update(cmech::io::trajectory_json(tr));
    std::cout << dump(summary);
    return tr.terminated_by == cmech::Termination::StepFailure ? kExitNumerical : kExitOk;
}

int run_constrain(const Common& c, double x1, double p1, double p2) {
    const cmech::System sys(cmech::resolve_potential(c.potential), c.mass);
    const auto sol = cmech::solve_hi_zero(sys, x1, p1, p2);
    Json j = {{"x1", x1}, {"p1", p1}, {"p2", p2}, {"any_value", sol.any_value}};
    if (!sol.any_value) {
        j["x2"] = sol.x2;
        j["Hi"] = cmech::eval_Hi_darboux(sys, {x1, p1, sol.x2, p2});
    }
    emit(c.out, dump(j));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complex-potential Hamiltonian dynamics: simulation and verification"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    bool seed_given = false;

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Integrate a trajectory and write CSV + JSON summary");
    add_system_options(simulate, sim.common);
    simulate->add_option("--z0", sim.z0, "Initial position (RE+IMi)")->capture_default_str();
    simulate->add_option("--p0", sim.p0, "Initial momentum (RE+IMi)")->capture_default_str();
    simulate->add_option("--xi0", sim.xi0, "Initial Darboux point x1,p1,x2,p2 (overrides --z0/--p0)");
    simulate->add_option("--t-end", sim.cfg.t_end, "Final time")->capture_default_str();
    simulate->add_option("--frame", sim.frame, "complex | darboux | both")
        ->check(CLI::IsMember({"complex", "darboux", "both"}))
        ->capture_default_str();
    simulate->add_option("--method", sim.method, "rk4 | rk45 | split")
        ->check(CLI::IsMember({"rk4", "rk45", "split"}))
        ->capture_default_str();
    simulate->add_option("--dt", sim.cfg.dt, "Step of rk4 and split")->capture_default_str();
    simulate->add_option("--rtol", sim.cfg.rel_tol, "Relative tolerance of rk45")->capture_default_str();
    simulate->add_option("--atol", sim.cfg.abs_tol, "Absolute tolerance of rk45")->capture_default_str();
    simulate->add_option("--escape-radius", sim.cfg.escape_radius, "Stop when |z| or |p| exceeds this")
        ->capture_default_str();
    simulate->add_option("--out", sim.common.out, "Trajectory CSV path (default traj.csv, '-' for stdout)");
    simulate->add_option("--summary", sim.summary, "Summary JSON path (default: CSV path with .json)");

    int table_points = 100;
    std::string table_out;
    auto* table = app.add_subcommand("verify-table1", "Compare the reference closed forms of h and H_i with the generic ones");
    table->add_option("--seed", seed, "Random seed")->each([&](const std::string&) { seed_given = true; });
    table->add_option("--points", table_points, "Number of random points")->capture_default_str();
    table->add_option("--out", table_out, "Report path (default stdout)");

    StructureArgs sym;
    auto* vsym = app.add_subcommand("verify-symplectic", "Check Darboux frames and compatibility of the structures");
    vsym->add_option("--a", sym.a, "Parameter a");
    vsym->add_option("--b", sym.b, "Parameter b");
    vsym->add_option("--alpha", sym.alpha, "Parameter alpha (RE+IMi)");
    vsym->add_option("--random", sym.random, "Sweep N seeded random non-degenerate parameter sets");
    vsym->add_option("--seed", seed, "Random seed")->each([&](const std::string&) { seed_given = true; });
    vsym->add_option("--out", sym.out, "Report path (default stdout)");

    StructureArgs dbx;
    auto* darboux = app.add_subcommand("darboux", "Print J, r+-, S and the frame residuals");
    darboux->add_option("--a", dbx.a, "Parameter a");
    darboux->add_option("--b", dbx.b, "Parameter b");
    darboux->add_option("--alpha", dbx.alpha, "Parameter alpha (RE+IMi)");
    darboux->add_option("--seed", seed, "Seed of the random compatibility point")
        ->each([&](const std::string&) { seed_given = true; });
    darboux->add_option("--out", dbx.out, "Report path (default stdout)");

    Common flow_common;
    std::string flow_z0 = "0", flow_p0 = "1", flow_xi0;
    cmech::FlowConfig flow;
    auto* hiflow = app.add_subcommand("hi-flow", "Integrate the symmetry flow generated by H_i");
    add_system_options(hiflow, flow_common);
    hiflow->add_option("--z0", flow_z0, "Initial position (RE+IMi)")->capture_default_str();
    hiflow->add_option("--p0", flow_p0, "Initial momentum (RE+IMi)")->capture_default_str();
    hiflow->add_option("--xi0", flow_xi0, "Initial Darboux point x1,p1,x2,p2");
    hiflow->add_option("--eps-end", flow.epsilon_end, "Final flow parameter")->capture_default_str();
    hiflow->add_option("--d-eps", flow.d_epsilon, "Sampling interval")->capture_default_str();
    hiflow->add_option("--out", flow_common.out, "CSV path (default hi_flow.csv)");

    Common con_common;
    double x1 = 0.0, p1 = 0.0, p2 = 0.0;
    auto* constrain = app.add_subcommand("constrain", "Solve H_i = 0 for x2");
    add_system_options(constrain, con_common);
    constrain->add_option("--x1", x1, "x1")->required();
    constrain->add_option("--p1", p1, "p1")->required();
    constrain->add_option("--p2", p2, "p2")->required();
    constrain->add_option("--out", con_common.out, "Report path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (!seed_given) seed = default_seed();
        if (*simulate) return run_simulate(sim);
        if (*table) return run_verify_table(seed, table_points, table_out);
        if (*vsym) {
            sym.seed = seed;
            return run_structure(sym, true);
        }
        if (*darboux) {
            dbx.seed = seed;
            return run_structure(dbx, false);
        }
        if (*hiflow) return run_hi_flow(flow_common, flow_z0, flow_p0, flow_xi0, flow);
        if (*constrain) return run_constrain(con_common, x1, p1, p2);
    } catch (const cmech::DegenerateStructure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const cmech::SyntaxError& e) {
        std::cerr << "SyntaxError: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cmech::UnsupportedFunction& e) {
        std::cerr << "UnsupportedFunction: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cmech::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cmech::NotFound& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cmech::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
