#pragma once

// Command implementations behind the cce executable. Each command takes a
// validated RunConfig, writes its artifacts and returns the process exit code:
//   0 success, 1 verification failure, 2 solver non-convergence,
//   3 invalid input, 4 I/O.

#include "bvp_solver.hpp"
#include "diagnostics.hpp"
#include "endpoint_series.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "model.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace cce {

enum ExitCode { kExitOk = 0, kExitVerify = 1, kExitSolver = 2, kExitInput = 3, kExitIo = 4 };

struct RunConfig {
    int k = 1;
    std::array<double, 4> lambda{1, 1, 1, 1};
    std::string cls = "auto";
    SolveOptions solve;
    int steps = 4;
    bool secant = false;
    std::uint64_t seed = 0;
    int probes = 0;  // perturbed-guess uniqueness probes run by verify
    std::string out = ".";
    std::string format = "both";
    bool force = false;
    int threads = 0;  // 0: hardware concurrency
    // sweep axes over lambda_1..lambda_3 (lambda_4 from `lambda`)
    std::array<std::vector<double>, 3> grid;
    // verify / compare / export inputs
    std::string input, input_b;
};

inline void configure_logging() {
    const char* env = std::getenv("CCE_LOG");
    const std::string lv = env ? env : "warn";
    if (lv == "error") spdlog::set_level(spdlog::level::err);
    else if (lv == "info") spdlog::set_level(spdlog::level::info);
    else if (lv == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::set_level(spdlog::level::warn);
}

// Throws InvalidParameter with a readable message.
inline ModelParams validate(const RunConfig& c) {
    if (c.k < 1) throw Error(ErrorKind::InvalidParameter, "k must be >= 1");
    for (double l : c.lambda)
        if (!(l > 0) || !std::isfinite(l)) throw Error(ErrorKind::InvalidParameter, "lambda entries must be positive");
    const SolveOptions& o = c.solve;
    if (!(o.tol > 0) || o.max_iter < 1 || o.mesh_size < 16 || !(o.grading >= 1) || o.stages < 1 || o.stages > 8)
        throw Error(ErrorKind::InvalidParameter, "solve options out of range");
    if (c.steps < 1) throw Error(ErrorKind::InvalidParameter, "steps must be >= 1");
    if (c.format != "json" && c.format != "csv" && c.format != "both")
        throw Error(ErrorKind::InvalidParameter, "format must be json, csv or both");
    std::optional<SymmetryClass> forced;
    if (c.cls != "auto") forced = symmetry_from_string(c.cls);
    return make_params(c.k, c.lambda, forced ? &*forced : nullptr);
}

inline int exit_code_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::Io: return kExitIo;
    case ErrorKind::NonConvergence:
    case ErrorKind::StepCollapse:
    case ErrorKind::SingularJacobian:
    case ErrorKind::PositivityLoss:
    case ErrorKind::BranchViolation: return kExitSolver;
    default: return kExitInput;
    }
}

inline std::string artifact_stem(const RunConfig& c, const std::string& name) {
    return (std::filesystem::path(c.out) / name).string();
}

inline void ensure_out_dir(const RunConfig& c) {
    std::error_code ec;
    std::filesystem::create_directories(c.out, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + c.out + ": " + ec.message());
}

inline void write_artifacts(const RunConfig& c, const ResultFile& f, const std::string& name) {
    ensure_out_dir(c);
    if (c.format != "csv") write_json(artifact_stem(c, name) + ".json", f);
    if (c.format != "json") write_csv(artifact_stem(c, name) + ".csv", f.result);
}

inline ContinuationPath run_continuation(const RunConfig& c, const ModelParams& p) {
    ContinuationOptions copt;
    copt.secant = c.secant;
    return continuation_solve(boundary_data(p), c.steps, p, c.solve, copt);
}

// ------------------------------------------------------------------- solve

inline int cmd_solve(const RunConfig& c, std::ostream& out) {
    ModelParams p;
    try {
        p = validate(c);
    } catch (const Error& e) {
        out << "invalid input: " << e.what() << '\n';
        return kExitInput;
    }
    try {
        spdlog::info("solve k={} class={} mesh={} steps={}", c.k, to_string(p.symmetry), c.solve.mesh_size, c.steps);
        const ContinuationPath path = run_continuation(c, p);
        const SolveResult& r = path.final_result();
        const ResultFile f{make_manifest(p, c.solve, c.steps), p, c.solve, c.steps, r};
        write_artifacts(c, f, "result");
        out << std::setprecision(15) << "class " << to_string(p.symmetry) << "  n " << p.n << "  steps "
            << path.steps.size() - 1 << '\n'
            << "K0 " << r.K0 << '\n'
            << std::setprecision(3) << "residual_solved " << r.residual_solved << "  residual_extra "
            << r.residual_extra[0] << ' ' << r.residual_extra[1] << "  iterations " << r.iterations << '\n';
        return kExitOk;
    } catch (const StepCollapse& e) {
        out << "not converged: " << e.what() << "\nlast good s " << e.last_good_s() << '\n';
        return kExitSolver;
    } catch (const Error& e) {
        out << e.what() << '\n';
        return exit_code_for(e);
    }
}

// ------------------------------------------------------------------- sweep

struct SweepRow {
    std::array<double, 4> lambda{};
    bool converged = false;
    double last_good_s = 1;
    double K0 = 0;
    double eps_obs = 0;
    double t_cap_margin = 0;
    double y1_cap_margin = 0;
    double K0_margin = 0;  // K0 - lower bound
    std::string error;
};

inline SweepRow sweep_point(const RunConfig& c, const std::array<double, 4>& lambda) {
    SweepRow row;
    row.lambda = lambda;
    try {
        RunConfig ci = c;
        ci.lambda = lambda;
        const ModelParams p = validate(ci);
        const ContinuationPath path = run_continuation(ci, p);
        const SolveResult& r = path.final_result();
        const BoundsReport b = check_bounds(r, boundary_data(p), p);
        row.converged = true;
        row.last_good_s = 0;
        row.K0 = r.K0;
        row.eps_obs = weyl_estimates(r).eps_obs;
        row.t_cap_margin = b.t_cap_margin;
        row.y1_cap_margin = b.y1prime_cap_margin;
        row.K0_margin = r.K0 - b.K0_lower_bound;
    } catch (const StepCollapse& e) {
        row.last_good_s = e.last_good_s();
        row.error = e.what();
    } catch (const Error& e) {
        row.error = e.what();
    }
    return row;
}

inline std::vector<SweepRow> run_sweep(const RunConfig& c) {
    std::vector<std::array<double, 4>> pts;
    for (double a : c.grid[0])
        for (double b : c.grid[1])
            for (double d : c.grid[2]) pts.push_back({a, b, d, c.lambda[3]});
    std::vector<SweepRow> rows(pts.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<std::size_t>(c.threads > 0 ? unsigned(c.threads) : hw, std::max<std::size_t>(1, pts.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < pts.size();) rows[i] = sweep_point(c, pts[i]);
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return rows;
}

inline int cmd_sweep(const RunConfig& c, std::ostream& out) {
    for (const auto& ax : c.grid)
        if (ax.empty()) {
            out << "invalid input: empty sweep grid\n";
            return kExitInput;
        }
    try {
        RunConfig probe = c;
        probe.lambda = {c.grid[0][0], c.grid[1][0], c.grid[2][0], c.lambda[3]};
        validate(probe);
    } catch (const Error& e) {
        out << "invalid input: " << e.what() << '\n';
        return kExitInput;
    }
    const std::vector<SweepRow> rows = run_sweep(c);
    int ok = 0;
    std::ostringstream csv;
    csv << "lambda1,lambda2,lambda3,lambda4,converged,last_good_s,K0,eps_obs,t_cap_margin,y1_cap_margin,K0_margin\n";
    out << " lambda1  lambda2  lambda3  conv  last_s            K0     eps_obs\n";
    for (const auto& r : rows) {
        ok += r.converged;
        for (double l : r.lambda) csv << format_double(l) << ',';
        csv << (r.converged ? 1 : 0) << ',' << format_double(r.last_good_s) << ',' << format_double(r.K0) << ','
            << format_double(r.eps_obs) << ',' << format_double(r.t_cap_margin) << ','
            << format_double(r.y1_cap_margin) << ',' << format_double(r.K0_margin) << '\n';
        out << std::fixed << std::setprecision(4) << std::setw(8) << r.lambda[0] << ' ' << std::setw(8) << r.lambda[1]
            << ' ' << std::setw(8) << r.lambda[2] << "  " << (r.converged ? "yes " : "no  ") << std::setw(6)
            << r.last_good_s << "  " << std::setprecision(12) << std::setw(14) << r.K0 << "  "
            << std::scientific << std::setprecision(3) << r.eps_obs << std::defaultfloat << '\n';
    }
    try {
        ensure_out_dir(c);
        std::ofstream os(artifact_stem(c, "sweep") + ".csv");
        if (!os) throw Error(ErrorKind::Io, "cannot write sweep.csv");
        os << csv.str();
    } catch (const Error& e) {
        out << e.what() << '\n';
        return kExitIo;
    }
    out << ok << " of " << rows.size() << " points converged\n";
    return ok > 0 ? kExitOk : kExitSolver;
}

// ------------------------------------------------------------------ verify

struct CheckLine {
    std::string name;
    bool hard = true;
    bool pass = true;
    std::string detail;
};

inline std::string fmt_margin(double v) {
    std::ostringstream os;
    os << std::setprecision(4) << v;
    return os.str();
}

// The diagnostics battery. Hard checks apply in the proven regime: pairwise
// ratios of the data in (1/2, 2) with every triple inequality satisfied.
inline std::vector<CheckLine> verify_battery(const ResultFile& f) {
    const SolveResult& r = f.result;
    const ModelParams& p = f.params;
    const BoundaryData bd = boundary_data(p);
    std::vector<CheckLine> out;
    const ConditionReport cr = check_conditions(bd);
    bool in_regime = cr.cond_3_1[0] && cr.cond_3_1[1] && cr.cond_3_1[2];
    for (double a : bd.t0)
        for (double b : bd.t0) in_regime = in_regime && a / b > 0.5 && a / b < 2;
    bool round = bd.t0[0] == 1 && bd.t0[1] == 1 && bd.t0[2] == 1;

    out.push_back({"converged", true, r.residual_solved <= 10 * f.options.tol,
                   "residual " + fmt_margin(r.residual_solved)});
    const MonotonicityReport mr = check_monotonicity(r, bd);
    if (!round)
        out.push_back({"y1' > 0 on interior nodes", in_regime, mr.y1_positive, "min " + fmt_margin(mr.y1_min)});
    if (p.symmetry == SymmetryClass::Full && mr.pairwise_distinct) {
        int sc = 0;
        for (const auto& q : mr.ratio_signs) sc += q.sign_changes;
        out.push_back({"ratio derivatives keep sign", in_regime, sc == 0, std::to_string(sc) + " sign changes"});
    }
    const BoundsReport br = check_bounds(r, bd, p);
    out.push_back({"t_i below cap", in_regime, br.t_cap_margin >= -1e-9, "margin " + fmt_margin(br.t_cap_margin)});
    out.push_back({"K nondecreasing", in_regime, br.K_monotone, "min y1' " + fmt_margin(br.y1_min_slope)});
    out.push_back({"K <= 1", in_regime, br.K_le_one, "max K " + fmt_margin(br.K_range[1])});
    out.push_back({"y1' below 4nx/(1-x^2)", in_regime, br.y1prime_cap_margin >= -1e-9,
                   "margin " + fmt_margin(br.y1prime_cap_margin)});
    out.push_back({"K0 above lower bound", in_regime, br.K0 >= br.K0_lower_bound,
                   "K0 - bound " + fmt_margin(br.K0 - br.K0_lower_bound)});
    if (p.symmetry != SymmetryClass::Full) {
        const ExtremaReport er = classify_extrema(r, p);
        out.push_back({"extrema rules", true, er.holds(), std::to_string(er.extrema.size()) + " interior extrema"});
    }
    const WeylReport w = weyl_estimates(r);
    out.push_back({"Weyl proxy below cap", false, w.within_cap, "eps_obs " + fmt_margin(w.eps_obs)});
    const auto C = check_apriori(r);
    out.push_back({"a priori constants", false, true,
                   "C = " + fmt_margin(C[0]) + " " + fmt_margin(C[1]) + " " + fmt_margin(C[2]) + " " + fmt_margin(C[3])});
    try {
        const auto pd = parity_defect(r.grid, {1, 3, 5});
        const double mx = *std::max_element(pd.begin(), pd.end());
        out.push_back({"odd coefficients vanish", false, mx <= 1e-5, "max scaled " + fmt_margin(mx)});
    } catch (const Error& e) {
        out.push_back({"odd coefficients vanish", false, false, e.what()});
    }
    return out;
}

// Perturbed-guess probes: every probe must land on the stored solution.
inline CheckLine uniqueness_probe(const ResultFile& f, int probes, std::uint64_t seed) {
    Mesh mesh;
    mesh.nodes = f.result.grid.x;
    double worst = 0;
    int failed = 0;
    for (int q = 0; q < probes; ++q) {
        try {
            const SolutionGrid g = perturbed_guess(f.params, mesh, seed + q, 0.3, f.options.stages);
            const SolveResult r = newton_solve(g, f.params, f.options);
            worst = std::max(worst, compare_solutions(f.result, r).max_V());
        } catch (const Error&) {
            ++failed;
        }
    }
    return {"uniqueness probes", false, failed == 0 && worst <= 1e-8,
            std::to_string(probes - failed) + "/" + std::to_string(probes) + " converged, max V " + fmt_margin(worst)};
}

inline int cmd_verify(const RunConfig& c, std::ostream& out) {
    ResultFile f;
    if (!c.input.empty()) {
        try {
            f = read_json(c.input);
        } catch (const Error& e) {
            out << e.what() << '\n';
            return kExitIo;
        }
        if (!manifest_matches(f) && !c.force) {
            out << "manifest does not match the stored params/options (use --force to verify anyway)\n";
            return kExitInput;
        }
    } else {
        try {
            const ModelParams p = validate(c);
            f = {make_manifest(p, c.solve, c.steps), p, c.solve, c.steps, run_continuation(c, p).final_result()};
        } catch (const StepCollapse& e) {
            out << "not converged: " << e.what() << '\n';
            return kExitSolver;
        } catch (const Error& e) {
            out << e.what() << '\n';
            return exit_code_for(e);
        }
    }
    std::vector<CheckLine> lines;
    try {
        lines = verify_battery(f);
        if (c.probes > 0) lines.push_back(uniqueness_probe(f, c.probes, c.seed));
    } catch (const Error& e) {
        out << e.what() << '\n';
        return kExitInput;
    }
    bool ok = true;
    for (const auto& l : lines) {
        out << (l.pass ? "PASS " : (l.hard ? "FAIL " : "warn ")) << (l.hard ? "[hard] " : "[soft] ") << std::left
            << std::setw(30) << l.name << std::right << ' ' << l.detail << '\n';
        if (l.hard && !l.pass) ok = false;
    }
    return ok ? kExitOk : kExitVerify;
}

// ----------------------------------------------------------------- compare

inline json to_json(const VariationReport& v) {
    json j;
    j["V"] = io::nums(std::vector<double>(v.V.begin(), v.V.end()));
    j["inequality_flags"] = {v.inequality_flags[0], v.inequality_flags[1], v.inequality_flags[2],
                             v.inequality_flags[3]};
    j["nodes"] = io::nums(v.x);
    j["z"] = io::rows(v.z);
    return j;
}

inline int cmd_compare(const RunConfig& c, std::ostream& out) {
    ResultFile a, b;
    try {
        a = read_json(c.input);
        b = read_json(c.input_b);
    } catch (const Error& e) {
        out << e.what() << '\n';
        return kExitIo;
    }
    VariationReport v;
    try {
        if (a.params.k != b.params.k) throw Error(ErrorKind::InvalidComparison, "runs have different k");
        v = compare_solutions(a.result, b.result);
    } catch (const Error& e) {
        out << e.what() << '\n';
        return kExitInput;
    }
    out << "component        V(z)\n";
    for (int q = 0; q < 4; ++q) out << "z" << q + 1 << "  " << std::setw(18) << std::setprecision(6) << v.V[q] << '\n';
    const char* names[4] = {"V(z2) <= rest/(n-2)", "V(z3) <= rest/(n-2)", "V(z4) <= rest/(n-2)",
                            "V(z1) <= sum/n"};
    for (int q = 0; q < 4; ++q) out << (v.inequality_flags[q] ? "holds  " : "fails  ") << names[q] << '\n';
    try {
        ensure_out_dir(c);
        std::ofstream os(artifact_stem(c, "compare") + ".json");
        if (!os) throw Error(ErrorKind::Io, "cannot write compare.json");
        os << to_json(v).dump(1) << '\n';
    } catch (const Error& e) {
        out << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}

// ------------------------------------------------------------------ export

inline int cmd_export(const RunConfig& c, std::ostream& out) {
    ResultFile f;
    try {
        f = read_json(c.input);
    } catch (const Error& e) {
        out << e.what() << '\n';
        return kExitIo;
    }
    if (!manifest_matches(f) && !c.force) {
        out << "manifest does not match the stored params/options (use --force)\n";
        return kExitInput;
    }
    try {
        const std::string name = std::filesystem::path(c.input).stem().string();
        write_artifacts(c, f, name);
        out << "wrote " << artifact_stem(c, name) << '\n';
    } catch (const Error& e) {
        out << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}

} // namespace cce
