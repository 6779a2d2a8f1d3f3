// Acceptance suite: one test per criterion, one summary line per criterion.

#include "cce/diagnostics.hpp"
#include "cce/io.hpp"
#include "cce/shooting.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>

using namespace cce;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

SolveResult solve_to(const ModelParams& p, int N = 400, int steps = 4) {
    SolveOptions o;
    o.mesh_size = N;
    return continuation_solve(boundary_data(p), steps, p, o).final_result();
}

// Full-class data for criteria 4 and 5: ratios in (0.8, 1.25), pairwise distinct
// (relative gap >= 1e-3), triple inequalities satisfied.
const std::vector<std::array<double, 4>>& full_sample() {
    static const std::vector<std::array<double, 4>> sample = [] {
        std::vector<std::array<double, 4>> s;
        std::mt19937_64 rng(20240607);
        std::uniform_real_distribution<double> u(std::log(0.8), std::log(1.25));
        while (s.size() < 20) {
            const std::array<double, 4> lam{std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng)), 1.0};
            bool ok = true;
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    const double r = lam[i] / lam[j];
                    ok = ok && r > 0.8 && r < 1.25 && std::abs(r - 1) > 1e-3;
                }
            if (!ok) continue;
            const ModelParams p = make_params(1, lam);
            const ConditionReport c = check_conditions(boundary_data(p));
            if (p.symmetry != SymmetryClass::Full || !(c.cond_3_1[0] && c.cond_3_1[1] && c.cond_3_1[2])) continue;
            s.push_back(lam);
        }
        return s;
    }();
    return sample;
}

struct SampleRun {
    std::array<double, 4> lambda;
    bool converged = false;
    SolveResult result;
};

const std::vector<SampleRun>& full_sample_runs() {
    static const std::vector<SampleRun> runs = [] {
        std::vector<SampleRun> out;
        for (const auto& lam : full_sample()) {
            SampleRun r{lam};
            try {
                r.result = solve_to(make_params(1, lam), 200);
                r.converged = true;
            } catch (const Error& e) {
                std::printf("  sample (%g, %g, %g) did not converge: %s\n", lam[0], lam[1], lam[2], e.what());
            }
            out.push_back(std::move(r));
        }
        return out;
    }();
    return runs;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

} // namespace

TEST(Acceptance, C01_HyperbolicExactness) {
    const ModelParams p = make_params(1, {1, 1, 1, 1});
    SolveOptions o;
    o.mesh_size = 200;
    const auto t0 = Clock::now();
    const SolveResult r = newton_solve(p, o);
    const double dt = seconds_since(t0);
    std::printf("  sup|y| %.3e  K0-1 %.3e  extra %.3e %.3e  time %.3f s\n", r.grid.y.lpNorm<Eigen::Infinity>(),
                r.K0 - 1, r.residual_extra[0], r.residual_extra[1], dt);
    EXPECT_LE(r.residual_solved, o.tol);
    EXPECT_LE(r.grid.y.lpNorm<Eigen::Infinity>(), 1e-10);
    EXPECT_NEAR(r.K0, 1.0, 1e-10);
    EXPECT_LE(r.residual_extra[0], 1e-10);
    EXPECT_LE(r.residual_extra[1], 1e-10);
    EXPECT_LE(dt, 1.0);
}

TEST(Acceptance, C02_Overdetermination) {
    const ModelParams p = make_params(1, {1.1, 1.05, 0.95, 1});
    std::array<double, 3> e{};
    const int Ns[3] = {100, 200, 400};
    for (int q = 0; q < 3; ++q) {
        const SolveResult r = solve_to(p, Ns[q]);
        e[q] = std::max(r.residual_extra[0], r.residual_extra[1]);
        std::printf("  N=%d  extra (%.3e, %.3e)\n", Ns[q], r.residual_extra[0], r.residual_extra[1]);
    }
    const double o1 = std::log2(e[0] / e[1]), o2 = std::log2(e[1] / e[2]);
    std::printf("  observed orders %.2f %.2f\n", o1, o2);
    EXPECT_LE(e[2], 1e-7);
    EXPECT_GE(o1, 3.5);
    EXPECT_GE(o2, 3.5);
}

TEST(Acceptance, C03_DualMethodOracle) {
    const ModelParams p = make_params(1, {0.95, 0.95, 0.95, 1});
    const BoundaryData bd = boundary_data(p);
    const auto t0 = Clock::now();
    const SolveResult c = solve_to(p, 400);
    const SolveResult s = shooting_oracle(bd, p, 0.5, build_mesh(400));
    const double dt = seconds_since(t0);
    const double d = (c.grid.y - s.grid.y).lpNorm<Eigen::Infinity>();
    std::printf("  sup|y_colloc - y_shoot| %.3e  K0 %.14f / %.14f  time %.2f s\n", d, c.K0, s.K0, dt);
    EXPECT_LE(d, 1e-6);
    EXPECT_LE(dt, 30.0);
}

TEST(Acceptance, C04_MonotonicitySuite) {
    int converged = 0;
    for (const auto& run : full_sample_runs()) {
        if (!run.converged) continue;
        ++converged;
        const BoundaryData bd = boundary_data(make_params(1, run.lambda));
        const MonotonicityReport m = check_monotonicity(run.result, bd);
        EXPECT_TRUE(m.condition_3_1_held && m.pairwise_distinct);
        EXPECT_GT(m.y1_min, 0.0) << run.lambda[0] << ' ' << run.lambda[1] << ' ' << run.lambda[2];
        for (const auto& s : m.ratio_signs) EXPECT_EQ(s.sign_changes, 0) << s.i << s.j;
    }
    std::printf("  %d of %zu sampled data converged\n", converged, full_sample_runs().size());
    EXPECT_GT(converged, 0);
}

TEST(Acceptance, C05_BoundsSuite) {
    double worst_cap = 1e300, worst_slope = 1e300, worst_K = -1e300, worst_y1 = 1e300;
    for (const auto& run : full_sample_runs()) {
        if (!run.converged) continue;
        const ModelParams p = make_params(1, run.lambda);
        const BoundsReport b = check_bounds(run.result, boundary_data(p), p);
        worst_cap = std::min(worst_cap, b.t_cap_margin);
        worst_slope = std::min(worst_slope, b.y1_min_slope);
        worst_K = std::max(worst_K, b.K_range[1]);
        worst_y1 = std::min(worst_y1, b.y1prime_cap_margin);
        EXPECT_GE(b.t_cap_margin, -1e-9);
        EXPECT_GE(b.y1_min_slope, -1e-11);
        EXPECT_LE(b.K_range[1], 1 + 1e-11);
        EXPECT_GE(b.y1prime_cap_margin, -1e-9);
    }
    std::printf("  min t-cap margin %.3e  min y1' %.3e  max K %.15f  min y1'-cap margin %.3e\n", worst_cap,
                worst_slope, worst_K, worst_y1);
}

TEST(Acceptance, C06_K0Bound) {
    const ModelParams p = make_params(1, {0.9, 0.9, 0.9, 1});
    const BoundaryData bd = boundary_data(p);
    const SolveResult r = solve_to(p, 400);
    const double bound = K0_lower_bound(bd, p.n, check_conditions(bd).tau_margin);
    std::printf("  K0 %.14f  computed bound %.14f  stated bound 0.98845\n", r.K0, bound);
    EXPECT_GE(r.K0, 0.98845);
    EXPECT_GE(r.K0, bound);
    EXPECT_LT(r.K0, 1.0);
}

TEST(Acceptance, C07_UniquenessProbe) {
    const ModelParams p = make_params(1, {0.97, 1.02, 0.99, 1});
    SolveOptions o;
    const Mesh mesh = build_mesh(o.mesh_size);
    std::vector<SolveResult> sols;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) sols.push_back(newton_solve(perturbed_guess(p, mesh, seed), p, o));
    double dmax = 0, vmax = 0;
    for (std::size_t a = 0; a < sols.size(); ++a)
        for (std::size_t b = a + 1; b < sols.size(); ++b) {
            dmax = std::max(dmax, (sols[a].grid.y - sols[b].grid.y).lpNorm<Eigen::Infinity>());
            vmax = std::max(vmax, compare_solutions(sols[a], sols[b]).max_V());
        }
    std::printf("  pairwise sup diff %.3e  max V %.3e\n", dmax, vmax);
    EXPECT_LE(dmax, 1e-8);
    EXPECT_LE(vmax, 1e-8);
}

TEST(Acceptance, C08_ReductionConsistency) {
    const SymmetryClass full = SymmetryClass::Full;
    {
        const std::array<double, 4> lam{0.95, 0.95, 0.95, 1};
        const SolveResult f = solve_to(make_params(1, lam, &full));
        const SolveResult r = solve_to(make_params(1, lam));
        double d = (f.grid.y.row(0) - r.grid.y.row(0)).lpNorm<Eigen::Infinity>();
        for (int j = 1; j < 4; ++j) d = std::max(d, (f.grid.y.row(j) - r.grid.y.row(1)).lpNorm<Eigen::Infinity>());
        const double d34 = (f.grid.y.row(2) - f.grid.y.row(3)).lpNorm<Eigen::Infinity>();
        std::printf("  Full vs Sp1: %.3e  |y3-y4| %.3e\n", d, d34);
        EXPECT_LE(d, 1e-8);
        EXPECT_LE(d34, 1e-9);
    }
    {
        const std::array<double, 4> lam{1.05, 0.95, 0.95, 1};
        const SolveResult f = solve_to(make_params(1, lam, &full));
        const SolveResult r = solve_to(make_params(1, lam));
        double d = 0;
        const int map[4] = {0, 1, 2, 2};
        for (int j = 0; j < 4; ++j) d = std::max(d, (f.grid.y.row(j) - r.grid.y.row(map[j])).lpNorm<Eigen::Infinity>());
        const double d34 = (f.grid.y.row(2) - f.grid.y.row(3)).lpNorm<Eigen::Infinity>();
        std::printf("  Full vs U1: %.3e  |y3-y4| %.3e\n", d, d34);
        EXPECT_LE(d, 1e-8);
        EXPECT_LE(d34, 1e-9);
    }
}

TEST(Acceptance, C09_Parity) {
    const SolveResult r = solve_to(make_params(1, {0.95, 0.95, 0.95, 1}), 400);
    const std::vector<double> d = parity_defect(r.grid, {1, 3, 5});
    std::printf("  parity defect a1 %.3e  a3 %.3e  a5 %.3e\n", d[0], d[1], d[2]);
    for (double v : d) EXPECT_LE(v, 1e-5);
}

TEST(Acceptance, C10_WeylDecay) {
    const ModelParams p = make_params(1, {0.9, 0.9, 0.9, 1});
    const ContinuationPath path = continuation_solve(boundary_data(p), 8, p, SolveOptions{});
    ASSERT_TRUE(path.reached);
    EXPECT_EQ(weyl_estimates(path.results.front()).eps_obs, 0.0);
    // literal form |y_j'| <= C eps_obs (1 - x^2) on [1/2, 1), every component
    std::array<std::vector<double>, 4> C;
    for (std::size_t s = 0; s < path.results.size(); ++s) {
        const SolveResult& r = path.results[s];
        const WeylReport w = weyl_estimates(r);
        EXPECT_TRUE(std::isfinite(w.eps_obs));
        EXPECT_LE(w.eps_obs, std::sqrt(336.0));
        std::array<double, 4> c{};
        if (w.eps_obs > 0) {
            for (int i = 1; i < r.grid.intervals(); ++i) {
                const double x = r.grid.x[i];
                if (x < 0.5) continue;
                const Vec4<double> dy =
                    expand_state(r.grid.cls, {r.grid.dy(0, i), r.grid.dy(1, i), 0.0, 0.0});
                for (int j = 0; j < 4; ++j) c[j] = std::max(c[j], std::abs(dy[j]) / (w.eps_obs * (1 - x * x)));
            }
            for (int j = 0; j < 4; ++j) C[j].push_back(c[j]);
        }
        std::printf("  s=%.3f eps %.4e  C(y1) %.4e  C(y2..y4) %.4e\n", path.steps[s].s, w.eps_obs, c[0], c[1]);
    }
    ASSERT_EQ(C[1].size(), path.results.size() - 1);
    for (int j = 0; j < 4; ++j) {
        const double mx = *std::max_element(C[j].begin(), C[j].end()), md = median(C[j]);
        EXPECT_TRUE(std::isfinite(mx));
        EXPECT_LE(mx, 10 * md) << "component " << j + 1;
    }
}

TEST(Acceptance, C11_U1SignRule) {
    const double t2 = 0.95, ts = t1_star(t2, 7);
    for (double d : {0.02, -0.02}) {
        const ModelParams p = make_params(1, {ts + d, t2, t2, 1});
        ASSERT_EQ(p.symmetry, SymmetryClass::SpTimesU1);
        const SolveResult r = solve_to(p, 400);
        const double expect = d > 0 ? -1.0 : 1.0;
        std::printf("  t1(0) = t1* %+g: y2' at first nodes %.3e %.3e %.3e\n", d, r.grid.dy(1, 1), r.grid.dy(1, 2),
                    r.grid.dy(1, 3));
        for (int i = 1; i <= 5; ++i) EXPECT_GT(expect * r.grid.dy(1, i), 0.0) << "node " << i;
    }
}

TEST(Acceptance, C12_Serialization) {
    const ModelParams p = make_params(1, {1.1, 1.05, 0.95, 1});
    SolveOptions o;
    o.mesh_size = 200;
    const ResultFile f{make_manifest(p, o, 4), p, o, 4, solve_to(p, 200)};
    const auto dir = std::filesystem::temp_directory_path() / "cce_acceptance";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "result.json").string();
    write_json(path, f);
    const ResultFile g = read_json(path);
    EXPECT_TRUE(bitwise_equal(f.result, g.result));
    EXPECT_TRUE(manifest_matches(g));
    const std::string frozen =
        "x,y1,y2,y3,y4,dy1,dy2,dy3,dy4,K,t1,t2,t3,I1,I2,I3,I4,res_extra_28,res_extra_212";
    auto header = [](const SolveResult& r) {
        std::ostringstream os;
        write_csv(os, r);
        return os.str().substr(0, os.str().find('\n'));
    };
    auto body = [](const SolveResult& r) {
        std::ostringstream os;
        write_csv(os, r);
        return os.str();
    };
    EXPECT_EQ(header(f.result), frozen);
    EXPECT_EQ(header(solve_to(make_params(1, {0.95, 0.95, 0.95, 1}), 100)), frozen);
    EXPECT_EQ(body(f.result), body(g.result));
    EXPECT_EQ(body(f.result), body(solve_to(p, 200)));
}

namespace {

class CriterionPrinter : public testing::EmptyTestEventListener {
public:
    void OnTestStart(const testing::TestInfo& info) override { std::printf("[%s]\n", info.name()); }
    void OnTestPartResult(const testing::TestPartResult& r) override {
        if (r.failed()) std::printf("  %s:%d: %s\n", r.file_name() ? r.file_name() : "?", r.line_number(), r.message());
    }
    void OnTestEnd(const testing::TestInfo& info) override {
        const std::string name = info.name();
        const int num = std::stoi(name.substr(1, 2));
        lines_.push_back("criterion " + std::to_string(num) + ": " + (info.result()->Passed() ? "PASS" : "FAIL") +
                         "  " + name.substr(4));
        std::printf("%s\n", lines_.back().c_str());
    }
    void OnTestProgramEnd(const testing::UnitTest&) override {
        std::printf("\nacceptance summary\n");
        for (const auto& l : lines_) std::printf("%s\n", l.c_str());
    }

private:
    std::vector<std::string> lines_;
};

} // namespace

int main(int argc, char** argv) {
    testing::InitGoogleTest(&argc, argv);
    testing::TestEventListeners& ls = testing::UnitTest::GetInstance()->listeners();
    delete ls.Release(ls.default_result_printer());
    ls.Append(new CriterionPrinter);
    return RUN_ALL_TESTS();
}
