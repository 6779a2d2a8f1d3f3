#include "cce/bvp_solver.hpp"
#include "cce/shooting.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cce;

TEST(Shooting, RoundCase) {
    const ModelParams p = make_params(1, {1, 1, 1, 1});
    const SolveResult r = shooting_oracle(boundary_data(p), p, 0.5, build_mesh(100));
    EXPECT_NEAR(r.K0, 1.0, 1e-12);
    EXPECT_LT(r.grid.y.lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Shooting, AgreesWithCollocationSp1) {
    const ModelParams p = make_params(1, {0.95, 0.95, 0.95, 1});
    const BoundaryData bd = boundary_data(p);
    const Mesh mesh = build_mesh(400);
    const ShootingReport rep = shooting_oracle_report(bd, p, 0.5, mesh);
    SolveOptions o;
    const SolveResult c = continuation_solve(bd, 4, p, o).final_result();
    EXPECT_LT((rep.result.grid.y - c.grid.y).lpNorm<Eigen::Infinity>(), 1e-6);
    EXPECT_NEAR(rep.result.K0, c.K0, 1e-8);
    EXPECT_LT(std::abs(rep.constraint_at_match), 1e-9);
    EXPECT_LT(std::abs(rep.k2_gap), 1e-6);
    EXPECT_EQ(rep.unknowns.size(), 2 * p.m());
}

TEST(Shooting, MatchPointPrecondition) {
    const ModelParams p = make_params(1, {0.95, 0.95, 0.95, 1});
    for (double mp : {0.1, 0.2, 0.8, 0.95}) {
        try {
            shooting_oracle(boundary_data(p), p, mp, build_mesh(40));
            FAIL() << mp;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidParameter);
        }
    }
}
