#include "cce/ode_system.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace cce;

// Reference values from tests/oracle/printed_system.py (mpmath, 40 digits).

TEST(OdeSystem, DerivedFieldsRound) {
    const DerivedFields f = derived_fields({0, 0, 0, 0}, 7, SymmetryClass::Full);
    EXPECT_EQ(f.K, 1.0);
    for (double t : f.t) EXPECT_EQ(t, 1.0);
    for (double I : f.I) EXPECT_EQ(I, 1.0);
    EXPECT_EQ(f.upsilon, 0.0);
}

TEST(OdeSystem, DerivedFieldsFormula) {
    const DerivedFields a = derived_fields({std::log(0.5), 0, 0, 0}, 7, SymmetryClass::Full);
    EXPECT_NEAR(a.K, 0.5, 1e-15);
    EXPECT_NEAR(a.I[3], std::pow(0.5, 1.0 / 7), 1e-15);
    const DerivedFields b =
        derived_fields({std::log(0.9), std::log(1.1), std::log(1.05), std::log(0.95)}, 7, SymmetryClass::Full);
    EXPECT_NEAR(b.I[3], 0.97208731123953901, 1e-15);
    const double K = b.I[0] * b.I[1] * b.I[2] * std::pow(b.I[3], 4);
    EXPECT_NEAR(K / b.K, 1.0, 1e-12);
}

TEST(OdeSystem, DerivedFieldsReplicatesReducedClasses) {
    const DerivedFields s = derived_fields({-0.01, 0.03, 0, 0}, 7, SymmetryClass::SpTimesSp1);
    EXPECT_EQ(s.t[0], s.t[1]);
    EXPECT_EQ(s.t[1], s.t[2]);
    const DerivedFields u = derived_fields({-0.01, 0.03, -0.02, 0}, 7, SymmetryClass::SpTimesU1);
    EXPECT_EQ(u.t[1], u.t[2]);
    EXPECT_NE(u.t[0], u.t[1]);
}

TEST(OdeSystem, Psi) {
    EXPECT_EQ(psi(0.0, 0.0, 0.0, 7), 0.0);
    for (double s : {0.3, -1.7})
        for (int n : {7, 11}) EXPECT_NEAR(psi(s, s, s, n), 3.0 * n * (n - 3) * s * s, 1e-12);
    EXPECT_NEAR(psi(1.0, 2.0, -1.0, 7), 266.0, 1e-12);
    std::mt19937 rng(3);
    std::normal_distribution<double> d;
    for (int i = 0; i < 100; ++i) EXPECT_GE(psi(d(rng), d(rng), d(rng), 7), 0.0);
}

TEST(OdeSystem, Upsilon) {
    DerivedFields f;
    EXPECT_NEAR(upsilon(f, 7), 0.0, 1e-13);
    f.K = 0.9;
    EXPECT_NEAR(upsilon(f, 7), -0.63694455533063354, 1e-13);
    EXPECT_NEAR(upsilon(f, 7), 42 * (1 - std::pow(0.9, -1.0 / 7)), 1e-13);
    for (double c : {0.8, 1.1, 1.4}) {
        f.K = 1;
        f.t = {c, c, c};
        const double expect = 42 - std::pow(c, 3.0 / 7) * (4 * (12 - 3 * c) + 6 / c);
        EXPECT_NEAR(upsilon(f, 7), expect, 1e-12);
    }
}

TEST(OdeSystem, ResidualRoundIsZero) {
    for (SymmetryClass c : {SymmetryClass::Full, SymmetryClass::SpTimesSp1, SymmetryClass::SpTimesU1}) {
        ModelParams p;
        p.symmetry = c;
        StateSample s;
        s.x = 0.5;
        const ResidualVector r = residual(s, p);
        for (double v : r.r) EXPECT_EQ(v, 0.0);
        EXPECT_EQ(r.r_extra[0], 0.0);
        EXPECT_EQ(r.r_extra[1], 0.0);
    }
}

TEST(OdeSystem, ResidualPsiTermOnly) {
    ModelParams p;
    p.symmetry = SymmetryClass::Full;
    StateSample s;
    s.x = 0.5;
    const double s0 = 0.2;
    s.dy = {0, s0, s0, s0};
    EXPECT_NEAR(residual(s, p).r[0], 3.0 * 7 * 4 * s0 * s0 / (2 * 49), 1e-15);
}

TEST(OdeSystem, ResidualMatchesIndependentTranscription) {
    const ModelParams p = make_params(1, {1.1, 1.05, 0.95, 1});
    StateSample s;
    s.x = 0.37;
    s.y = {-0.012, 0.031, -0.017, 0.008};
    s.dy = {0.021, -0.043, 0.019, 0.011};
    s.ddy = {0.05, -0.12, 0.07, 0.02};
    const ResidualVector r = residual(s, p);
    const double ref[4] = {-0.041581560545425509, -1.8809976704897911, 1.0736093077158301, -0.88163423642114629};
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(r.r[j], ref[j], 1e-13 * (1 + std::abs(ref[j])));
    EXPECT_NEAR(r.r_extra[0], -1.6598568378463077, 1e-13);
    EXPECT_NEAR(r.r_extra[1], -3.775975647035392, 1e-13);
}

TEST(OdeSystem, ResidualDomain) {
    ModelParams p;
    StateSample s;
    s.x = 0.0;
    EXPECT_THROW(residual(s, p), Error);
    s.x = 1.0;
    EXPECT_THROW(residual(s, p), Error);
}

TEST(OdeSystem, ReducedClassesMatchFullOnSymmetricStates) {
    const SymmetryClass full = SymmetryClass::Full;
    StateSample r3;
    r3.x = 0.42;
    r3.y = {-0.02, 0.04, 0.04, 0.04};
    r3.dy = {0.03, -0.05, -0.05, -0.05};
    r3.ddy = {0.1, 0.2, 0.2, 0.2};
    const ResidualVector f = residual(r3, make_params(1, {1, 1, 1, 1}, &full));
    StateSample rs = r3;
    rs.y = {-0.02, 0.04, 0, 0};
    rs.dy = {0.03, -0.05, 0, 0};
    rs.ddy = {0.1, 0.2, 0, 0};
    const ResidualVector s = residual(rs, make_params(1, {1, 1, 1, 1}));
    EXPECT_NEAR(s.r[0], f.r[0], 1e-13);
    EXPECT_NEAR(s.r[1], f.r[1], 1e-13);
    EXPECT_NEAR(s.r_extra[0], f.r_extra[0], 1e-13);
    EXPECT_NEAR(s.r_extra[1], f.r_extra[1], 1e-13);

    StateSample u4 = r3;
    u4.y = {-0.02, 0.07, 0.04, 0.04};
    u4.dy = {0.03, -0.01, -0.05, -0.05};
    u4.ddy = {0.1, 0.3, 0.2, 0.2};
    const ResidualVector fu = residual(u4, make_params(1, {1.1, 1, 1, 1}, &full));
    StateSample u3 = u4;
    u3.y = {-0.02, 0.07, 0.04, 0};
    u3.dy = {0.03, -0.01, -0.05, 0};
    u3.ddy = {0.1, 0.3, 0.2, 0};
    const ResidualVector su = residual(u3, make_params(1, {1.1, 1, 1, 1}));
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(su.r[j], fu.r[j], 1e-13);
    EXPECT_NEAR(su.r_extra[0], fu.r_extra[0], 1e-13);
    EXPECT_NEAR(su.r_extra[1], fu.r_extra[1], 1e-13);
}

TEST(OdeSystem, PrintedU1UpsilonBreaksReduction) {
    const double K = 0.97, t1 = 1.08, t2 = 0.93;
    const double consistent = upsilon_class(SymmetryClass::SpTimesU1, Vec4<double>{std::log(K), std::log(t1), std::log(t2), 0}, 7);
    DerivedFields f;
    f.K = K;
    f.t = {t1, t2, t2};
    EXPECT_NEAR(consistent, upsilon(f, 7), 1e-13);
    EXPECT_GT(std::abs(u1_upsilon_as_printed(K, t1, t2, 7) - consistent), 1e-3);
    EXPECT_NEAR(u1_upsilon_as_printed(1, 1, 1, 7), 0.0, 1e-13);
}

TEST(OdeSystem, JacobianStructure) {
    ModelParams p;
    p.symmetry = SymmetryClass::Full;
    StateSample s;
    s.x = 0.5;
    const JacobianBlock J = jacobian(s, p);
    EXPECT_TRUE(J.d_r_d_ddy.isApprox(Eigen::MatrixXd::Identity(4, 4)));
    const double x = 0.5, expect = -(6 + 8 * x * x) / (x * (1 - x * x));
    EXPECT_NEAR(J.d_r_d_dy(1, 1), expect, 1e-13);
}

TEST(OdeSystem, JacobianMatchesCentralDifferences) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-0.2, 0.2), ux(0.1, 0.9);
    for (SymmetryClass c : {SymmetryClass::Full, SymmetryClass::SpTimesSp1, SymmetryClass::SpTimesU1}) {
        ModelParams p;
        p.symmetry = c;
        const int m = p.m();
        for (int trial = 0; trial < 5; ++trial) {
            StateSample s;
            s.x = ux(rng);
            for (int j = 0; j < m; ++j) {
                s.y[j] = u(rng);
                s.dy[j] = u(rng);
                s.ddy[j] = u(rng);
            }
            const JacobianBlock J = jacobian(s, p);
            for (int which = 0; which < 3; ++which)
                for (int j = 0; j < m; ++j) {
                    StateSample a = s, b = s;
                    double* pa = which == 0 ? &a.y[j] : which == 1 ? &a.dy[j] : &a.ddy[j];
                    double* pb = which == 0 ? &b.y[j] : which == 1 ? &b.dy[j] : &b.ddy[j];
                    const double h = 1e-6 * (1 + std::abs(*pa));
                    *pa += h;
                    *pb -= h;
                    const auto ra = residual(a, p).r, rb = residual(b, p).r;
                    const Eigen::MatrixXd& M = which == 0 ? J.d_r_d_y : which == 1 ? J.d_r_d_dy : J.d_r_d_ddy;
                    for (int i = 0; i < m; ++i) {
                        const double fd = (ra[i] - rb[i]) / (2 * h);
                        EXPECT_NEAR(M(i, j), fd, 1e-6 * (1 + std::abs(fd)));
                    }
                }
        }
    }
}

TEST(OdeSystem, Y1PrimeClosedForm) {
    DerivedFields f;
    EXPECT_EQ(y1prime_closed_form(0.4, f, 0, 0, 7), 0.0);
    EXPECT_NEAR(y1prime_closed_form(0.3, f, 1, 2, 7), 0.40451718319303336, 1e-14);
    const double neg = y1prime_closed_form(0.3, f, 0, -2, 7);
    EXPECT_LT(neg, 0.0);
    EXPECT_TRUE(std::isfinite(neg));
    EXPECT_THROW(y1prime_closed_form(0.5, f, 0, 1e6, 7), Error);
    EXPECT_THROW(y1prime_closed_form(1.0, f, 0, 0, 7), Error);
}

TEST(OdeSystem, Y1PrimeClosedFormSatisfiesConstraint) {
    // plugging the root back into the constraint gives zero
    const ModelParams p = make_params(1, {1.1, 1.05, 0.95, 1});
    StateSample s;
    s.x = 0.6;
    s.y = {-0.01, 0.05, 0.02, -0.03};
    s.dy = {0, 0.04, -0.02, 0.03};
    const DerivedFields f = derived_fields(s.y, 7, SymmetryClass::Full, &s.dy);
    s.dy[0] = y1prime_closed_form(s.x, f, f.psi, f.upsilon, 7);
    EXPECT_NEAR(residual(s, p).r_extra[1], 0.0, 1e-11);
}
