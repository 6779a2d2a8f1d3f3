#include "cce/dual.hpp"
#include "cce/series.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cce;

TEST(Series, ExpOfVariable) {
    const Series<double> e = exp(Series<double>::variable(12, 0.0));
    double f = 1;
    for (int k = 0; k < 12; ++k) {
        if (k > 0) f *= k;
        EXPECT_NEAR(e[k], 1.0 / f, 1e-16);
    }
}

TEST(Series, Expm1MatchesExpMinusOne) {
    const Series<double> a = Series<double>::variable(10, 0.3) * Series<double>::variable(10, -0.2);
    const Series<double> d = expm1(a) - (exp(a) - 1.0);
    for (std::size_t k = 0; k < d.size(); ++k) EXPECT_NEAR(d[k], 0.0, 1e-15);
}

TEST(Series, DivisionInvertsProduct) {
    const Series<double> a = Series<double>::variable(8, 2.0);
    const Series<double> b = exp(Series<double>::variable(8, 0.1));
    const Series<double> q = (a * b) / b;
    for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(q[k], a[k], 1e-14);
    // 1/(1-s) = sum s^k
    const Series<double> g = 1.0 / (1.0 - Series<double>::variable(8, 0.0));
    for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(g[k], 1.0, 1e-15);
}

TEST(Series, Derivative) {
    Series<double> p(5);
    p[0] = 1;
    p[1] = 2;
    p[2] = 3;
    p[4] = 5;
    const Series<double> d = p.derivative();
    EXPECT_EQ(d[0], 2);
    EXPECT_EQ(d[1], 6);
    EXPECT_EQ(d[2], 0);
    EXPECT_EQ(d[3], 20);
}

TEST(Series, LongDoubleScalar) {
    const Series<long double> e = exp(Series<long double>::variable(6, 0.0L) * 2.0);
    EXPECT_NEAR(double(e[3]), 8.0 / 6.0, 1e-15);
}

TEST(Dual, ProductAndQuotientRules) {
    using D = Dual<2>;
    const D x = D::variable(1.5, 0), y = D::variable(-0.4, 1);
    const D f = x * y / (x + 2.0);
    EXPECT_NEAR(f.v, 1.5 * -0.4 / 3.5, 1e-15);
    EXPECT_NEAR(f.d[0], -0.4 * 2.0 / (3.5 * 3.5), 1e-15);
    EXPECT_NEAR(f.d[1], 1.5 / 3.5, 1e-15);
}

TEST(Dual, ExpAndExpm1) {
    using D = Dual<1>;
    const D x = D::variable(1e-9, 0);
    const D e = expm1(x);
    EXPECT_NEAR(e.v, std::expm1(1e-9), 1e-24);
    EXPECT_NEAR(e.d[0], std::exp(1e-9), 1e-15);
    EXPECT_NEAR(exp(D::variable(0.7, 0)).d[0], std::exp(0.7), 1e-15);
}
