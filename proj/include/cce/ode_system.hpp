#pragma once

// Einstein ODE systems in log variables y1 = log K, y_{i+1} = log t_i.
//
// Every equation has the shape
//   w*(y'' + quadratic) - lin*(a + b x^2)*y' +/- force*(algebraic term)
// so one templated body serves both the printed scaling (w = 1,
// lin = 1/(x(1-x^2)), force = 8/(1-x^2)^2) and the regularized scaling used
// by the discretization and the endpoint series (everything multiplied by
// x(1-x^2)^2).

#include "dual.hpp"
#include "errors.hpp"
#include "model.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace cce {

template <class T>
struct Weights {
    T w, lin, force, x2;
};

inline Weights<double> printed_weights(double x) {
    const double q = 1 - x * x;
    return {1.0, 1.0 / (x * q), 8.0 / (q * q), x * x};
}

template <class T>
Weights<T> regularized_weights(const T& x) {
    const T q = 1.0 - x * x;
    return {x * q * q, q, 8.0 * x, x * x};
}

template <class T>
using Vec4 = std::array<T, 4>;

namespace detail {

// t_i - 1 computed without cancellation
template <class T>
T dm1(const T& y) {
    using std::expm1;
    return expm1(y);
}

template <class T>
T psi_full(const T& a, const T& b, const T& c, double n) {
    const T p = (n - 1) * a - b - c;
    const T q = -a + (n - 1) * b - c;
    const T r = -a - b + (n - 1) * c;
    const T s = a + b + c;
    return p * p + q * q + r * r + (n - 3) * s * s;
}

template <class T>
T psi_u1(const T& a, const T& b, double n) {
    const T p = (n - 1) * a - 2.0 * b;
    const T q = -a + (n - 2) * b;
    const T s = a + 2.0 * b;
    return p * p + 2.0 * q * q + (n - 3) * s * s;
}

// Upsilon = n(n-1) - S*P written as -n(n-1)*expm1(log S) - S*(P - n(n-1))
template <class T>
T upsilon_from(const T& logS, const T& Pm, double n) {
    using std::exp;
    using std::expm1;
    return -n * (n - 1) * expm1(logS) - exp(logS) * Pm;
}

template <class T>
T pm_full(const Vec4<T>& y, double n) {
    const T d1 = dm1(y[1]), d2 = dm1(y[2]), d3 = dm1(y[3]);
    using std::exp;
    const T pi = exp(y[1] + y[2] + y[3]);
    const T sd = d1 + d2 + d3;
    const T num = sd + (d1 * d2 + d1 * d3 + d2 * d3) + (d1 * d1 + d2 * d2 + d3 * d3) +
                  3.0 * d1 * d2 * d3;
    return -(n - 3) * sd - 2.0 * num / pi;
}

template <class T>
T pm_sp1(const T& y2, double n) {
    return -3 * (n - 3) * dm1(y2) + 6.0 * dm1(-y2);
}

template <class T>
T pm_u1(const T& y2, const T& y3, double n) {
    using std::exp;
    const T d1 = dm1(y2), d2 = dm1(y3);
    return -(n - 3) * (d1 + 2.0 * d2) + (-2.0 * d1 - 4.0 * d2 - 6.0 * d2 * d2) * exp(-2.0 * y3);
}

// bracket of the t_i equation; i selects the distinguished ratio
template <class T>
T bracket_full(const Vec4<T>& y, int i, double n) {
    using std::exp;
    const int j = 1 + (i % 3), k = 1 + ((i + 1) % 3);
    const T di = dm1(y[i]), dj = dm1(y[j]), dk = dm1(y[k]);
    const T pi = exp(y[1] + y[2] + y[3]);
    const T djk = dj - dk;
    return (n - 1) * di + 2.0 * dj + 2.0 * dk + 2.0 * dm1(T(y[i] - y[j] - y[k])) -
           2.0 * djk * djk / pi;
}

template <class T>
T bracket_sp1(const T& y2, double n) {
    return (n + 3) * dm1(y2) + 2.0 * dm1(T(-y2));
}

template <class T>
T bracket_u1_t1(const T& y2, const T& y3, double n) {
    return (n - 1) * dm1(y2) + 4.0 * dm1(y3) + 2.0 * dm1(T(y2 - 2.0 * y3));
}

template <class T>
T bracket_u1_t2(const T& y2, const T& y3, double n) {
    using std::exp;
    const T d1 = dm1(y2), d2 = dm1(y3);
    return (n + 1) * d2 + 2.0 * d1 - 2.0 * (d1 + d2 * d2) * exp(-2.0 * y3);
}

} // namespace detail

template <class T>
T psi(const T& dy2, const T& dy3, const T& dy4, int n) {
    return detail::psi_full(dy2, dy3, dy4, double(n));
}

// Psi expressed in the reduced derivative list of a class (dy[0] is y1')
template <class T>
T psi_class(SymmetryClass cls, const Vec4<T>& dy, int n) {
    const double nn = n;
    switch (cls) {
    case SymmetryClass::Full: return detail::psi_full(dy[1], dy[2], dy[3], nn);
    case SymmetryClass::SpTimesSp1: return 3 * nn * (nn - 3) * dy[1] * dy[1];
    case SymmetryClass::SpTimesU1: return detail::psi_u1(dy[1], dy[2], nn);
    }
    return T(0.0);
}

// Upsilon from the reduced state of a class
template <class T>
T upsilon_class(SymmetryClass cls, const Vec4<T>& y, int n) {
    const double nn = n;
    switch (cls) {
    case SymmetryClass::Full:
        return detail::upsilon_from(T((y[1] + y[2] + y[3] - y[0]) / nn), detail::pm_full(y, nn), nn);
    case SymmetryClass::SpTimesSp1:
        return detail::upsilon_from(T((3.0 * y[1] - y[0]) / nn), detail::pm_sp1(y[1], nn), nn);
    case SymmetryClass::SpTimesU1:
        return detail::upsilon_from(T((y[1] + 2.0 * y[2] - y[0]) / nn), detail::pm_u1(y[1], y[2], nn),
                                    nn);
    }
    return T(0.0);
}

// The U1 bracket exactly as printed, with t_1 t_2^2 in the last denominator.
// Not reduction-consistent with the full Upsilon; kept for the record.
inline double u1_upsilon_as_printed(double K, double t1, double t2, int n) {
    const double nn = n;
    const double S = std::pow(t1 * t2 * t2 / K, 1.0 / nn);
    return nn * (nn - 1) - S * ((nn - 3) * (nn + 5) - (nn - 3) * (t1 + 2 * t2) +
                                2 * (4 * t2 - t1) / (t1 * t2 * t2));
}

// Solved-set residuals (first m entries of r) in the given weights.
template <class T>
void solved_residuals(SymmetryClass cls, int n, const Weights<T>& W, const Vec4<T>& y,
                      const Vec4<T>& dy, const Vec4<T>& ddy, Vec4<T>& r) {
    using std::exp;
    const double nn = n;
    const T& x2 = W.x2;
    const T ps = psi_class(cls, dy, n);
    // K equation of the solved set
    T q1;
    if (cls == SymmetryClass::SpTimesSp1)
        q1 = (dy[0] * dy[0] + 3 * (nn - 3) * dy[1] * dy[1]) / (2 * nn);
    else
        q1 = (nn * dy[0] * dy[0] + ps) / (2 * nn * nn);
    r[0] = W.w * (ddy[0] + q1) - W.lin * (1.0 + 3.0 * x2) * dy[0];

    const T lin_t = W.lin * ((nn - 1) + (nn + 1) * x2);
    auto t_eq = [&](int j, const T& S, const T& B) {
        return W.w * (ddy[j] + 0.5 * dy[0] * dy[j]) - lin_t * dy[j] - W.force * S * B;
    };
    switch (cls) {
    case SymmetryClass::Full: {
        const T S = exp((y[1] + y[2] + y[3] - y[0]) / nn);
        for (int i = 1; i <= 3; ++i) r[i] = t_eq(i, S, detail::bracket_full(y, i, nn));
        break;
    }
    case SymmetryClass::SpTimesSp1: {
        const T S = exp((3.0 * y[1] - y[0]) / nn);
        r[1] = t_eq(1, S, detail::bracket_sp1(y[1], nn));
        break;
    }
    case SymmetryClass::SpTimesU1: {
        const T S = exp((y[1] + 2.0 * y[2] - y[0]) / nn);
        r[1] = t_eq(1, S, detail::bracket_u1_t1(y[1], y[2], nn));
        r[2] = t_eq(2, S, detail::bracket_u1_t2(y[1], y[2], nn));
        break;
    }
    }
}

// Unused equations: e[0] is the second K equation (the one carrying Upsilon),
// e[1] the first-order constraint.
template <class T>
void extra_residuals(SymmetryClass cls, int n, const Weights<T>& W, const Vec4<T>& y,
                     const Vec4<T>& dy, const Vec4<T>& ddy, std::array<T, 2>& e) {
    const double nn = n;
    const T& x2 = W.x2;
    const T ups = upsilon_class(cls, y, n);
    const T ps = psi_class(cls, dy, n);
    e[0] = W.w * (ddy[0] + 0.5 * dy[0] * dy[0]) -
           W.lin * ((2 * nn - 1) + (2 * nn + 1) * x2) * dy[0] + W.force * ups;
    T quad;
    if (cls == SymmetryClass::SpTimesSp1)
        quad = dy[0] * dy[0] - 3 * (nn - 3) / (nn - 1) * dy[1] * dy[1];
    else
        quad = dy[0] * dy[0] - ps / (nn * (nn - 1));
    e[1] = W.w * quad - 4 * nn * W.lin * (1.0 + x2) * dy[0] + (2 * nn / (nn - 1)) * W.force * ups;
}

struct StateSample {
    double x = 0.5;
    Vec4<double> y{}, dy{}, ddy{};
};

struct ResidualVector {
    Eigen::VectorXd r;
    std::array<double, 2> r_extra{};
};

struct JacobianBlock {
    Eigen::MatrixXd d_r_d_y, d_r_d_dy, d_r_d_ddy;
};

struct DerivedFields {
    double K = 1;
    std::array<double, 3> t{1, 1, 1};
    std::array<double, 4> I{1, 1, 1, 1};
    double psi = 0;
    double upsilon = 0;
};

// Replicates reduced-class ratios into all three slots.
inline Vec4<double> expand_state(SymmetryClass cls, const Vec4<double>& y) {
    switch (cls) {
    case SymmetryClass::Full: return y;
    case SymmetryClass::SpTimesSp1: return {y[0], y[1], y[1], y[1]};
    case SymmetryClass::SpTimesU1: return {y[0], y[1], y[2], y[2]};
    }
    return y;
}

inline DerivedFields derived_fields(const Vec4<double>& yr, int n, SymmetryClass cls,
                                    const Vec4<double>* dyr = nullptr) {
    const Vec4<double> y = expand_state(cls, yr);
    DerivedFields f;
    f.K = std::exp(y[0]);
    for (int i = 0; i < 3; ++i) f.t[i] = std::exp(y[i + 1]);
    const double logI4 = (y[0] - y[1] - y[2] - y[3]) / n;
    f.I[3] = std::exp(logI4);
    for (int i = 0; i < 3; ++i) f.I[i] = std::exp(y[i + 1] + logI4);
    if (dyr) f.psi = psi_class(cls, *dyr, n);
    f.upsilon = upsilon_class(cls, yr, n);
    return f;
}

// Upsilon from K and t directly (three ratios, any class).
inline double upsilon(const DerivedFields& f, int n) {
    const Vec4<double> y{std::log(f.K), std::log(f.t[0]), std::log(f.t[1]), std::log(f.t[2])};
    return upsilon_class(SymmetryClass::Full, y, n);
}

inline void require_interior(double x) {
    if (!(x > 0 && x < 1)) throw Error(ErrorKind::Domain, "x must lie in (0,1)");
}

inline ResidualVector residual(const StateSample& s, const ModelParams& p) {
    require_interior(s.x);
    const auto W = printed_weights(s.x);
    Vec4<double> r{};
    std::array<double, 2> e{};
    solved_residuals(p.symmetry, p.n, W, s.y, s.dy, s.ddy, r);
    extra_residuals(p.symmetry, p.n, W, s.y, s.dy, s.ddy, e);
    ResidualVector out;
    const int m = p.m();
    out.r.resize(m);
    for (int j = 0; j < m; ++j) out.r[j] = r[j];
    out.r_extra = e;
    return out;
}

using Dual12 = Dual<12>;

// Partials of the solved set with an arbitrary weight family.
template <class WeightFn>
JacobianBlock jacobian_with(SymmetryClass cls, int n, const StateSample& s, WeightFn weights) {
    const int m = unknown_count(cls);
    Vec4<Dual12> y, dy, ddy;
    for (int j = 0; j < 4; ++j) {
        y[j] = j < m ? Dual12::variable(s.y[j], j) : Dual12(0.0);
        dy[j] = j < m ? Dual12::variable(s.dy[j], m + j) : Dual12(0.0);
        ddy[j] = j < m ? Dual12::variable(s.ddy[j], 2 * m + j) : Dual12(0.0);
    }
    const Weights<double> w = weights(s.x);
    const Weights<Dual12> W{w.w, w.lin, w.force, w.x2};
    Vec4<Dual12> r;
    solved_residuals(cls, n, W, y, dy, ddy, r);
    JacobianBlock J;
    J.d_r_d_y.resize(m, m);
    J.d_r_d_dy.resize(m, m);
    J.d_r_d_ddy.resize(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            J.d_r_d_y(i, j) = r[i].d[j];
            J.d_r_d_dy(i, j) = r[i].d[m + j];
            J.d_r_d_ddy(i, j) = r[i].d[2 * m + j];
        }
    return J;
}

inline JacobianBlock jacobian(const StateSample& s, const ModelParams& p) {
    require_interior(s.x);
    return jacobian_with(p.symmetry, p.n, s, printed_weights);
}

// Root of the constraint for y1' on the branch vanishing at x = 0.
inline double y1prime_closed_form(double x, const DerivedFields& /*f*/, double psi_val,
                                  double upsilon_val, int n) {
    require_interior(x);
    const double nn = n, x2 = x * x, q = 1 - x2;
    const double a = 2 * nn * (1 + x2);
    const double disc = a * a + x2 * q * q * psi_val / (nn * (nn - 1)) - 16 * nn * x2 * upsilon_val / (nn - 1);
    if (disc < 0) throw Error(ErrorKind::BranchViolation, "negative discriminant in y1' closed form");
    // a - sqrt(disc) rewritten to avoid cancellation
    const double num = a * a - disc;
    return num / ((a + std::sqrt(disc)) * x * q);
}

} // namespace cce
