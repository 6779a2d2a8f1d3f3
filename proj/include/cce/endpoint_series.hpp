#pragma once

// Truncated power-series solutions at the two singular endpoints.
//
// Origin (x = 0): y1 has indicial roots {0, 2}, each t-profile {0, n}. Free
// data are log K(0), the x^2 coefficient of y1 (fixed by the constraint unless
// overridden) and the x^n coefficients of the t-profiles. The x^n coefficient
// of y1 is not free: its indicial factor n(n-2) does not vanish.
//
// Center (x = 1, u = 1 - x): values and slopes vanish; each t-profile has one
// free u^2 coefficient, y1 has none.
//
// Coefficients are found order by order on the regularized equations
// (multiplied through by x(1-x^2)^2), where c_p first appears at a fixed
// power with a linear coefficient matrix M_p.

#include "errors.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "ode_system.hpp"
#include "series.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace cce {

struct SeriesExpansion {
    SymmetryClass cls = SymmetryClass::SpTimesSp1;
    int n = 7;
    int order = 0;
    Eigen::MatrixXd coeff;                  // m x (order+1)
    std::vector<std::pair<int, int>> free;  // (component, power)
    double trust = 0.1;
    int m() const { return unknown_count(cls); }
};

struct OriginExpansion : SeriesExpansion {};
struct CenterExpansion : SeriesExpansion {};

namespace detail {

// Regularized solved-set residual series for coefficient matrix C.
// At the center the independent variable is u with x = 1 - u.
inline std::vector<Series<double>> regularized_residual_series(const SeriesExpansion& e,
                                                                const Eigen::MatrixXd& C,
                                                                bool center, std::size_t L) {
    using S = Series<double>;
    S xs(L, center ? 1.0 : 0.0);
    if (L > 1) xs[1] = center ? -1.0 : 1.0;
    const Weights<S> W = regularized_weights(xs);
    const int m = e.m();
    Vec4<S> y, dy, ddy;
    for (int j = 0; j < 4; ++j) {
        y[j] = S(L);
        if (j < m)
            for (int p = 0; p < C.cols() && std::size_t(p) < L; ++p) y[j][p] = C(j, p);
        S d = y[j].derivative();
        ddy[j] = d.derivative();
        dy[j] = center ? -d : d;
    }
    Vec4<S> r{S(L), S(L), S(L), S(L)};
    solved_residuals(e.cls, e.n, W, y, dy, ddy, r);
    return {r.begin(), r.begin() + m};
}

inline bool is_free(const SeriesExpansion& e, int j, int p) {
    for (auto [fj, fp] : e.free)
        if (fj == j && fp == p) return true;
    return false;
}

// Fill every non-free coefficient from order `from` upwards.
inline void run_recursion(SeriesExpansion& e, bool center, int from) {
    const int m = e.m();
    const std::size_t L = e.order + 3;
    for (int p = from; p <= e.order; ++p) {
        const int row = center ? p : p - 1;  // power at which c_p first appears
        Eigen::MatrixXd C = e.coeff;
        std::vector<int> solved, fixed;
        for (int j = 0; j < m; ++j) (is_free(e, j, p) ? fixed : solved).push_back(j);
        for (int j : solved) C(j, p) = 0.0;
        const auto r0 = regularized_residual_series(e, C, center, L);
        Eigen::VectorXd R(m);
        for (int i = 0; i < m; ++i) R[i] = r0[i][row];
        Eigen::MatrixXd M(m, m);
        for (int j = 0; j < m; ++j) {
            Eigen::MatrixXd Cj = C;
            Cj(j, p) += 1.0;
            const auto rj = regularized_residual_series(e, Cj, center, L);
            for (int i = 0; i < m; ++i) M(i, j) = rj[i][row] - R[i];
        }
        if (solved.empty()) continue;
        if (R.cwiseAbs().maxCoeff() == 0.0) {
            for (int j : solved) e.coeff(j, p) = 0.0;  // exact zero (parity)
        } else {
            const int s = int(solved.size());
            Eigen::MatrixXd Ms(s, s);
            Eigen::VectorXd rhs(s);
            for (int a = 0; a < s; ++a) {
                rhs[a] = -R[solved[a]];
                for (int b = 0; b < s; ++b) Ms(a, b) = M(solved[a], solved[b]);
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(Ms);
            if (lu.rank() < s)
                throw DegenerateIndex("vanishing indicial factor at order " + std::to_string(p), p);
            const Eigen::VectorXd c = lu.solve(rhs);
            for (int a = 0; a < s; ++a) e.coeff(solved[a], p) = c[a] + 0.0;
        }
        // rows of free coefficients must be consistent
        for (int j : fixed) {
            double r = R[j];
            for (int b : solved) r += M(j, b) * e.coeff(b, p);
            const double scale = 1.0 + e.coeff.cwiseAbs().maxCoeff();
            if (std::abs(r) > 1e-9 * scale && std::abs(M(j, j)) < 1e-12)
                throw DegenerateIndex("resonant order " + std::to_string(p) + " is not solvable", p);
        }
    }
}

} // namespace detail

inline int default_origin_order(int n) { return std::max(8, n + 1); }
inline constexpr int kDefaultCenterOrder = 6;

// nonlocal: the x^n coefficients of the m-1 t-profiles.
// k2: optional x^2 coefficient of y1; default is the value the constraint
// forces, 2*Upsilon(0)/(n-1).
inline OriginExpansion expand_origin(const BoundaryData& bd, double K0, const std::vector<double>& nonlocal,
                                     int order, const ModelParams& params,
                                     std::optional<double> k2 = std::nullopt) {
    const int n = params.n, m = params.m();
    if (order > n + 2)
        throw Error(ErrorKind::UnsupportedOrder, "origin expansion order must be <= n+2");
    if (order < 2) throw Error(ErrorKind::UnsupportedOrder, "origin expansion order must be >= 2");
    if (!(K0 > 0)) throw Error(ErrorKind::InvalidParameter, "K0 must be positive");
    if (int(nonlocal.size()) != m - 1)
        throw Error(ErrorKind::InvalidParameter, "nonlocal needs one entry per t-profile");
    OriginExpansion e;
    e.cls = params.symmetry;
    e.n = n;
    e.order = order;
    e.coeff = Eigen::MatrixXd::Zero(m, order + 1);
    e.coeff(0, 0) = std::log(K0);
    for (int j = 1; j < m; ++j) e.coeff(j, 0) = std::log(bd.t0[j - 1]);
    e.free.push_back({0, 0});
    e.free.push_back({0, 2});
    for (int j = 1; j < m; ++j) e.free.push_back({j, 0});
    if (order >= n)
        for (int j = 1; j < m; ++j) {
            e.free.push_back({j, n});
            e.coeff(j, n) = nonlocal[j - 1];
        }
    Vec4<double> y0{};
    for (int j = 0; j < m; ++j) y0[j] = e.coeff(j, 0);
    e.coeff(0, 2) = k2 ? *k2 : 2 * upsilon_class(e.cls, y0, n) / (n - 1);
    detail::run_recursion(e, false, 1);
    return e;
}

// free: u^2 coefficients of the m-1 t-profiles
inline CenterExpansion expand_center(const std::vector<double>& free, int order, const ModelParams& params) {
    const int m = params.m();
    if (order < 3) throw Error(ErrorKind::UnsupportedOrder, "center expansion order must be >= 3");
    if (int(free.size()) != m - 1)
        throw Error(ErrorKind::InvalidParameter, "center data needs one entry per t-profile");
    CenterExpansion e;
    e.cls = params.symmetry;
    e.n = params.n;
    e.order = order;
    e.coeff = Eigen::MatrixXd::Zero(m, order + 1);
    for (int j = 0; j < m; ++j) {
        e.free.push_back({j, 0});
        e.free.push_back({j, 1});
    }
    for (int j = 1; j < m; ++j) {
        e.free.push_back({j, 2});
        e.coeff(j, 2) = free[j - 1];
    }
    detail::run_recursion(e, true, 2);
    return e;
}

namespace detail {
inline StateSample horner(const SeriesExpansion& e, double s, double sign) {
    StateSample r;
    for (int j = 0; j < e.m(); ++j) {
        double v = 0, d = 0, dd = 0;
        for (int p = e.order; p >= 0; --p) {
            dd = dd * s + 2 * d;
            d = d * s + v;
            v = v * s + e.coeff(j, p);
        }
        r.y[j] = v;
        r.dy[j] = sign * d;
        r.ddy[j] = dd;
    }
    return r;
}
} // namespace detail

inline StateSample evaluate_series(const OriginExpansion& e, double x) {
    if (!(x >= 0 && x <= e.trust * (1 + 1e-12))) throw Error(ErrorKind::Domain, "x outside the origin series trust radius");
    StateSample s = detail::horner(e, x, 1.0);
    s.x = x;
    return s;
}

inline StateSample evaluate_series(const CenterExpansion& e, double x) {
    const double u = 1 - x;
    if (!(u >= -1e-15 && u <= e.trust * (1 + 1e-12))) throw Error(ErrorKind::Domain, "x outside the center series trust radius");
    StateSample s = detail::horner(e, u, -1.0);
    s.x = x;
    return s;
}

// Least-squares polynomial fit of each profile to values and slopes at the
// first few mesh nodes (default 2(n+4)), in the scaled variable s = x/x_last.
// The fit runs through degree n+3 so the odd terms that legitimately start at
// x^n are not aliased into the low orders. Returns, per requested odd order,
// the largest |a_p| over components divided by the largest even coefficient
// magnitude of order >= 2.
inline std::vector<double> parity_defect(const SolutionGrid& sol, const std::vector<int>& orders, int nodes = 0) {
    const int deg = sol.n + 3;
    if (nodes <= 0) nodes = 2 * (deg + 1);
    if (nodes < deg + 4)
        throw Error(ErrorKind::InvalidParameter, "parity fit needs at least n+7 nodes");
    if (int(sol.x.size()) < nodes + 1)
        throw Error(ErrorKind::InsufficientResolution, "too few mesh nodes near x = 0 for the parity fit");
    for (int p : orders)
        if (p < 0 || p > deg) throw Error(ErrorKind::InvalidParameter, "parity order outside fit degree");
    std::vector<int> idx(nodes);
    for (int i = 0; i < nodes; ++i) idx[i] = i;
    const double window = sol.x[nodes - 1];
    if (window > 0.15)
        throw Error(ErrorKind::InsufficientResolution, "mesh too coarse near x = 0 for the parity fit");
    const int rows = 2 * int(idx.size());
    Eigen::MatrixXd A(rows, deg + 1);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const double s = sol.x[idx[r]] / window;
        for (int p = 0; p <= deg; ++p) {
            A(2 * r, p) = std::pow(s, p);
            A(2 * r + 1, p) = p == 0 ? 0.0 : p * std::pow(s, p - 1);
        }
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    std::vector<double> out(orders.size(), 0.0);
    for (int j = 0; j < sol.m(); ++j) {
        Eigen::VectorXd b(rows);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            b[2 * r] = sol.y(j, idx[r]);
            b[2 * r + 1] = sol.dy(j, idx[r]) * window;
        }
        const Eigen::VectorXd a = qr.solve(b);
        double scale = 0;
        for (int p = 2; p <= deg; p += 2) scale = std::max(scale, std::abs(a[p]));
        for (std::size_t q = 0; q < orders.size(); ++q) {
            const double v = std::abs(a[orders[q]]);
            out[q] = std::max(out[q], scale > 0 ? v / scale : v);
        }
    }
    return out;
}

} // namespace cce
