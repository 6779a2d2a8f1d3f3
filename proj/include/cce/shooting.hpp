#pragma once

// Two-sided shooting: endpoint series supply the state at the trust radius,
// an adaptive Runge-Kutta-Fehlberg 7(8) integration in long double carries it
// to the match point, and Newton (finite-difference Jacobian) closes the 2m
// matching conditions on values and slopes.
//
// Unknowns (2m): log K(0), the x^2 coefficient of y1 at the origin, the x^n
// coefficients of the t-profiles, and the u^2 coefficients at the center.
// The constraint is not imposed; its value at the match point and the gap
// between the found x^2 coefficient and the one the constraint predicts are
// reported as checks.

#include "bvp_solver.hpp"
#include "endpoint_series.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "ode_system.hpp"

#include <boost/numeric/odeint.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace cce {

struct ShootingOptions {
    int origin_order = -1;  // -1: n + 2
    int center_order = 10;
    double trust = 0.05;
    long double rtol = 1e-16L;
    long double atol = 1e-18L;
    double tol = 1e-11;  // matching residual target (integration noise sits near 1e-13)
    int max_iter = 30;
    int homotopy_steps = 4;
};

struct ShootingReport {
    SolveResult result;
    Eigen::VectorXd unknowns;
    double constraint_at_match = 0;  // printed-scale residual at the match point
    double k2_gap = 0;               // found x^2 coefficient minus 2*Upsilon(0)/(n-1)
};

namespace shoot {

using State = std::vector<long double>;

struct Rhs {
    SymmetryClass cls;
    int n;
    int m;
    void operator()(const State& s, State& ds, long double x) const {
        for (long double v : s)
            if (!(std::abs(v) <= 1e4L)) throw Error(ErrorKind::BranchViolation, "shooting integration blew up");
        Vec4<long double> y{}, dy{}, ddy{}, r{};
        for (int j = 0; j < m; ++j) {
            y[j] = s[j];
            dy[j] = s[m + j];
        }
        const long double q = 1 - x * x;
        const Weights<long double> W{1.0L, 1 / (x * q), 8 / (q * q), x * x};
        solved_residuals(cls, n, W, y, dy, ddy, r);
        for (int j = 0; j < m; ++j) {
            ds[j] = dy[j];
            ds[m + j] = -r[j];
        }
    }
};

// Integrates from x0 (state s0) through the listed points (monotone, starting
// at x0), writing the state at each.
inline std::vector<State> integrate(const Rhs& f, State s0, const std::vector<double>& xs, const ShootingOptions& o) {
    namespace ode = boost::numeric::odeint;
    using Stepper = ode::runge_kutta_fehlberg78<State, long double, State, long double>;
    std::vector<State> out;
    std::vector<long double> times(xs.begin(), xs.end());
    auto observer = [&](const State& s, long double) { out.push_back(s); };
    const long double dt = (times.back() - times.front()) / 200;
    ode::integrate_times(ode::make_controlled(o.atol, o.rtol, Stepper()), f, s0, times.begin(), times.end(), dt,
                         observer);
    return out;
}

} // namespace shoot

inline ShootingReport shooting_oracle_report(const BoundaryData& bd, const ModelParams& params, double match_point,
                                             const Mesh& mesh, const ShootingOptions& o = {}) {
    if (!(match_point > 0.2 && match_point < 0.8))
        throw Error(ErrorKind::InvalidParameter, "match point must lie in (0.2, 0.8)");
    const int m = params.m(), n = params.n;
    const int oorder = o.origin_order < 0 ? n + 2 : o.origin_order;
    const shoot::Rhs f{params.symmetry, n, m};
    const double a = o.trust, b = 1 - o.trust;
    BoundaryData bd_cur = bd;

    auto series_pair = [&](const Eigen::VectorXd& p) {
        std::vector<double> nl(m - 1), cf(m - 1);
        for (int j = 0; j < m - 1; ++j) {
            nl[j] = p[2 + j];
            cf[j] = p[1 + m + j];
        }
        OriginExpansion eo = expand_origin(bd_cur, std::exp(p[0]), nl, oorder, params, p[1]);
        CenterExpansion ec = expand_center(cf, o.center_order, params);
        eo.trust = ec.trust = o.trust;
        return std::make_pair(eo, ec);
    };
    auto start_state = [&](const StateSample& s) {
        shoot::State st(2 * m);
        for (int j = 0; j < m; ++j) {
            st[j] = s.y[j];
            st[m + j] = s.dy[j];
        }
        return st;
    };
    auto mismatch = [&](const Eigen::VectorXd& p) {
        auto [eo, ec] = series_pair(p);
        const auto L = shoot::integrate(f, start_state(evaluate_series(eo, a)), {a, match_point}, o);
        const auto R = shoot::integrate(f, start_state(evaluate_series(ec, b)), {b, match_point}, o);
        Eigen::VectorXd r(2 * m);
        for (int i = 0; i < 2 * m; ++i) r[i] = double(L.back()[i] - R.back()[i]);
        return r;
    };

    ShootingReport rep;
    auto newton = [&](Eigen::VectorXd& p, Eigen::VectorXd& r) {
        r = mismatch(p);
        rep.result.history.push_back(r.cwiseAbs().maxCoeff());
        int it = 0;
        while (r.cwiseAbs().maxCoeff() > o.tol) {
            if (it++ >= o.max_iter) throw NonConvergence("shooting Newton did not converge", rep.result.history);
            Eigen::MatrixXd J(2 * m, 2 * m);
            for (int c = 0; c < 2 * m; ++c) {
                const double h = 1e-7 * (1 + std::abs(p[c]));
                Eigen::VectorXd pp = p, pm = p;
                pp[c] += h;
                pm[c] -= h;
                J.col(c) = (mismatch(pp) - mismatch(pm)) / (2 * h);
            }
            const Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
            if (lu.rank() < 2 * m) throw SingularJacobian("singular matching Jacobian", -1, -1, 0.0);
            const Eigen::VectorXd d = -lu.solve(r);
            const double r0 = r.cwiseAbs().maxCoeff();
            double lam = 1;
            bool moved = false;
            for (int h = 0; h < 30 && !moved; ++h, lam *= 0.5) {
                try {
                    const Eigen::VectorXd pt = p + lam * d;
                    const Eigen::VectorXd rt = mismatch(pt);
                    if (rt.cwiseAbs().maxCoeff() < r0) {
                        p = pt;
                        r = rt;
                        moved = true;
                    }
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::BranchViolation) throw;
                }
            }
            if (!moved) {
                if (r0 <= 10 * o.tol) break;  // at the noise floor
                throw NonConvergence("shooting line search failed", rep.result.history);
            }
            rep.result.history.push_back(r.cwiseAbs().maxCoeff());
        }
        return it;
    };

    // Homotopy in the data from the round case, where p = 0 is exact, with a
    // secant predictor.
    Eigen::VectorXd p = Eigen::VectorXd::Zero(2 * m), p_prev = p, r;
    int it = 0;
    const BoundaryData target = bd;
    double s = 1.0, s_prev = 1.0, ds = 1.0 / o.homotopy_steps;
    int halvings = 0;
    while (s > 0) {
        double st = std::max(0.0, s - ds);
        if (st < 1e-12) st = 0.0;
        bd_cur = family_data(target, st);
        Eigen::VectorXd pt = p;
        if (s_prev != s) pt += (st - s) / (s - s_prev) * (p - p_prev);
        try {
            it += newton(pt, r);
            p_prev = p;
            p = pt;
            s_prev = s;
            s = st;
            halvings = 0;
            ds = std::min(1.0 / o.homotopy_steps, 2 * ds);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::BranchViolation && e.kind() != ErrorKind::NonConvergence) throw;
            if (++halvings > 12) throw NonConvergence(std::string("shooting homotopy stalled: ") + e.what(), rep.result.history);
            ds *= 0.5;
        }
    }
    bd_cur = target;
    r = mismatch(p);

    // sample the converged solution on the mesh
    auto [eo, ec] = series_pair(p);
    SolutionGrid g;
    g.cls = params.symmetry;
    g.n = n;
    g.stages = 0;
    g.x = mesh.nodes;
    const int N = int(g.x.size()) - 1;
    g.y.resize(m, N + 1);
    g.dy.resize(m, N + 1);
    auto put = [&](int i, const Vec4<double>& y, const Vec4<double>& dy) {
        for (int j = 0; j < m; ++j) {
            g.y(j, i) = y[j];
            g.dy(j, i) = dy[j];
        }
    };
    std::vector<double> left{a}, right{b};
    std::vector<int> li, ri;
    for (int i = 0; i <= N; ++i) {
        const double x = g.x[i];
        if (x <= a) {
            const StateSample s = evaluate_series(eo, x);
            put(i, s.y, s.dy);
        } else if (x >= b) {
            const StateSample s = evaluate_series(ec, x);
            put(i, s.y, s.dy);
        } else if (x <= match_point) {
            left.push_back(x);
            li.push_back(i);
        } else {
            ri.push_back(i);
        }
    }
    for (auto it2 = ri.rbegin(); it2 != ri.rend(); ++it2) right.push_back(g.x[*it2]);
    auto emit = [&](const std::vector<shoot::State>& S, const std::vector<int>& idx, bool reversed) {
        for (std::size_t q = 0; q < idx.size(); ++q) {
            const shoot::State& s = S[q + 1];
            const int i = reversed ? idx[idx.size() - 1 - q] : idx[q];
            Vec4<double> y{}, dy{};
            for (int j = 0; j < m; ++j) {
                y[j] = double(s[j]);
                dy[j] = double(s[m + j]);
            }
            put(i, y, dy);
        }
    };
    if (!li.empty()) emit(shoot::integrate(f, start_state(evaluate_series(eo, a)), left, o), li, false);
    if (!ri.empty()) emit(shoot::integrate(f, start_state(evaluate_series(ec, b)), right, o), ri, true);
    g.refresh_fields();

    rep.result.grid = std::move(g);
    rep.result.K0 = std::exp(p[0]);
    rep.result.iterations = it;
    rep.result.residual_solved = r.cwiseAbs().maxCoeff();
    rep.result.residual_extra = extra_residual_norms(rep.result.grid);
    rep.result.endpoint_slope = endpoint_slopes(rep.result.grid);
    rep.unknowns = p;
    {
        const auto L = shoot::integrate(f, start_state(evaluate_series(eo, a)), {a, match_point}, o);
        StateSample s;
        s.x = match_point;
        for (int j = 0; j < m; ++j) {
            s.y[j] = double(L.back()[j]);
            s.dy[j] = double(L.back()[m + j]);
        }
        rep.constraint_at_match = residual(s, params).r_extra[1];
        Vec4<double> y0{};
        for (int j = 0; j < m; ++j) y0[j] = eo.coeff(j, 0);
        rep.k2_gap = p[1] - 2 * upsilon_class(params.symmetry, y0, n) / (n - 1);
    }
    return rep;
}

inline SolveResult shooting_oracle(const BoundaryData& bd, const ModelParams& params, double match_point,
                                   const Mesh& mesh = build_mesh(400), const ShootingOptions& o = {}) {
    return shooting_oracle_report(bd, params, match_point, mesh, o).result;
}

} // namespace cce
