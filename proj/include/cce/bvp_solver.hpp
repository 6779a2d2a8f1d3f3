#pragma once

// Gauss-Legendre collocation for the second-order solved set, damped Newton
// with a banded LU, and continuation in the boundary data from the round case.

#include "banded.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "ode_system.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace cce {

struct Mesh {
    std::vector<double> nodes;
    double grading = 1.0;
};

// x = xi^g / (xi^g + (1-xi)^g) on a uniform xi grid; g = 1 is uniform, larger g
// clusters nodes at both ends (first spacing ~ N^-g).
inline Mesh build_mesh(int N, double grading = 1.0) {
    if (N < 16) throw Error(ErrorKind::InvalidParameter, "mesh needs N >= 16");
    if (!(grading >= 1.0)) throw Error(ErrorKind::InvalidParameter, "grading must be >= 1");
    Mesh m;
    m.grading = grading;
    m.nodes.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
        const double xi = double(i) / N;
        const double a = std::pow(xi, grading), b = std::pow(1 - xi, grading);
        m.nodes[i] = a / (a + b);
    }
    m.nodes.front() = 0.0;
    m.nodes.back() = 1.0;
    return m;
}

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 50;
    double armijo = 1e-4;     // sufficient-decrease constant
    int max_halvings = 30;    // line-search depth
    int mesh_size = 400;
    double grading = 1.0;
    int stages = 3;           // Gauss points per interval
    double series_trust = 0.05;
    bool polish = true;       // one extra full step after reaching tol
};

struct SolveResult {
    SolutionGrid grid;
    double K0 = 1.0;
    double residual_solved = 0.0;
    std::array<double, 2> residual_extra{};
    std::array<double, 2> endpoint_slope{};  // max_j |y_j'| at x = 0 and x = 1, not imposed except y1'(1)
    int iterations = 0;
    std::vector<double> history;
};

inline std::array<double, 2> endpoint_slopes(const SolutionGrid& g) {
    std::array<double, 2> s{0.0, 0.0};
    const int N = g.intervals();
    for (int j = 0; j < g.m(); ++j) {
        s[0] = std::max(s[0], std::abs(g.dy(j, 0)));
        s[1] = std::max(s[1], std::abs(g.dy(j, N)));
    }
    return s;
}

namespace colloc {

struct Layout {
    int m, k, N;
    int block() const { return (2 + k) * m; }
    int size() const { return N * block() + 2 * m; }
    int Y(int i, int j) const { return i * block() + j; }
    int V(int i, int j) const { return i * block() + m + j; }
    int A(int i, int l, int j) const { return i * block() + 2 * m + l * m + j; }
    int bandwidth() const { return (3 + k) * m; }
};

// Collocation rows are the printed equations multiplied by x(1-x^2).
inline Weights<double> row_weights(double x) {
    const double q = 1 - x * x;
    return {x * q, 1.0, 8.0 * x / q, x * x};
}

struct PointEval {
    Vec4<double> r{};
    Eigen::Matrix<double, 4, 4> Jy, Jdy, Jddy;
};

inline PointEval eval_point(SymmetryClass cls, int n, double x, const Vec4<double>& y, const Vec4<double>& dy,
                            const Vec4<double>& ddy, bool with_jac) {
    PointEval out;
    const int m = unknown_count(cls);
    const Weights<double> w = row_weights(x);
    if (!with_jac) {
        solved_residuals(cls, n, w, y, dy, ddy, out.r);
        return out;
    }
    Vec4<Dual12> Y, D, DD;
    for (int j = 0; j < 4; ++j) {
        Y[j] = j < m ? Dual12::variable(y[j], j) : Dual12(0.0);
        D[j] = j < m ? Dual12::variable(dy[j], m + j) : Dual12(0.0);
        DD[j] = j < m ? Dual12::variable(ddy[j], 2 * m + j) : Dual12(0.0);
    }
    const Weights<Dual12> W{w.w, w.lin, w.force, w.x2};
    Vec4<Dual12> r;
    solved_residuals(cls, n, W, Y, D, DD, r);
    for (int i = 0; i < m; ++i) {
        out.r[i] = r[i].v;
        for (int j = 0; j < m; ++j) {
            out.Jy(i, j) = r[i].d[j];
            out.Jdy(i, j) = r[i].d[m + j];
            out.Jddy(i, j) = r[i].d[2 * m + j];
        }
    }
    return out;
}

struct System {
    SymmetryClass cls;
    int n;
    int k;
    std::vector<double> x;
    BoundaryData bd;
    Layout lay() const { return {unknown_count(cls), k, int(x.size()) - 1}; }
};

// Largest |y| accepted in a Newton trial state; beyond it a ratio has
// effectively left (0, inf).
inline constexpr double kLogCap = 200.0;

// Returns the first node whose state is inadmissible, or -1.
inline int inadmissible_node(const System& S, const std::vector<double>& z) {
    const Layout L = S.lay();
    for (int i = 0; i <= L.N; ++i)
        for (int j = 0; j < L.m; ++j) {
            const double v = z[L.Y(i, j)];
            if (!std::isfinite(v) || std::abs(v) > kLogCap || !std::isfinite(z[L.V(i, j)])) return i;
        }
    return -1;
}

// Residual (and optionally banded Jacobian) of the discrete system.
inline std::vector<double> assemble(const System& S, const std::vector<double>& z, BandedMatrix* J) {
    const Layout L = S.lay();
    const int m = L.m, k = L.k;
    const CollocationBasis& b = basis(k);
    std::vector<double> F(L.size(), 0.0);
    if (J) {
        *J = BandedMatrix(L.size(), L.bandwidth(), L.bandwidth());
    }
    int row = 0;
    // x = 0: prescribed ratios. y1(0) stays free (it carries K(0)).
    for (int j = 1; j < m; ++j, ++row) {
        F[row] = z[L.Y(0, j)] - std::log(S.bd.t0[j - 1]);
        if (J) J->add(row, L.Y(0, j), 1.0);
    }

    std::vector<double> psi1(k), dpsi1(k);
    for (int l = 0; l < k; ++l) {
        psi1[l] = CollocationBasis::poly(b.psi[l], 1.0);
        dpsi1[l] = CollocationBasis::poly(b.dpsi[l], 1.0);
    }
    std::vector<std::vector<double>> psiq(k, std::vector<double>(k)), dpsiq(k, std::vector<double>(k));
    for (int q = 0; q < k; ++q)
        for (int l = 0; l < k; ++l) {
            psiq[q][l] = CollocationBasis::poly(b.psi[l], b.rho[q]);
            dpsiq[q][l] = CollocationBasis::poly(b.dpsi[l], b.rho[q]);
        }

    for (int i = 0; i < L.N; ++i) {
        const double h = S.x[i + 1] - S.x[i];
        for (int q = 0; q < k; ++q, row += m) {
            const double s = b.rho[q];
            const double xq = S.x[i] + s * h;
            Vec4<double> y{}, dy{}, ddy{};
            for (int j = 0; j < m; ++j) {
                double yv = z[L.Y(i, j)] + h * s * z[L.V(i, j)];
                double dv = z[L.V(i, j)];
                for (int l = 0; l < k; ++l) {
                    const double A = z[L.A(i, l, j)];
                    yv += h * h * A * psiq[q][l];
                    dv += h * A * dpsiq[q][l];
                }
                y[j] = yv;
                dy[j] = dv;
                ddy[j] = z[L.A(i, q, j)];
            }
            const PointEval pe = eval_point(S.cls, S.n, xq, y, dy, ddy, J != nullptr);
            for (int e = 0; e < m; ++e) F[row + e] = pe.r[e];
            if (!J) continue;
            for (int e = 0; e < m; ++e)
                for (int j = 0; j < m; ++j) {
                    const double gy = pe.Jy(e, j), gd = pe.Jdy(e, j), gdd = pe.Jddy(e, j);
                    J->add(row + e, L.Y(i, j), gy);
                    J->add(row + e, L.V(i, j), gy * h * s + gd);
                    for (int l = 0; l < k; ++l) {
                        double v = gy * h * h * psiq[q][l] + gd * h * dpsiq[q][l];
                        if (l == q) v += gdd;
                        J->add(row + e, L.A(i, l, j), v);
                    }
                }
        }
        // continuity of y and y' into node i+1
        for (int j = 0; j < m; ++j, ++row) {
            double v = z[L.Y(i + 1, j)] - z[L.Y(i, j)] - h * z[L.V(i, j)];
            for (int l = 0; l < k; ++l) v -= h * h * psi1[l] * z[L.A(i, l, j)];
            F[row] = v;
            if (J) {
                J->add(row, L.Y(i + 1, j), 1.0);
                J->add(row, L.Y(i, j), -1.0);
                J->add(row, L.V(i, j), -h);
                for (int l = 0; l < k; ++l) J->add(row, L.A(i, l, j), -h * h * psi1[l]);
            }
        }
        for (int j = 0; j < m; ++j, ++row) {
            double v = z[L.V(i + 1, j)] - z[L.V(i, j)];
            for (int l = 0; l < k; ++l) v -= h * dpsi1[l] * z[L.A(i, l, j)];
            F[row] = v;
            if (J) {
                J->add(row, L.V(i + 1, j), 1.0);
                J->add(row, L.V(i, j), -1.0);
                for (int l = 0; l < k; ++l) J->add(row, L.A(i, l, j), -h * dpsi1[l]);
            }
        }
    }
    // x = 1: y1'(1) = 0 selects the solution regular at the center (the
    // K equation also admits 1/(1-x^2)); y1'(0) = 0 needs no row, both local
    // solutions at x = 0 satisfy it. Then K = t_i = 1.
    F[row] = z[L.V(L.N, 0)];
    if (J) J->add(row, L.V(L.N, 0), 1.0);
    ++row;
    for (int j = 0; j < m; ++j, ++row) {
        F[row] = z[L.Y(L.N, j)];
        if (J) J->add(row, L.Y(L.N, j), 1.0);
    }
    return F;
}

inline double sup_norm(const std::vector<double>& v) {
    double r = 0;
    for (double a : v) {
        if (!std::isfinite(a)) return INFINITY;
        r = std::max(r, std::abs(a));
    }
    return r;
}

inline std::vector<double> pack(const SolutionGrid& g, int k) {
    const Layout L{g.m(), k, g.intervals()};
    std::vector<double> z(L.size(), 0.0);
    const bool poly = g.has_polynomial() && g.stages == k;
    const CollocationBasis& b = basis(k);
    for (int i = 0; i <= L.N; ++i)
        for (int j = 0; j < L.m; ++j) {
            z[L.Y(i, j)] = g.y(j, i);
            z[L.V(i, j)] = g.dy(j, i);
        }
    for (int i = 0; i < L.N; ++i)
        for (int l = 0; l < k; ++l) {
            const PointValue pv = poly ? PointValue{} : g.eval_local(i, b.rho[l]);
            for (int j = 0; j < L.m; ++j) z[L.A(i, l, j)] = poly ? g.acc(j, i * k + l) : pv.ddy[j];
        }
    return z;
}

inline SolutionGrid unpack(const System& S, const std::vector<double>& z) {
    const Layout L = S.lay();
    SolutionGrid g;
    g.cls = S.cls;
    g.n = S.n;
    g.stages = S.k;
    g.x = S.x;
    g.y.resize(L.m, L.N + 1);
    g.dy.resize(L.m, L.N + 1);
    g.acc.resize(L.m, L.N * L.k);
    for (int i = 0; i <= L.N; ++i)
        for (int j = 0; j < L.m; ++j) {
            g.y(j, i) = z[L.Y(i, j)];
            g.dy(j, i) = z[L.V(i, j)];
        }
    for (int i = 0; i < L.N; ++i)
        for (int l = 0; l < L.k; ++l)
            for (int j = 0; j < L.m; ++j) g.acc(j, i * L.k + l) = z[L.A(i, l, j)];
    g.refresh_fields();
    return g;
}

} // namespace colloc

// Residuals of the unused equations at interior nodes, with y'' taken from
// the solved set at the node (node values and slopes are the superconvergent
// part of the collocation solution).
inline std::array<double, 2> extra_residual_norms(const SolutionGrid& g) {
    std::array<double, 2> out{0.0, 0.0};
    const int m = g.m();
    for (int i = 1; i < g.intervals(); ++i) {
        const double x = g.x[i];
        Vec4<double> y{}, dy{}, ddy{}, r{};
        for (int j = 0; j < m; ++j) {
            y[j] = g.y(j, i);
            dy[j] = g.dy(j, i);
        }
        const Weights<double> W = printed_weights(x);
        solved_residuals(g.cls, g.n, W, y, dy, ddy, r);
        for (int j = 0; j < m; ++j) ddy[j] = -r[j];
        std::array<double, 2> e{};
        extra_residuals(g.cls, g.n, W, y, dy, ddy, e);
        out[0] = std::max(out[0], std::abs(e[0]));
        out[1] = std::max(out[1], std::abs(e[1]));
    }
    return out;
}

inline SolutionGrid zero_grid(const ModelParams& p, const Mesh& mesh, int stages = 3) {
    SolutionGrid g;
    g.cls = p.symmetry;
    g.n = p.n;
    g.stages = stages;
    g.x = mesh.nodes;
    const int N = int(mesh.nodes.size()) - 1;
    g.y = Eigen::MatrixXd::Zero(p.m(), N + 1);
    g.dy = Eigen::MatrixXd::Zero(p.m(), N + 1);
    g.acc = Eigen::MatrixXd::Zero(p.m(), N * stages);
    g.refresh_fields();
    return g;
}

// Smooth perturbation of the zero guess: component j gets
// a_j * 16x^2(1-x)^2 * cos(w_j x + phi_j) with |a_j| <= amplitude, drawn from
// a seeded generator. Values, slopes and Gauss-point accelerations are exact.
inline SolutionGrid perturbed_guess(const ModelParams& p, const Mesh& mesh, std::uint64_t seed, double amplitude = 0.3,
                                    int stages = 3) {
    SolutionGrid g = zero_grid(p, mesh, stages);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ua(-amplitude, amplitude), uw(0.0, 3 * M_PI), uphi(0.0, 2 * M_PI);
    const CollocationBasis& b = basis(stages);
    for (int j = 0; j < p.m(); ++j) {
        const double a = ua(rng), w = uw(rng), phi = uphi(rng);
        auto jet = [&](double x) {
            const double bb = 16 * x * x * (1 - x) * (1 - x), b1 = 32 * x * (1 - x) * (1 - 2 * x),
                         b2 = 32 * ((1 - 2 * x) * (1 - 2 * x) - 2 * x * (1 - x));
            const double c = std::cos(w * x + phi), c1 = -w * std::sin(w * x + phi), c2 = -w * w * c;
            return std::array<double, 3>{a * bb * c, a * (b1 * c + bb * c1), a * (b2 * c + 2 * b1 * c1 + bb * c2)};
        };
        for (int i = 0; i <= g.intervals(); ++i) {
            const auto v = jet(g.x[i]);
            g.y(j, i) = v[0];
            g.dy(j, i) = v[1];
        }
        for (int i = 0; i < g.intervals(); ++i)
            for (int l = 0; l < stages; ++l)
                g.acc(j, i * stages + l) = jet(g.x[i] + (g.x[i + 1] - g.x[i]) * b.rho[l])[2];
    }
    g.refresh_fields();
    return g;
}

namespace detail {

inline SolveResult newton_on(const colloc::System& S, std::vector<double> z, const SolveOptions& opt) {
    using colloc::assemble;
    using colloc::sup_norm;
    if (int bad = colloc::inadmissible_node(S, z); bad >= 0)
        throw PositivityLoss("initial guess has a non-finite or extreme ratio at node " + std::to_string(bad), bad);
    std::vector<double> F = assemble(S, z, nullptr);
    double norm = sup_norm(F);
    if (!std::isfinite(norm)) throw PositivityLoss("initial guess gives a non-finite residual", -1);
    SolveResult res;
    res.history.push_back(norm);
    const colloc::Layout L = S.lay();
    auto node_of_row = [&](int r) { return r < L.m - 1 ? -1 : std::min(L.N, (r - L.m + 1) / L.block()); };
    bool polished = !opt.polish;
    int it = 0;
    while (true) {
        if (norm <= opt.tol) {
            if (polished || norm == 0.0) break;
        } else if (it >= opt.max_iter) {
            throw NonConvergence("Newton did not reach tol in " + std::to_string(opt.max_iter) + " iterations",
                                 res.history);
        }
        const bool polishing = norm <= opt.tol;
        BandedMatrix J;
        assemble(S, z, &J);
        std::vector<double> d(F.size());
        for (std::size_t r = 0; r < F.size(); ++r) d[r] = -F[r];
        try {
            J.factorize();
        } catch (const SingularJacobian& e) {
            throw SingularJacobian(e.what(), node_of_row(e.pivot_row), e.pivot_row, e.pivot);
        }
        J.solve(d);
        for (double v : d)
            if (!std::isfinite(v)) throw SingularJacobian("non-finite Newton step", -1, -1, 0.0);
        ++it;
        double lam = 1.0;
        bool accepted = false, any_admissible = false;
        int bad_node = -1;
        std::vector<double> zt(z.size()), Ft;
        for (int h = 0; h <= opt.max_halvings; ++h, lam *= 0.5) {
            for (std::size_t r = 0; r < z.size(); ++r) zt[r] = z[r] + lam * d[r];
            if (int bad = colloc::inadmissible_node(S, zt); bad >= 0) {
                bad_node = bad;
                continue;
            }
            Ft = assemble(S, zt, nullptr);
            const double nt = sup_norm(Ft);
            if (!std::isfinite(nt)) continue;
            any_admissible = true;
            if (polishing ? nt <= norm : nt <= (1 - opt.armijo * lam) * norm) {
                accepted = true;
                z.swap(zt);
                F.swap(Ft);
                norm = nt;
                break;
            }
        }
        if (polishing) {
            polished = true;
            if (!accepted) break;  // already within tol; keep the current iterate
            res.history.push_back(norm);
            continue;
        }
        if (!accepted) {
            if (!any_admissible)
                throw PositivityLoss("line search left the admissible region at node " + std::to_string(bad_node),
                                     bad_node);
            throw NonConvergence("line search failed to decrease the residual", res.history);
        }
        res.history.push_back(norm);
    }
    res.grid = colloc::unpack(S, z);
    res.iterations = it;
    res.residual_solved = norm;
    res.K0 = std::exp(res.grid.y(0, 0));
    res.residual_extra = extra_residual_norms(res.grid);
    res.endpoint_slope = endpoint_slopes(res.grid);
    return res;
}

} // namespace detail

// Newton on the guess's mesh; boundary data from params.
inline SolveResult newton_solve(const SolutionGrid& guess, const ModelParams& params, const SolveOptions& opt,
                                const std::optional<BoundaryData>& data = std::nullopt) {
    if (!(opt.tol > 0) || opt.max_iter < 1) throw Error(ErrorKind::InvalidParameter, "tol > 0 and max_iter >= 1 required");
    if (guess.cls != params.symmetry || guess.m() != params.m())
        throw Error(ErrorKind::InvalidClass, "guess class does not match params");
    colloc::System S{params.symmetry, params.n, opt.stages, guess.x, data ? *data : boundary_data(params)};
    return detail::newton_on(S, colloc::pack(guess, opt.stages), opt);
}

inline SolveResult newton_solve(const ModelParams& params, const SolveOptions& opt) {
    return newton_solve(zero_grid(params, build_mesh(opt.mesh_size, opt.grading), opt.stages), params, opt);
}

struct PathStep {
    double s = 1.0;  // family parameter: 1 = round, 0 = target
    BoundaryData data;
    double K0 = 1.0;
    double residual_solved = 0.0;
    std::array<double, 2> residual_extra{};
    int iterations = 0;
};

struct ContinuationPath {
    std::vector<PathStep> steps;
    std::vector<SolveResult> results;  // parallel to steps
    bool reached = false;
    double last_good_s = 1.0;
    const SolveResult& final_result() const { return results.back(); }
};

class StepCollapse : public Error {
public:
    StepCollapse(const std::string& what, ContinuationPath path)
        : Error(ErrorKind::StepCollapse, what), path(std::move(path)) {}
    ContinuationPath path;
    double last_good_s() const { return path.last_good_s; }
};

struct ContinuationOptions {
    int max_halvings = 12;
    bool secant = false;
};

inline BoundaryData family_data(const BoundaryData& target, double s) {
    BoundaryData d;
    for (int i = 0; i < 3; ++i) d.t0[i] = (1 - s) * target.t0[i] + s;
    return d;
}

inline ContinuationPath continuation_solve(const BoundaryData& target, int steps, const ModelParams& params,
                                           const SolveOptions& opt, const ContinuationOptions& copt = {}) {
    for (double t : target.t0)
        if (!(t > 0)) throw Error(ErrorKind::InvalidParameter, "target data must be positive");
    if (steps < 1) throw Error(ErrorKind::InvalidParameter, "continuation needs at least one step");
    const Mesh mesh = build_mesh(opt.mesh_size, opt.grading);
    colloc::System S{params.symmetry, params.n, opt.stages, mesh.nodes, family_data(target, 1.0)};

    ContinuationPath path;
    {
        SolveResult r0 = detail::newton_on(S, colloc::pack(zero_grid(params, mesh, opt.stages), opt.stages), opt);
        path.steps.push_back({1.0, S.bd, r0.K0, r0.residual_solved, r0.residual_extra, r0.iterations});
        path.results.push_back(std::move(r0));
    }
    bool round = true;
    for (double t : target.t0) round = round && t == 1.0;
    if (round) {
        path.reached = true;
        path.last_good_s = 0.0;
        return path;
    }
    const double nominal = 1.0 / steps;
    double s = 1.0, ds = nominal;
    int halvings = 0;
    std::vector<double> z_prev, z_cur = colloc::pack(path.results.back().grid, opt.stages);
    double s_prev = 1.0;
    while (s > 0) {
        const double s_next = std::max(0.0, s - ds);
        // snap to the nominal grid to avoid a sliver step at the end
        const double s_try = s_next < 1e-12 ? 0.0 : s_next;
        S.bd = family_data(target, s_try);
        std::vector<double> z0 = z_cur;
        if (copt.secant && !z_prev.empty() && s_prev != s) {
            const double f = (s_try - s) / (s - s_prev);
            for (std::size_t r = 0; r < z0.size(); ++r) z0[r] += f * (z_cur[r] - z_prev[r]);
        }
        try {
            SolveResult r = detail::newton_on(S, z0, opt);
            path.steps.push_back({s_try, S.bd, r.K0, r.residual_solved, r.residual_extra, r.iterations});
            z_prev = z_cur;
            s_prev = s;
            z_cur = colloc::pack(r.grid, opt.stages);
            path.results.push_back(std::move(r));
            s = s_try;
            path.last_good_s = s;
            halvings = 0;
            ds = std::min(nominal, 2 * ds);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NonConvergence && e.kind() != ErrorKind::PositivityLoss &&
                e.kind() != ErrorKind::SingularJacobian)
                throw;
            if (++halvings > copt.max_halvings)
                throw StepCollapse("continuation stalled at s = " + std::to_string(s) + " (" + e.what() + ")",
                                   std::move(path));
            ds *= 0.5;
        }
    }
    path.reached = true;
    return path;
}

} // namespace cce
