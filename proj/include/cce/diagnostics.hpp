#pragma once

// Checks run on converged solutions: monotonicity, pointwise bounds, a priori
// constants, Weyl-component estimators, extrema of the reduced-class ratios and
// total variation of solution differences. Derivatives come from the local
// collocation polynomial (cubic Hermite for grids without one).

#include "bvp_solver.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "ode_system.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace cce {

inline constexpr double kNoiseFloor = 1e-11;

namespace diag {

// lifted (4-component) value, slope and second derivative at node i
struct NodeJet {
    double x;
    Vec4<double> y, dy, ddy;
};

inline NodeJet node_jet(const SolutionGrid& g, int i) {
    const int N = g.intervals();
    const PointValue p = i < N ? g.eval_local(i, 0.0) : g.eval_local(N - 1, 1.0);
    NodeJet j;
    j.x = g.x[i];
    Vec4<double> y{}, dy{};
    for (int c = 0; c < g.m(); ++c) {
        y[c] = g.y(c, i);
        dy[c] = g.dy(c, i);
    }
    j.y = expand_state(g.cls, y);
    j.dy = expand_state(g.cls, dy);
    j.ddy = expand_state(g.cls, p.ddy);
    return j;
}

struct Extremum {
    double x = 0;
    double value = 0;
    int kind = 0;  // +1 maximum, -1 minimum
};

using Profile = std::function<std::pair<double, double>(double)>;  // x -> (value, slope)

// Interior extrema of a profile on (x_0, x_N): slopes are sampled at `per`
// points per interval, excluding the two endpoints, samples within the noise
// floor are dropped, and each remaining sign change is refined by TOMS 748 on
// the slope.
inline std::vector<Extremum> find_extrema(const std::vector<double>& x, const Profile& f, double floor = kNoiseFloor,
                                          int per = 8) {
    std::vector<Extremum> out;
    const int N = int(x.size()) - 1;
    double xa = 0, sa = 0;
    int sign_a = 0;
    for (int i = 0; i < N; ++i) {
        for (int q = 1; q <= (i == N - 1 ? per - 1 : per); ++q) {
            const double xv = q == per ? x[i + 1] : x[i] + (x[i + 1] - x[i]) * q / per;
            const double s = f(xv).second;
            const int sg = std::abs(s) <= floor ? 0 : (s > 0 ? 1 : -1);
            if (sg == 0) continue;
            if (sign_a != 0 && sg != sign_a) {
                auto slope = [&](double t) { return f(t).second; };
                boost::uintmax_t iters = 60;
                const auto tol = boost::math::tools::eps_tolerance<double>(50);
                const auto br = boost::math::tools::toms748_solve(slope, xa, xv, sa, s, tol, iters);
                const double xr = 0.5 * (br.first + br.second);
                out.push_back({xr, f(xr).first, sign_a > 0 ? 1 : -1});
            }
            xa = xv;
            sa = s;
            sign_a = sg;
        }
    }
    return out;
}

// Sum of |increments| between the endpoints and the interior extrema.
inline double variation_from_extrema(const std::vector<double>& x, const Profile& f, double floor = kNoiseFloor) {
    const auto ex = find_extrema(x, f, floor);
    double v = 0, prev = f(x.front()).first;
    for (const auto& e : ex) {
        v += std::abs(e.value - prev);
        prev = e.value;
    }
    return v + std::abs(f(x.back()).first - prev);
}

inline Profile hermite_profile(const std::vector<double>& x, const std::vector<double>& z,
                               const std::vector<double>& dz) {
    return [&x, &z, &dz](double xv) {
        const int N = int(x.size()) - 1;
        int i = int(std::upper_bound(x.begin(), x.end(), xv) - x.begin()) - 1;
        i = std::clamp(i, 0, N - 1);
        const double h = x[i + 1] - x[i], s = (xv - x[i]) / h, s2 = s * s, s3 = s2 * s;
        const double v = (2 * s3 - 3 * s2 + 1) * z[i] + (s3 - 2 * s2 + s) * h * dz[i] + (-2 * s3 + 3 * s2) * z[i + 1] +
                         (s3 - s2) * h * dz[i + 1];
        const double d = ((6 * s2 - 6 * s) * z[i] + (-6 * s2 + 6 * s) * z[i + 1]) / h + (3 * s2 - 4 * s + 1) * dz[i] +
                         (3 * s2 - 2 * s) * dz[i + 1];
        return std::make_pair(v, d);
    };
}

} // namespace diag

// ---------------------------------------------------------------- monotonicity

struct PairSigns {
    int i = 0, j = 0;        // 1-based ratio indices (y_{i+1}' - y_{j+1}')
    int sign = 0;            // sign over the counted nodes, 0 if mixed or empty
    int sign_changes = 0;
    int excluded = 0;        // nodes inside the noise floor
    bool identically_zero = false;
};

struct MonotonicityReport {
    bool y1_positive = false;
    double y1_min = 0;
    std::array<PairSigns, 3> ratio_signs{};
    bool condition_3_1_held = false;
    bool pairwise_distinct = false;

    bool lemma_holds() const {
        if (!y1_positive) return false;
        for (const auto& p : ratio_signs)
            if (p.sign_changes != 0) return false;
        return true;
    }
};

inline MonotonicityReport check_monotonicity(const SolveResult& sol, const BoundaryData& bd) {
    const SolutionGrid& g = sol.grid;
    MonotonicityReport r;
    const ConditionReport c = check_conditions(bd);
    r.condition_3_1_held = c.cond_3_1[0] && c.cond_3_1[1] && c.cond_3_1[2];
    const auto& t = bd.t0;
    r.pairwise_distinct = t[0] != t[1] && t[0] != t[2] && t[1] != t[2];
    const int N = g.intervals();
    r.y1_min = std::numeric_limits<double>::infinity();
    const std::array<std::pair<int, int>, 3> pairs{{{1, 2}, {1, 3}, {2, 3}}};
    std::array<int, 3> last{};
    for (int q = 0; q < 3; ++q) r.ratio_signs[q] = {pairs[q].first, pairs[q].second, 0, 0, 0, true};
    std::array<bool, 3> mixed{};
    for (int i = 1; i < N; ++i) {
        Vec4<double> dy{};
        for (int c2 = 0; c2 < g.m(); ++c2) dy[c2] = g.dy(c2, i);
        dy = expand_state(g.cls, dy);
        r.y1_min = std::min(r.y1_min, dy[0]);
        for (int q = 0; q < 3; ++q) {
            PairSigns& p = r.ratio_signs[q];
            const double d = dy[p.i] - dy[p.j];
            if (std::abs(d) <= kNoiseFloor) {
                ++p.excluded;
                continue;
            }
            p.identically_zero = false;
            const int sg = d > 0 ? 1 : -1;
            if (last[q] != 0 && sg != last[q]) {
                ++p.sign_changes;
                mixed[q] = true;
            }
            last[q] = sg;
        }
    }
    for (int q = 0; q < 3; ++q) r.ratio_signs[q].sign = mixed[q] ? 0 : last[q];
    if (N < 2) r.y1_min = 0;
    r.y1_positive = r.y1_min > 0;
    return r;
}

// ---------------------------------------------------------------------- bounds

struct BoundsReport {
    std::array<double, 3> t_min{}, t_max{};
    double delta_obs = 0;           // observed floor min t_i
    double bound_3_6 = 0;           // cap on every t_i
    double t_cap_margin = 0;        // bound_3_6 - max t_i
    double y1_min_slope = 0;
    bool K_monotone = false;        // y1' >= -1e-11 at every interior node
    std::array<double, 2> K_range{};  // (K(0), max K)
    bool K_le_one = false;
    double y1prime_cap_margin = 0;  // min over interior nodes of 4nx/(1-x^2) - y1'
    double tau = 0;
    double K0_lower_bound = 0;
    double K0 = 0;

    bool holds() const {
        return t_cap_margin >= -1e-9 && K_monotone && K_le_one && y1prime_cap_margin >= -1e-9 && K0 >= K0_lower_bound;
    }
};

// K(0)^(1/n) >= (t1 t2 t3)^(1/n) [(n-3)(n+5-sum t) + 2 tau t3/(t1 t2)] / (n(n-1)),
// data sorted so that t1 >= t2 >= t3; a negative bracket gives the trivial bound 0.
inline double K0_lower_bound(const BoundaryData& bd, int n, double tau) {
    std::array<double, 3> t = bd.t0;
    std::sort(t.begin(), t.end(), std::greater<>());
    const double br = (n - 3) * (n + 5 - t[0] - t[1] - t[2]) + 2 * tau * t[2] / (t[0] * t[1]);
    if (br <= 0) return 0.0;
    return std::pow(std::pow(t[0] * t[1] * t[2], 1.0 / n) * br / (n * (n - 1.0)), n);
}

inline BoundsReport check_bounds(const SolveResult& sol, const BoundaryData& bd, const ModelParams& params) {
    const SolutionGrid& g = sol.grid;
    const int n = params.n, N = g.intervals();
    BoundsReport r;
    r.t_min.fill(std::numeric_limits<double>::infinity());
    r.t_max.fill(-std::numeric_limits<double>::infinity());
    double Kmax = 0, tmax = 0;
    r.y1_min_slope = std::numeric_limits<double>::infinity();
    r.y1prime_cap_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= N; ++i) {
        const DerivedFields& f = g.fields[i];
        for (int q = 0; q < 3; ++q) {
            r.t_min[q] = std::min(r.t_min[q], f.t[q]);
            r.t_max[q] = std::max(r.t_max[q], f.t[q]);
            tmax = std::max(tmax, f.t[q]);
        }
        Kmax = std::max(Kmax, f.K);
        // endpoint slopes are not imposed (only y1'(1) is), so slopes are judged
        // on interior nodes
        if (i > 0 && i < N) {
            const double d1 = g.dy(0, i);
            r.y1_min_slope = std::min(r.y1_min_slope, d1);
            const double x = g.x[i];
            r.y1prime_cap_margin = std::min(r.y1prime_cap_margin, 4 * n * x / (1 - x * x) - d1);
        }
    }
    if (N < 2) r.y1prime_cap_margin = r.y1_min_slope = 0;
    r.delta_obs = std::min({r.t_min[0], r.t_min[1], r.t_min[2]});
    const auto [lo, hi] = std::minmax_element(bd.t0.begin(), bd.t0.end());
    r.bound_3_6 = t_upper_bound(*hi, *lo, n);
    r.t_cap_margin = r.bound_3_6 - tmax;
    r.K_monotone = r.y1_min_slope >= -kNoiseFloor;
    r.K0 = g.fields[0].K;
    r.K_range = {r.K0, Kmax};
    r.K_le_one = Kmax <= 1 + kNoiseFloor;
    r.tau = check_conditions(bd).tau_margin;
    r.K0_lower_bound = K0_lower_bound(bd, n, r.tau);
    return r;
}

// --------------------------------------------------------------- a priori fits

// Smallest C with |y_j'| <= C x and |y_j''| <= C on [0, 3/4], per component.
inline std::array<double, 4> check_apriori(const SolveResult& sol, double right = 0.75) {
    const SolutionGrid& g = sol.grid;
    std::array<double, 4> C{};
    for (int i = 0; i <= g.intervals() && g.x[i] <= right; ++i) {
        const diag::NodeJet j = diag::node_jet(g, i);
        for (int c = 0; c < 4; ++c) {
            double v = std::abs(j.ddy[c]);
            if (j.x > 0) v = std::max(v, std::abs(j.dy[c]) / j.x);
            C[c] = std::max(C[c], v);
        }
    }
    return C;
}

// ------------------------------------------------------------------------ Weyl

struct WeylReport {
    double eps_obs = 0;        // sup of the component estimators over interior nodes
    double eps_argmax = 0;     // x where the sup is attained
    double cap = 0;
    bool within_cap = true;
    double delta0 = 0.5;
    // |y_1'| <= C eps^2 (1-x^2)^3, |y_1''| <= C eps^2 (1-x^2)^2,
    // |y_i'| <= C eps (1-x^2),     |y_i''| <= C eps  on [delta0, 1)
    std::array<double, 4> decay_first{}, decay_second{};
};

namespace diag {

// Six estimators at one node: for q = 1..3
//   A_q = 4x^2/(1-x^2) I4^(-1/2) |d/dx (I4^(-1/2) I_q^(1/2))|
//   B_q = 2x^2/(1-x^2) I_q^(-1/2) |d/dx [(t_i/t_p)^(1/2) + (t_p/t_i)^(1/2) - t_q (t_i t_p)^(-1/2)]|
// with {i, p, q} = {1, 2, 3}.
inline double weyl_at(const NodeJet& j, const DerivedFields& f) {
    const double x = j.x, w = x * x / (1 - x * x);
    const double I4 = f.I[3];
    double e = 0;
    for (int q = 0; q < 3; ++q) {
        const double a = 4 * w / std::sqrt(I4) * 0.5 * std::sqrt(f.t[q]) * std::abs(j.dy[q + 1]);
        const int i = (q + 1) % 3, p = (q + 2) % 3;
        const double yi = j.y[i + 1], yp = j.y[p + 1], yq = j.y[q + 1];
        const double di = j.dy[i + 1], dp = j.dy[p + 1], dq = j.dy[q + 1];
        const double h = 0.5 * (yi - yp);
        const double df = (di - dp) * std::sinh(h) - std::exp(yq - 0.5 * (yi + yp)) * (dq - 0.5 * (di + dp));
        const double b = 2 * w / std::sqrt(f.I[q]) * std::abs(df);
        e = std::max({e, a, b});
    }
    return e;
}

} // namespace diag

inline WeylReport weyl_estimates(const SolveResult& sol, double delta0 = 0.5) {
    const SolutionGrid& g = sol.grid;
    const int N = g.intervals();
    WeylReport r;
    r.delta0 = delta0;
    r.cap = weyl_cap(g.n);
    std::vector<diag::NodeJet> jets;
    for (int i = 1; i < N; ++i) {
        jets.push_back(diag::node_jet(g, i));
        const double e = diag::weyl_at(jets.back(), g.fields[i]);
        if (e > r.eps_obs) {
            r.eps_obs = e;
            r.eps_argmax = g.x[i];
        }
    }
    r.within_cap = r.eps_obs <= r.cap;
    if (r.eps_obs == 0) return r;
    const double e1 = r.eps_obs, e2 = e1 * e1;
    for (const auto& j : jets) {
        if (j.x < delta0) continue;
        const double q = 1 - j.x * j.x;
        r.decay_first[0] = std::max(r.decay_first[0], std::abs(j.dy[0]) / (e2 * q * q * q));
        r.decay_second[0] = std::max(r.decay_second[0], std::abs(j.ddy[0]) / (e2 * q * q));
        for (int c = 1; c < 4; ++c) {
            r.decay_first[c] = std::max(r.decay_first[c], std::abs(j.dy[c]) / (e1 * q));
            r.decay_second[c] = std::max(r.decay_second[c], std::abs(j.ddy[c]) / e1);
        }
    }
    return r;
}

// -------------------------------------------------------------------- extrema

struct ExtremumRecord {
    int component = 1;  // t-profile index in the reduced class (1 = t1, 2 = t2 = t3)
    int kind = 0;       // +1 maximum, -1 minimum
    double x = 0;
    double t = 0;
    double bound = 0;
    bool satisfied = true;
    std::string rule;
};

struct ExtremaReport {
    SymmetryClass cls = SymmetryClass::SpTimesSp1;
    std::vector<ExtremumRecord> extrema;
    // SpTimesSp1: t1 <= max(1, t1(0)) everywhere
    double global_margin = 0;
    // SpTimesU1
    bool t1_star_checked = false;     // t2 monotone and below 1, so t1* should be nondecreasing
    bool t1_star_nondecreasing = true;
    double y2pp0_formula = 0;         // predicted y2''(0)
    double y2pp0_observed = 0;
    double t1_star0 = 0;

    bool holds() const {
        for (const auto& e : extrema)
            if (!e.satisfied) return false;
        return global_margin >= -1e-9 && t1_star_nondecreasing;
    }
};

inline ExtremaReport classify_extrema(const SolveResult& sol, const ModelParams& params) {
    const SolutionGrid& g = sol.grid;
    if (g.cls == SymmetryClass::Full || params.symmetry != g.cls)
        throw Error(ErrorKind::InvalidClass, "extrema classification needs a reduced-class solution");
    const int n = params.n, N = g.intervals();
    ExtremaReport r;
    r.cls = g.cls;
    constexpr double slack = 1e-9;
    auto profile = [&](int c) -> diag::Profile {
        return [&g, c](double xv) {
            const PointValue p = g.eval(xv);
            return std::make_pair(std::exp(p.y[c]), std::exp(p.y[c]) * p.dy[c]);
        };
    };
    auto state_at = [&](double xv) {
        const PointValue p = g.eval(xv);
        return std::make_pair(std::exp(p.y[1]), g.m() > 2 ? std::exp(p.y[2]) : 0.0);
    };
    if (g.cls == SymmetryClass::SpTimesSp1) {
        const double lim = 2.0 / (n + 3);
        for (const auto& e : diag::find_extrema(g.x, profile(1))) {
            ExtremumRecord rec{1, e.kind, e.x, e.value, lim, true, ""};
            if (e.kind > 0) {
                rec.rule = "max: 2/(n+3) <= t1 <= 1";
                rec.satisfied = e.value >= lim - slack && e.value <= 1 + slack;
            } else {
                rec.rule = "min: t1 <= 2/(n+3)";
                rec.satisfied = e.value <= lim + slack;
            }
            r.extrema.push_back(rec);
        }
        const double cap = std::max(1.0, g.fields[0].t[0]);
        r.global_margin = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= N; ++i) r.global_margin = std::min(r.global_margin, cap - g.fields[i].t[0]);
        return r;
    }
    // SpTimesU1: y2 = log t1, y3 = log t2 (= log t3)
    r.global_margin = 0;
    for (const auto& e : diag::find_extrema(g.x, profile(1))) {
        const double ts = t1_star(state_at(e.x).second, n);
        ExtremumRecord rec{1, e.kind, e.x, e.value, ts, true, ""};
        if (e.kind > 0) {
            rec.rule = "max: t1 <= t1*";
            rec.satisfied = e.value <= ts + slack;
        } else {
            rec.rule = "min: t1 >= t1*";
            rec.satisfied = e.value >= ts - slack;
        }
        r.extrema.push_back(rec);
    }
    std::vector<diag::Extremum> e2 = diag::find_extrema(g.x, profile(2));
    for (const auto& e : e2) {
        const double t1 = state_at(e.x).first, t2 = e.value;
        ExtremumRecord rec{2, e.kind, e.x, e.value, 0, true, ""};
        if (e.kind > 0) {
            rec.rule = "max: t2 <= 1";
            rec.bound = 1;
            rec.satisfied = t2 <= 1 + slack;
        } else {
            rec.rule = "min: t2 < 4/(n+1), t1 <= (4t2 - (n+1)t2^2)/(2t2+2)";
            rec.bound = 4.0 / (n + 1);
            rec.satisfied = t2 < rec.bound + slack && t1 <= (4 * t2 - (n + 1) * t2 * t2) / (2 * t2 + 2) + slack;
        }
        r.extrema.push_back(rec);
    }
    bool below = true;
    for (int i = 0; i <= N; ++i) below = below && g.fields[i].t[1] < 1;
    r.t1_star_checked = e2.empty() && below;
    if (r.t1_star_checked) {
        double prev = t1_star(g.fields[0].t[1], n);
        for (int i = 1; i <= N; ++i) {
            const double cur = t1_star(g.fields[i].t[1], n);
            if (cur < prev - kNoiseFloor) r.t1_star_nondecreasing = false;
            prev = cur;
        }
    }
    const DerivedFields& f0 = g.fields[0];
    const double t1 = f0.t[0], t2 = f0.t[1];
    r.t1_star0 = t1_star(t2, n);
    r.y2pp0_formula = -8.0 / (n - 2) * std::pow(t1 * t2 * t2 / f0.K, 1.0 / n) * ((n - 1) + 2 / (t2 * t2)) *
                      (t1 - r.t1_star0);
    r.y2pp0_observed = diag::node_jet(g, 0).ddy[1];
    return r;
}

// ------------------------------------------------------------ total variation

// Node samples with slopes: cubic Hermite between nodes.
inline double total_variation(const std::vector<double>& x, const std::vector<double>& z,
                              const std::vector<double>& dz) {
    if (x.size() != z.size() || x.size() != dz.size() || x.size() < 2)
        throw Error(ErrorKind::InvalidParameter, "total_variation needs matching samples on at least two nodes");
    for (double v : z)
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidParameter, "profile must be finite");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw Error(ErrorKind::InvalidParameter, "nodes must be strictly increasing");
    return diag::variation_from_extrema(x, diag::hermite_profile(x, z, dz), 0.0);
}

// Node samples only: slopes from the derivative of the local five-point
// interpolating polynomial (one-sided stencils at the ends).
inline double total_variation(const std::vector<double>& x, const std::vector<double>& z) {
    if (x.size() != z.size() || x.size() < 2)
        throw Error(ErrorKind::InvalidParameter, "total_variation needs matching samples on at least two nodes");
    const int N = int(x.size()), w = std::min(N, 5);
    std::vector<double> dz(N, 0.0);
    for (int i = 0; i < N; ++i) {
        const int lo = std::clamp(i - w / 2, 0, N - w);
        // d/dx of the Lagrange interpolant through x[lo..lo+w) at x[i]; the
        // weights sum to zero, so differences against z[i] keep constants exact
        double d = 0;
        for (int a = lo; a < lo + w; ++a) {
            if (a == i) continue;
            double la = 1 / (x[a] - x[i]);
            for (int b = lo; b < lo + w; ++b)
                if (b != a && b != i) la *= (x[i] - x[b]) / (x[a] - x[b]);
            d += la * (z[a] - z[i]);
        }
        dz[i] = d;
    }
    return total_variation(x, z, dz);
}

struct VariationReport {
    std::vector<double> x;
    Eigen::MatrixXd z;          // 4 x (N+1), lifted differences at a's nodes
    std::array<double, 4> V{};
    // [0..2]: V(z_i) <= (sum of the other three)/(n-2) for i = 2, 3, 4
    // [3]:    V(z_1) <= (V(z_2)+V(z_3)+V(z_4))/n
    std::array<bool, 4> inequality_flags{};
    double max_V() const { return *std::max_element(V.begin(), V.end()); }
};

inline VariationReport compare_solutions(const SolveResult& a, const SolveResult& b) {
    const SolutionGrid &ga = a.grid, &gb = b.grid;
    if (ga.n != gb.n || ga.cls != gb.cls)
        throw Error(ErrorKind::InvalidComparison, "solutions differ in dimension or symmetry class");
    const bool same_mesh = ga.x == gb.x;
    const int N = ga.intervals();
    VariationReport r;
    r.x = ga.x;
    r.z.resize(4, N + 1);
    auto diff_at = [&](double xv) {
        const int i = ga.locate(xv);
        const double s = (xv - ga.x[i]) / (ga.x[i + 1] - ga.x[i]);
        const PointValue pa = ga.eval_local(i, s);
        const PointValue pb = same_mesh ? gb.eval_local(i, s) : gb.eval(xv);
        Vec4<double> dz{}, ddz{};
        for (int c = 0; c < ga.m(); ++c) {
            dz[c] = pa.y[c] - pb.y[c];
            ddz[c] = pa.dy[c] - pb.dy[c];
        }
        return std::make_pair(expand_state(ga.cls, dz), expand_state(ga.cls, ddz));
    };
    for (int i = 0; i <= N; ++i) {
        const auto d = diff_at(ga.x[i]);
        for (int c = 0; c < 4; ++c) r.z(c, i) = d.first[c];
    }
    for (int c = 0; c < 4; ++c) {
        const diag::Profile f = [&, c](double xv) {
            const auto d = diff_at(xv);
            return std::make_pair(d.first[c], d.second[c]);
        };
        r.V[c] = diag::variation_from_extrema(ga.x, f);
    }
    const double n = ga.n;
    const double sum = r.V[0] + r.V[1] + r.V[2] + r.V[3];
    for (int c = 1; c < 4; ++c) r.inequality_flags[c - 1] = r.V[c] <= (sum - r.V[c]) / (n - 2);
    r.inequality_flags[3] = r.V[0] <= (r.V[1] + r.V[2] + r.V[3]) / n;
    return r;
}

} // namespace cce
