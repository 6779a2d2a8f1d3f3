#pragma once

#include "errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace cce {

enum class SymmetryClass { Full, SpTimesSp1, SpTimesU1 };

inline const char* to_string(SymmetryClass c) {
    switch (c) {
    case SymmetryClass::Full: return "full";
    case SymmetryClass::SpTimesSp1: return "sp1";
    case SymmetryClass::SpTimesU1: return "u1";
    }
    return "?";
}

inline SymmetryClass symmetry_from_string(const std::string& s) {
    if (s == "full") return SymmetryClass::Full;
    if (s == "sp1") return SymmetryClass::SpTimesSp1;
    if (s == "u1") return SymmetryClass::SpTimesU1;
    throw Error(ErrorKind::InvalidParameter, "unknown symmetry class '" + s + "'");
}

// number of unknown profiles y_j
constexpr int unknown_count(SymmetryClass c) {
    return c == SymmetryClass::Full ? 4 : (c == SymmetryClass::SpTimesSp1 ? 2 : 3);
}

inline constexpr double kSymmetryTol = 1e-12;

inline int dimension_from_k(int k) {
    if (k < 1) throw Error(ErrorKind::InvalidParameter, "k must be >= 1, got " + std::to_string(k));
    return 4 * k + 3;
}

struct Classification {
    SymmetryClass cls = SymmetryClass::Full;
    // canonical slot s holds original ratio index perm[s]
    std::array<int, 3> perm{0, 1, 2};
};

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

inline Classification classify_symmetry(const std::array<double, 4>& lambda, double tol = kSymmetryTol) {
    for (double l : lambda)
        if (!(l > 0) || !std::isfinite(l))
            throw Error(ErrorKind::InvalidParameter, "lambda entries must be positive and finite");
    const double r[3] = {lambda[0] / lambda[3], lambda[1] / lambda[3], lambda[2] / lambda[3]};
    const bool e01 = close_rel(r[0], r[1], tol);
    const bool e02 = close_rel(r[0], r[2], tol);
    const bool e12 = close_rel(r[1], r[2], tol);
    const int pairs = int(e01) + int(e02) + int(e12);
    if (pairs >= 2 || (e01 && e12)) return {SymmetryClass::SpTimesSp1, {0, 1, 2}};
    if (pairs == 0) return {SymmetryClass::Full, {0, 1, 2}};
    if (e12) return {SymmetryClass::SpTimesU1, {0, 1, 2}};
    if (e02) return {SymmetryClass::SpTimesU1, {1, 0, 2}};
    return {SymmetryClass::SpTimesU1, {2, 0, 1}};
}

struct BoundaryData {
    std::array<double, 3> t0{1.0, 1.0, 1.0};
};

struct ModelParams {
    int k = 1;
    int n = 7;
    std::array<double, 4> lambda{1.0, 1.0, 1.0, 1.0};
    SymmetryClass symmetry = SymmetryClass::SpTimesSp1;
    std::array<int, 3> perm{0, 1, 2};

    int m() const { return unknown_count(symmetry); }
};

// forced: run the requested class even if the data has more symmetry; a reduced
// class is only accepted when the data actually has that symmetry.
inline ModelParams make_params(int k, const std::array<double, 4>& lambda,
                               const SymmetryClass* forced = nullptr) {
    ModelParams p;
    p.k = k;
    p.n = dimension_from_k(k);
    p.lambda = lambda;
    const Classification c = classify_symmetry(lambda);
    p.symmetry = c.cls;
    p.perm = c.perm;
    if (forced && *forced != c.cls) {
        if (*forced == SymmetryClass::Full) {
            p.symmetry = SymmetryClass::Full;
            p.perm = {0, 1, 2};
        } else if (*forced == SymmetryClass::SpTimesU1 && c.cls == SymmetryClass::SpTimesSp1) {
            p.symmetry = SymmetryClass::SpTimesU1;
            p.perm = {0, 1, 2};
        } else {
            throw Error(ErrorKind::InvalidClass, std::string("data is not compatible with class ") +
                                                     to_string(*forced));
        }
    }
    return p;
}

// t_i(0) in canonical (permuted) order
inline BoundaryData boundary_data(const ModelParams& p) {
    BoundaryData bd;
    for (int s = 0; s < 3; ++s) bd.t0[s] = p.lambda[p.perm[s]] / p.lambda[3];
    return bd;
}

inline double t1_star(double t2, int n) {
    const double t22 = t2 * t2;
    return ((n + 5) * t22 - 4 * t22 * t2) / ((n - 1) * t22 + 2);
}

inline double t_upper_bound(double t1_0, double t3_0, int n) {
    return std::max({1.0, t1_0, (n + 5) / (n - 1 + 4 * t3_0 / t1_0)});
}

inline double t1_threshold(int n) {
    const double a = 3.0 * n + 15, b = double(n + 3) * (n + 3);
    return (a + std::sqrt(a * a + 4 * (2.0 * n - 6) * b)) / (2 * b);
}

inline double weyl_cap(int n) { return std::sqrt(double(n) * (double(n) * n - 1)); }

struct ConditionReport {
    std::array<bool, 3> cond_3_1{};
    double tau_margin = 0;
    double sigma_floor = 0;
};

inline double tau_quadratic(double c13, double c23) {
    return 2 * c13 * c23 + 2 * c13 + 2 * c23 - c13 * c13 - c23 * c23 - 1;
}

inline ConditionReport check_conditions(const BoundaryData& bd) {
    for (double t : bd.t0)
        if (!(t > 0)) throw Error(ErrorKind::InvalidParameter, "t0 entries must be positive");
    ConditionReport r;
    const auto& t = bd.t0;
    for (int i = 0; i < 3; ++i) r.cond_3_1[i] = (t[(i + 1) % 3] + t[(i + 2) % 3]) / t[i] > 1;
    std::array<double, 3> s = t;
    std::sort(s.begin(), s.end(), std::greater<>());
    const double a = s[0] / s[2], b = s[1] / s[2];
    // q is concave in each variable, so the rectangle minimum sits at a corner
    r.tau_margin = std::min({tau_quadratic(1, 1), tau_quadratic(a, 1), tau_quadratic(1, b),
                             tau_quadratic(a, b)});
    r.sigma_floor = s[2];
    return r;
}

} // namespace cce
