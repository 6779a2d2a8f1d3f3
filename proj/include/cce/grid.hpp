#pragma once

// Piecewise-polynomial solution representation shared by the solver and the
// diagnostics. On interval i = [x_i, x_i + h] with local s in [0,1]:
//   y(s)   = Y_i + h s V_i + h^2 sum_l A_il psi_l(s)
//   y'(s)  = V_i + h sum_l A_il psi_l'(s)
//   y''(s) = sum_l A_il L_l(s)
// where L_l are the Lagrange polynomials on the Gauss points and psi_l their
// first and second antiderivatives vanishing at s = 0.

#include "errors.hpp"
#include "model.hpp"
#include "ode_system.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <memory>
#include <mutex>
#include <vector>

namespace cce {

struct CollocationBasis {
    int k = 0;
    std::vector<double> rho;  // Gauss points on (0,1)
    // coefficient vectors in s (ascending powers)
    std::vector<std::vector<double>> L, dpsi, psi;

    static double poly(const std::vector<double>& a, double s) {
        double r = 0;
        for (auto it = a.rbegin(); it != a.rend(); ++it) r = r * s + *it;
        return r;
    }
};

inline CollocationBasis make_basis(int k) {
    if (k < 1 || k > 8) throw Error(ErrorKind::InvalidParameter, "collocation stages must be in [1,8]");
    CollocationBasis b;
    b.k = k;
    // Golub-Welsch for Gauss-Legendre
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(k, k);
    for (int i = 1; i < k; ++i) J(i, i - 1) = J(i - 1, i) = i / std::sqrt(4.0 * i * i - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    for (int i = 0; i < k; ++i) b.rho.push_back(0.5 * (es.eigenvalues()[i] + 1));
    std::sort(b.rho.begin(), b.rho.end());
    Eigen::MatrixXd V(k, k);
    for (int q = 0; q < k; ++q)
        for (int p = 0; p < k; ++p) V(q, p) = std::pow(b.rho[q], p);
    const Eigen::MatrixXd C = V.fullPivLu().inverse();  // column l = coefficients of L_l
    for (int l = 0; l < k; ++l) {
        std::vector<double> a(k), d(k + 1, 0.0), p(k + 2, 0.0);
        for (int j = 0; j < k; ++j) {
            a[j] = C(j, l);
            d[j + 1] = a[j] / (j + 1);
            p[j + 2] = a[j] / ((j + 1.0) * (j + 2.0));
        }
        b.L.push_back(a);
        b.dpsi.push_back(d);
        b.psi.push_back(p);
    }
    return b;
}

inline const CollocationBasis& basis(int k) {
    static std::array<std::unique_ptr<CollocationBasis>, 9> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    if (k < 1 || k > 8) throw Error(ErrorKind::InvalidParameter, "collocation stages must be in [1,8]");
    if (!cache[k]) cache[k] = std::make_unique<CollocationBasis>(make_basis(k));
    return *cache[k];
}

struct PointValue {
    Vec4<double> y{}, dy{}, ddy{};
};

struct SolutionGrid {
    SymmetryClass cls = SymmetryClass::SpTimesSp1;
    int n = 7;
    int stages = 3;
    std::vector<double> x;   // N+1 nodes, x_0 = 0, x_N = 1
    Eigen::MatrixXd y, dy;   // m x (N+1)
    Eigen::MatrixXd acc;     // m x (N*stages) second derivatives at Gauss points; may be empty
    std::vector<DerivedFields> fields;

    int m() const { return unknown_count(cls); }
    int intervals() const { return int(x.size()) - 1; }
    bool has_polynomial() const { return acc.cols() == intervals() * stages && acc.cols() > 0; }

    void refresh_fields() {
        fields.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            Vec4<double> yy{}, dd{};
            for (int j = 0; j < m(); ++j) {
                yy[j] = y(j, i);
                dd[j] = dy(j, i);
            }
            fields[i] = derived_fields(yy, n, cls, &dd);
        }
    }

    int locate(double xv) const {
        auto it = std::upper_bound(x.begin(), x.end(), xv);
        int i = int(it - x.begin()) - 1;
        return std::clamp(i, 0, intervals() - 1);
    }

    // value on interval i at local coordinate s
    PointValue eval_local(int i, double s) const {
        PointValue r;
        const double h = x[i + 1] - x[i];
        const int mm = m();
        if (has_polynomial()) {
            const CollocationBasis& b = basis(stages);
            for (int j = 0; j < mm; ++j) {
                double yv = y(j, i) + h * s * dy(j, i), dv = dy(j, i), av = 0;
                for (int l = 0; l < stages; ++l) {
                    const double A = acc(j, i * stages + l);
                    yv += h * h * A * CollocationBasis::poly(b.psi[l], s);
                    dv += h * A * CollocationBasis::poly(b.dpsi[l], s);
                    av += A * CollocationBasis::poly(b.L[l], s);
                }
                r.y[j] = yv;
                r.dy[j] = dv;
                r.ddy[j] = av;
            }
        } else {
            // cubic Hermite from node values and slopes
            const double s2 = s * s, s3 = s2 * s;
            const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2,
                         h11 = s3 - s2;
            const double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1, d01 = -6 * s2 + 6 * s,
                         d11 = 3 * s2 - 2 * s;
            const double e00 = 12 * s - 6, e10 = 6 * s - 4, e01 = -12 * s + 6, e11 = 6 * s - 2;
            for (int j = 0; j < mm; ++j) {
                const double a = y(j, i), b = y(j, i + 1), da = dy(j, i), db = dy(j, i + 1);
                r.y[j] = h00 * a + h10 * h * da + h01 * b + h11 * h * db;
                r.dy[j] = (d00 * a + d01 * b) / h + d10 * da + d11 * db;
                r.ddy[j] = (e00 * a + e01 * b) / (h * h) + (e10 * da + e11 * db) / h;
            }
        }
        return r;
    }

    PointValue eval(double xv) const {
        const int i = locate(xv);
        return eval_local(i, (xv - x[i]) / (x[i + 1] - x[i]));
    }
};

// Reduced-class state lifted to four components (t copies for symmetric slots).
inline Vec4<double> full_components(SymmetryClass cls, const Vec4<double>& v) {
    return expand_state(cls, v);
}

} // namespace cce
