#pragma once

// Banded LU with partial pivoting, column-major band storage as in LAPACK's
// gbtf2: A(i,j) lives at ab[(kl + ku + i - j) + j*ld], ld = 2*kl + ku + 1,
// the extra kl rows receiving pivoting fill-in.

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace cce {

class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(std::size_t(ld_) * n, 0.0) {}

    int size() const { return n_; }
    int kl() const { return kl_; }
    int ku() const { return ku_; }

    bool in_band(int i, int j) const { return i - j <= kl_ && j - i <= ku_ && i >= 0 && j >= 0 && i < n_ && j < n_; }

    double& at(int i, int j) { return ab_[std::size_t(kl_ + ku_ + i - j) + std::size_t(j) * ld_]; }
    double at(int i, int j) const { return ab_[std::size_t(kl_ + ku_ + i - j) + std::size_t(j) * ld_]; }

    double get(int i, int j) const { return in_band(i, j) ? at(i, j) : 0.0; }
    void add(int i, int j, double v) {
        if (!in_band(i, j)) throw Error(ErrorKind::Domain, "entry outside the band");
        at(i, j) += v;
    }
    void zero() { std::fill(ab_.begin(), ab_.end(), 0.0); }

    std::vector<double> multiply(const std::vector<double>& x) const {
        std::vector<double> y(n_, 0.0);
        for (int j = 0; j < n_; ++j)
            for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) y[i] += at(i, j) * x[j];
        return y;
    }

    // In-place factorization. Throws SingularJacobian with the failing column
    // and the value found there.
    void factorize() {
        const int kv = ku_ + kl_;
        piv_.assign(n_, 0);
        int ju = 0;
        for (int j = 0; j < n_; ++j) {
            const int km = std::min(kl_, n_ - 1 - j);
            int jp = 0;
            double best = std::abs(ab_[kv + std::size_t(j) * ld_]);
            for (int r = 1; r <= km; ++r) {
                const double v = std::abs(ab_[kv + r + std::size_t(j) * ld_]);
                if (v > best) best = v, jp = r;
            }
            piv_[j] = j + jp;
            const double p = at(j + jp, j);
            if (p == 0.0 || !std::isfinite(p))
                throw SingularJacobian("zero pivot in column " + std::to_string(j), -1, j, p);
            ju = std::max(ju, std::min(j + ku_ + jp, n_ - 1));
            if (jp != 0)
                for (int c = j; c <= ju; ++c) std::swap(at(j, c), at(j + jp, c));
            if (km > 0) {
                const double inv = 1.0 / at(j, j);
                for (int r = 1; r <= km; ++r) at(j + r, j) *= inv;
                for (int c = j + 1; c <= ju; ++c) {
                    const double a = at(j, c);
                    if (a == 0.0) continue;
                    for (int r = 1; r <= km; ++r) at(j + r, c) -= at(j + r, j) * a;
                }
            }
        }
        factored_ = true;
    }

    void solve(std::vector<double>& b) const {
        const int kv = ku_ + kl_;
        for (int j = 0; j < n_ - 1; ++j) {
            const int km = std::min(kl_, n_ - 1 - j);
            if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
            for (int r = 1; r <= km; ++r) b[j + r] -= at(j + r, j) * b[j];
        }
        for (int j = n_ - 1; j >= 0; --j) {
            b[j] /= at(j, j);
            const double v = b[j];
            for (int i = std::max(0, j - kv); i < j; ++i) b[i] -= at(i, j) * v;
        }
    }

    bool factored() const { return factored_; }

private:
    int n_ = 0, kl_ = 0, ku_ = 0, ld_ = 1;
    std::vector<double> ab_;
    std::vector<int> piv_;
    bool factored_ = false;
};

} // namespace cce
