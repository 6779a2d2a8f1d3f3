#pragma once

// Truncated power series a_0 + a_1 s + ... + a_{L-1} s^{L-1} with arithmetic
// closed under truncation. Operands must share the same length.

#include <cassert>
#include <cmath>
#include <type_traits>
#include <vector>

namespace cce {

template <class R = double>
struct Series {
    std::vector<R> c;

    Series() = default;
    explicit Series(std::size_t len, R constant = R(0)) : c(len, R(0)) {
        if (len) c[0] = constant;
    }
    std::size_t size() const { return c.size(); }
    R& operator[](std::size_t i) { return c[i]; }
    const R& operator[](std::size_t i) const { return c[i]; }

    static Series variable(std::size_t len, R at) {  // at + s
        Series r(len, at);
        if (len > 1) r.c[1] = R(1);
        return r;
    }

    // d/ds, truncated to the same length
    Series derivative() const {
        Series r(size());
        for (std::size_t i = 1; i < size(); ++i) r.c[i - 1] = R(i) * c[i];
        return r;
    }

    Series& operator+=(const Series& o) {
        for (std::size_t i = 0; i < size(); ++i) c[i] += o.c[i];
        return *this;
    }
    Series& operator-=(const Series& o) {
        for (std::size_t i = 0; i < size(); ++i) c[i] -= o.c[i];
        return *this;
    }
};

template <class R> Series<R> operator-(Series<R> a) {
    for (auto& x : a.c) x = -x;
    return a;
}
template <class R> Series<R> operator+(Series<R> a, const Series<R>& b) { return a += b; }
template <class R> Series<R> operator-(Series<R> a, const Series<R>& b) { return a -= b; }
template <class R> Series<R> operator*(const Series<R>& a, const Series<R>& b) {
    const std::size_t L = a.size();
    Series<R> r(L);
    for (std::size_t i = 0; i < L; ++i) {
        if (a.c[i] == R(0)) continue;
        for (std::size_t j = 0; i + j < L; ++j) r.c[i + j] += a.c[i] * b.c[j];
    }
    return r;
}
template <class R> Series<R> operator/(const Series<R>& a, const Series<R>& b) {
    const std::size_t L = a.size();
    Series<R> q(L);
    const R inv = R(1) / b.c[0];
    for (std::size_t k = 0; k < L; ++k) {
        R s = a.c[k];
        for (std::size_t j = 1; j <= k; ++j) s -= b.c[j] * q.c[k - j];
        q.c[k] = s * inv;
    }
    return q;
}
template <class R> Series<R> operator+(Series<R> a, R b) { a.c[0] += b; return a; }
template <class R> Series<R> operator+(R b, Series<R> a) { a.c[0] += b; return a; }
template <class R> Series<R> operator-(Series<R> a, R b) { a.c[0] -= b; return a; }
template <class R> Series<R> operator-(R b, const Series<R>& a) { return -a + b; }
template <class R> Series<R> operator*(Series<R> a, R b) {
    for (auto& x : a.c) x *= b;
    return a;
}
template <class R> Series<R> operator*(R b, Series<R> a) { return a * b; }
template <class R> Series<R> operator/(Series<R> a, R b) {
    for (auto& x : a.c) x /= b;
    return a;
}
template <class R> Series<R> operator/(R b, const Series<R>& a) {
    return Series<R>(a.size(), b) / a;
}

// exp via the recurrence k e_k = sum_j j a_j e_{k-j}
template <class R> Series<R> exp(const Series<R>& a) {
    using std::exp;
    const std::size_t L = a.size();
    Series<R> e(L);
    e.c[0] = exp(a.c[0]);
    for (std::size_t k = 1; k < L; ++k) {
        R s(0);
        for (std::size_t j = 1; j <= k; ++j) s += R(j) * a.c[j] * e.c[k - j];
        e.c[k] = s / R(k);
    }
    return e;
}
template <class R> Series<R> expm1(const Series<R>& a) {
    using std::expm1;
    Series<R> e = exp(a);
    e.c[0] = expm1(a.c[0]);
    return e;
}

// Mixed arithmetic with plain doubles when R is wider (long double series).
template <class R> requires(!std::is_same_v<R, double>) Series<R> operator*(Series<R> a, double b) { return a * R(b); }
template <class R> requires(!std::is_same_v<R, double>) Series<R> operator*(double b, Series<R> a) { return a * R(b); }
template <class R> requires(!std::is_same_v<R, double>) Series<R> operator+(Series<R> a, double b) { return a + R(b); }
template <class R> requires(!std::is_same_v<R, double>) Series<R> operator+(double b, Series<R> a) { return a + R(b); }
template <class R> requires(!std::is_same_v<R, double>) Series<R> operator-(Series<R> a, double b) { return a - R(b); }
template <class R> requires(!std::is_same_v<R, double>) Series<R> operator-(double b, Series<R> a) { return R(b) - a; }
template <class R> requires(!std::is_same_v<R, double>) Series<R> operator/(Series<R> a, double b) { return a / R(b); }
template <class R> requires(!std::is_same_v<R, double>) Series<R> operator/(double b, const Series<R>& a) { return R(b) / a; }

} // namespace cce
