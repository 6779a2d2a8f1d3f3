#pragma once

// Forward-mode dual numbers with a fixed gradient width. Used to get exact
// partial derivatives of the templated residuals.

#include <array>
#include <cmath>

namespace cce {

template <int W>
struct Dual {
    double v = 0;
    std::array<double, W> d{};

    Dual() = default;
    Dual(double value) : v(value) {}
    static Dual variable(double value, int slot) {
        Dual r(value);
        r.d[slot] = 1.0;
        return r;
    }

    Dual& operator+=(const Dual& o) {
        v += o.v;
        for (int i = 0; i < W; ++i) d[i] += o.d[i];
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        v -= o.v;
        for (int i = 0; i < W; ++i) d[i] -= o.d[i];
        return *this;
    }
    Dual& operator*=(const Dual& o) {
        for (int i = 0; i < W; ++i) d[i] = d[i] * o.v + v * o.d[i];
        v *= o.v;
        return *this;
    }
    Dual& operator/=(const Dual& o) {
        const double inv = 1.0 / o.v;
        v *= inv;
        for (int i = 0; i < W; ++i) d[i] = (d[i] - v * o.d[i]) * inv;
        return *this;
    }
};

template <int W> Dual<W> operator-(Dual<W> a) {
    a.v = -a.v;
    for (auto& x : a.d) x = -x;
    return a;
}
template <int W> Dual<W> operator+(Dual<W> a, const Dual<W>& b) { return a += b; }
template <int W> Dual<W> operator-(Dual<W> a, const Dual<W>& b) { return a -= b; }
template <int W> Dual<W> operator*(Dual<W> a, const Dual<W>& b) { return a *= b; }
template <int W> Dual<W> operator/(Dual<W> a, const Dual<W>& b) { return a /= b; }
template <int W> Dual<W> operator+(Dual<W> a, double b) { a.v += b; return a; }
template <int W> Dual<W> operator+(double b, Dual<W> a) { a.v += b; return a; }
template <int W> Dual<W> operator-(Dual<W> a, double b) { a.v -= b; return a; }
template <int W> Dual<W> operator-(double b, const Dual<W>& a) { return -a + b; }
template <int W> Dual<W> operator*(Dual<W> a, double b) {
    a.v *= b;
    for (auto& x : a.d) x *= b;
    return a;
}
template <int W> Dual<W> operator*(double b, Dual<W> a) { return a * b; }
template <int W> Dual<W> operator/(Dual<W> a, double b) { return a * (1.0 / b); }
template <int W> Dual<W> operator/(double b, const Dual<W>& a) { return Dual<W>(b) / a; }

template <int W> Dual<W> exp(Dual<W> a) {
    const double e = std::exp(a.v);
    a.v = e;
    for (auto& x : a.d) x *= e;
    return a;
}
template <int W> Dual<W> expm1(Dual<W> a) {
    const double e = std::exp(a.v);
    a.v = std::expm1(a.v);
    for (auto& x : a.d) x *= e;
    return a;
}

inline double value_of(double x) { return x; }
inline long double value_of(long double x) { return x; }
template <int W> double value_of(const Dual<W>& x) { return x.v; }

} // namespace cce
