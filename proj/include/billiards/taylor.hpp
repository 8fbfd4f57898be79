#ifndef BILLIARDS_TAYLOR_HPP
#define BILLIARDS_TAYLOR_HPP

#include <array>
#include <cmath>

namespace billiards {

// Univariate truncated Taylor series: coeffs[k] = f^(k)(s0) / k!.
// Order is a compile-time bound; all arithmetic propagates exactly
// through products, quotients, sqrt and exp.
template <int N>
struct Jet {
    static_assert(N >= 0 && N <= 8);
    std::array<double, N + 1> c{};

    Jet() = default;
    explicit Jet(double value) { c[0] = value; }

    static Jet variable(double value) {
        Jet j;
        j.c[0] = value;
        if constexpr (N >= 1) j.c[1] = 1.0;
        return j;
    }

    double value() const { return c[0]; }

    double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[static_cast<size_t>(k)] * f;
    }

    Jet operator-() const {
        Jet r;
        for (int k = 0; k <= N; ++k) r.c[k] = -c[k];
        return r;
    }
    Jet& operator+=(const Jet& o) {
        for (int k = 0; k <= N; ++k) c[k] += o.c[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int k = 0; k <= N; ++k) c[k] -= o.c[k];
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, double b) { a.c[0] += b; return a; }
    friend Jet operator+(double a, Jet b) { b.c[0] += a; return b; }
    friend Jet operator-(Jet a, double b) { a.c[0] -= b; return a; }
    friend Jet operator-(double a, const Jet& b) { return -b + a; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int n = 0; n <= N; ++n) {
            double acc = 0.0;
            for (int k = 0; k <= n; ++k) acc += a.c[k] * b.c[n - k];
            r.c[n] = acc;
        }
        return r;
    }
    friend Jet operator*(Jet a, double b) {
        for (int k = 0; k <= N; ++k) a.c[k] *= b;
        return a;
    }
    friend Jet operator*(double a, Jet b) { return b * a; }

    friend Jet operator/(const Jet& a, const Jet& b) {
        Jet r;
        r.c[0] = a.c[0] / b.c[0];
        for (int n = 1; n <= N; ++n) {
            double acc = a.c[n];
            for (int k = 1; k <= n; ++k) acc -= b.c[k] * r.c[n - k];
            r.c[n] = acc / b.c[0];
        }
        return r;
    }
    friend Jet operator/(Jet a, double b) {
        for (int k = 0; k <= N; ++k) a.c[k] /= b;
        return a;
    }
    friend Jet operator/(double a, const Jet& b) { return Jet(a) / b; }
};

template <int N>
Jet<N> sqrt(const Jet<N>& f) {
    Jet<N> r;
    r.c[0] = std::sqrt(f.c[0]);
    for (int n = 1; n <= N; ++n) {
        double acc = f.c[n];
        for (int k = 1; k < n; ++k) acc -= r.c[k] * r.c[n - k];
        r.c[n] = acc / (2.0 * r.c[0]);
    }
    return r;
}

template <int N>
Jet<N> exp(const Jet<N>& f) {
    Jet<N> r;
    r.c[0] = std::exp(f.c[0]);
    for (int n = 1; n <= N; ++n) {
        double acc = 0.0;
        for (int k = 1; k <= n; ++k) acc += k * f.c[k] * r.c[n - k];
        r.c[n] = acc / n;
    }
    return r;
}

// Taylor coefficients of cos(w*s) and sin(w*s) at s0, as jets in s.
// d^j cos(w s) = w^j cos(w s + j pi/2); the quarter-turn pattern avoids
// re-evaluating trig per order.
template <int N>
void trig_jets(double w, double s0, Jet<N>& cos_out, Jet<N>& sin_out) {
    const double c = std::cos(w * s0);
    const double s = std::sin(w * s0);
    double wj = 1.0;   // w^j
    double fact = 1.0; // j!
    double dc = c, ds = s;
    for (int j = 0; j <= N; ++j) {
        if (j > 0) {
            wj *= w;
            fact *= j;
            const double ndc = -ds;  // derivative of cos chain
            ds = dc;
            dc = ndc;
        }
        cos_out.c[j] = wj * dc / fact;
        sin_out.c[j] = wj * ds / fact;
    }
}

}  // namespace billiards

#endif
