#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace soliton::quad {

struct Options {
    double abs_tol = 1e-14;
    double rel_tol = 1e-13;
    int max_intervals = 4000;
};

template <typename V>
struct Result {
    V value{};
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights attach to kXgk[1], kXgk[3], kXgk[5], kXgk[7].
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <typename V>
struct Panel {
    double a, b;
    V value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename V, typename F>
Panel<V> gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const V fc = f(c);
    V kronrod = fc * kWgk[7];
    V gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const V pair = f(c - dx) + f(c + dx);
        kronrod += pair * kWgk[j];
        if (j % 2 == 1) gauss += pair * kWg[j / 2];
    }
    kronrod *= h;
    gauss *= h;
    return {a, b, kronrod, magnitude(kronrod - gauss)};
}

}  // namespace detail

/// Integrates f over [a,b]; f may return double or std::complex<double>.
/// Globally adaptive: the panel with the largest error estimate is bisected.
template <typename F>
auto integrate(const F& f, double a, double b, const Options& opt = {})
    -> Result<decltype(f(a))> {
    using V = decltype(f(a));
    Result<V> out;
    if (a == b) return out;
    if (a > b) {
        out = integrate(f, b, a, opt);
        out.value = -out.value;
        return out;
    }

    std::priority_queue<detail::Panel<V>> panels;
    auto first = detail::gk15<V>(f, a, b);
    out.evaluations = 15;
    V total = first.value;
    double total_err = first.error;
    panels.push(first);

    while (total_err > std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total))) {
        if (static_cast<int>(panels.size()) >= opt.max_intervals) {
            out.converged = false;
            break;
        }
        auto worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval no longer splittable in double precision
            panels.push(worst);
            out.converged = false;
            break;
        }
        auto left = detail::gk15<V>(f, worst.a, mid);
        auto right = detail::gk15<V>(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }
    // Re-sum to shed accumulated rounding from the running updates.
    V sum{};
    double err = 0.0;
    while (!panels.empty()) {
        sum += panels.top().value;
        err += panels.top().error;
        panels.pop();
    }
    out.value = sum;
    out.error = err;
    return out;
}

/// Integral over [a, +inf) via t = a + s/(1-s).
template <typename F>
auto integrate_to_infinity(const F& f, double a, const Options& opt = {})
    -> Result<decltype(f(a))> {
    using V = decltype(f(a));
    auto g = [&](double s) -> V {
        if (s >= 1.0) return V{};
        const double one_minus = 1.0 - s;
        return f(a + s / one_minus) * (1.0 / (one_minus * one_minus));
    };
    return integrate(g, 0.0, 1.0, opt);
}

}  // namespace soliton::quad
