#include "soliton/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_rc.hpp>
#include <boost/math/special_functions/ellint_rf.hpp>
#include <boost/math/special_functions/ellint_rj.hpp>

#include "soliton/errors.hpp"

namespace soliton::elliptic {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxDuplications = 200;

double mag(const Complex& v) { return std::abs(v); }

template <typename T>
T rf_impl(T x, T y, T z) {
    T a = (x + y + z) / 3.0;
    const T a0 = a;
    const double q = std::pow(3.0 * kEps, -1.0 / 6.0) *
                     std::max({mag(a0 - x), mag(a0 - y), mag(a0 - z)});
    const T x0 = x, y0 = y;
    double scale = 1.0;
    for (int n = 0; n < kMaxDuplications && scale * q >= mag(a); ++n) {
        const T sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const T lam = sx * sy + sx * sz + sy * sz;
        a = (a + lam) / 4.0;
        x = (x + lam) / 4.0;
        y = (y + lam) / 4.0;
        z = (z + lam) / 4.0;
        scale /= 4.0;
    }
    const T X = (a0 - x0) * scale / a;
    const T Y = (a0 - y0) * scale / a;
    const T Z = -X - Y;
    const T e2 = X * Y - Z * Z;
    const T e3 = X * Y * Z;
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / std::sqrt(a);
}

template <typename T>
T rc_impl(T x, T y) {
    T a = (x + 2.0 * y) / 3.0;
    const T a0 = a;
    const T y0 = y;
    const double q = std::pow(3.0 * kEps, -1.0 / 8.0) * mag(a0 - x);
    double scale = 1.0;
    for (int n = 0; n < kMaxDuplications && scale * q >= mag(a); ++n) {
        const T lam = 2.0 * std::sqrt(x) * std::sqrt(y) + y;
        a = (a + lam) / 4.0;
        x = (x + lam) / 4.0;
        y = (y + lam) / 4.0;
        scale /= 4.0;
    }
    const T s = (y0 - a0) * scale / a;
    const T s2 = s * s;
    return (1.0 + s2 * (3.0 / 10.0) + s2 * s * (1.0 / 7.0) + s2 * s2 * (3.0 / 8.0) +
            s2 * s2 * s * (9.0 / 22.0) + s2 * s2 * s2 * (159.0 / 208.0) +
            s2 * s2 * s2 * s * (9.0 / 8.0)) /
           std::sqrt(a);
}

template <typename T>
T rj_impl(T x, T y, T z, T p) {
    T a = (x + y + z + 2.0 * p) / 5.0;
    const T a0 = a;
    const T x0 = x, y0 = y, z0 = z;
    const T delta = (p - x) * (p - y) * (p - z);
    const double q = std::pow(kEps / 4.0, -1.0 / 6.0) *
                     std::max({mag(a0 - x), mag(a0 - y), mag(a0 - z), mag(a0 - p)});
    double scale = 1.0;  // 4^{-m}
    T sum = 0.0;
    for (int m = 0; m < kMaxDuplications && scale * q >= mag(a); ++m) {
        const T sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z), sp = std::sqrt(p);
        const T lam = sx * sy + sx * sz + sy * sz;
        const T d = (sp + sx) * (sp + sy) * (sp + sz);
        const T e = delta * (scale * scale * scale) / (d * d);
        sum += scale * rc_impl<T>(T(1.0), 1.0 + e) / d;
        a = (a + lam) / 4.0;
        x = (x + lam) / 4.0;
        y = (y + lam) / 4.0;
        z = (z + lam) / 4.0;
        p = (p + lam) / 4.0;
        scale /= 4.0;
    }
    const T X = (a0 - x0) * scale / a;
    const T Y = (a0 - y0) * scale / a;
    const T Z = (a0 - z0) * scale / a;
    const T P = (-X - Y - Z) / 2.0;
    const T e2 = X * Y + X * Z + Y * Z - 3.0 * P * P;
    const T e3 = X * Y * Z + 2.0 * e2 * P + 4.0 * P * P * P;
    const T e4 = (2.0 * X * Y * Z + e2 * P + 3.0 * P * P * P) * P;
    const T e5 = X * Y * Z * P * P;
    const T series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0 - 3.0 * e4 / 22.0 -
                     9.0 * e2 * e3 / 52.0 + 3.0 * e5 / 26.0;
    return scale * series / (a * std::sqrt(a)) + 6.0 * sum;
}

void check_rf_args(double x, double y, double z, const char* name) {
    if (x < 0.0 || y < 0.0 || z < 0.0 || std::isnan(x + y + z)) {
        std::ostringstream os;
        os << name << ": negative argument (" << x << ", " << y << ", " << z << ")";
        throw DomainError(os.str());
    }
    const int zeros = (x == 0.0) + (y == 0.0) + (z == 0.0);
    if (zeros >= 2) {
        std::ostringstream os;
        os << name << ": integral diverges with two or more zero arguments";
        throw DivergenceError(os.str());
    }
}

}  // namespace

EllipticModulus EllipticModulus::from_k(double k) {
    if (!(k >= 0.0 && k <= 1.0)) throw DomainError("elliptic modulus k must lie in [0,1]");
    return {k, std::sqrt((1.0 - k) * (1.0 + k))};
}

double carlson_rf(double x, double y, double z) {
    check_rf_args(x, y, z, "carlson_rf");
    return boost::math::ellint_rf(x, y, z);
}

double carlson_rc(double x, double y) {
    if (x < 0.0 || y <= 0.0) throw DomainError("carlson_rc: requires x >= 0, y > 0");
    return boost::math::ellint_rc(x, y);
}

double carlson_rj(double x, double y, double z, double p) {
    if (p == 0.0) throw PoleError("carlson_rj: pole at p = 0", 0.0, 0.0);
    if (p < 0.0) throw DomainError("carlson_rj: p < 0 (principal value) is not supported");
    check_rf_args(x, y, z, "carlson_rj");
    return boost::math::ellint_rj(x, y, z, p);
}

double carlson_rd(double x, double y, double z) {
    // R_D(x,y,z) = R_J(x,y,z,z)
    return carlson_rj(x, y, z, z);
}

Complex carlson_rf(Complex x, Complex y, Complex z) { return rf_impl<Complex>(x, y, z); }
Complex carlson_rc(Complex x, Complex y) { return rc_impl<Complex>(x, y); }
Complex carlson_rj(Complex x, Complex y, Complex z, Complex p) {
    return rj_impl<Complex>(x, y, z, p);
}

double ellint_pi_m(double u, double alpha2, double m) {
    if (!(std::abs(u) <= 1.0)) throw DomainError("ellint_pi: |u| must not exceed 1");
    if (u == 0.0) return 0.0;
    const double u2 = u * u;
    const double p = 1.0 - alpha2 * u2;
    if (p <= 0.0) {
        const double t_star = 1.0 / std::sqrt(alpha2);
        std::ostringstream os;
        os.precision(17);
        os << "ellint_pi: 1 - alpha^2 t^2 vanishes on the path at t* = " << t_star;
        throw DomainError(os.str());
    }
    const double x = (1.0 - u) * (1.0 + u);
    const double y = 1.0 - m * u2;
    if (y < 0.0) throw DomainError("ellint_pi: 1 - k^2 u^2 < 0");
    double result = u * carlson_rf(x, y, 1.0);
    if (alpha2 != 0.0) result += alpha2 / 3.0 * u * u2 * carlson_rj(x, y, 1.0, p);
    return result;
}

double ellint_pi(double u, double alpha2, double k) { return ellint_pi_m(u, alpha2, k * k); }

Complex ellint_pi_m(Complex u, Complex alpha2, Complex m) {
    if (u == 0.0) return 0.0;
    const Complex u2 = u * u;
    const Complex x = 1.0 - u2;
    const Complex y = 1.0 - m * u2;
    Complex result = u * carlson_rf(x, y, Complex(1.0));
    if (alpha2 != 0.0)
        result += alpha2 / 3.0 * u * u2 * carlson_rj(x, y, Complex(1.0), 1.0 - alpha2 * u2);
    return result;
}

JacobiTriple jacobi_sn_cn_dn(double x, double k) {
    if (!(k >= 0.0 && k <= 1.0)) throw DomainError("jacobi_sn_cn_dn: k must lie in [0,1]");
    if (k == 0.0) return {std::sin(x), std::cos(x), 1.0};
    double mc = (1.0 - k) * (1.0 + k);
    if (mc == 0.0) {
        const double c = 1.0 / std::cosh(x);
        return {std::tanh(x), c, c};
    }
    // Descending Landen / AGM (Bulirsch's sncndn).
    constexpr double kConv = 1e-9;
    constexpr int kMaxLevels = 16;
    std::array<double, kMaxLevels> em{}, en{};
    double a = 1.0, c = 1.0;
    int levels = 0;
    for (; levels < kMaxLevels; ++levels) {
        em[levels] = a;
        mc = std::sqrt(mc);
        en[levels] = mc;
        c = 0.5 * (a + mc);
        if (std::abs(a - mc) <= kConv * a) {
            ++levels;
            break;
        }
        mc *= a;
        a = c;
    }
    const double arg = x * c;
    double sn = std::sin(arg);
    double cn = std::cos(arg);
    double dn = 1.0;
    if (sn != 0.0) {
        double ratio = cn / sn;
        c *= ratio;
        for (int i = levels - 1; i >= 0; --i) {
            const double b = em[i];
            ratio *= c;
            c *= dn;
            dn = (en[i] + ratio) / (b + ratio);
            ratio = c / b;
        }
        const double s = 1.0 / std::sqrt(c * c + 1.0);
        sn = (sn >= 0.0) ? s : -s;
        cn = c * sn;
    }
    return {sn, cn, dn};
}

double complete_k(double k) {
    if (!(k >= 0.0 && k < 1.0)) throw DomainError("complete_k: k must lie in [0,1)");
    return boost::math::ellint_1(k);
}

// ---------------------------------------------------------------------------
// Weierstrass

namespace {

Complex newton_polish(Complex r, double g2, double g3) {
    for (int i = 0; i < 4; ++i) {
        const Complex f = 4.0 * r * r * r - g2 * r - g3;
        const Complex fp = 12.0 * r * r - g2;
        if (std::abs(fp) == 0.0) break;
        const Complex step = f / fp;
        r -= step;
        if (std::abs(step) <= 4.0 * kEps * std::max(1.0, std::abs(r))) break;
    }
    return r;
}

// Laurent coefficients c_k of ℘(z) = z^-2 + Σ_{k>=2} c_k z^{2k-2}.
std::array<double, 64> laurent_coefficients(double g2, double g3) {
    std::array<double, 64> c{};
    c[2] = g2 / 20.0;
    c[3] = g3 / 28.0;
    for (std::size_t k = 4; k < c.size(); ++k) {
        double s = 0.0;
        for (std::size_t m = 2; m <= k - 2; ++m) s += c[m] * c[k - m];
        c[k] = 3.0 * s / (static_cast<double>(2 * k + 1) * static_cast<double>(k - 3));
    }
    return c;
}

WpValue laurent(double z, double g2, double g3) {
    static thread_local double cached_g2 = std::numeric_limits<double>::quiet_NaN();
    static thread_local double cached_g3 = std::numeric_limits<double>::quiet_NaN();
    static thread_local std::array<double, 64> c{};
    if (g2 != cached_g2 || g3 != cached_g3) {
        c = laurent_coefficients(g2, g3);
        cached_g2 = g2;
        cached_g3 = g3;
    }
    const double z2 = z * z;
    double p = 1.0 / z2;
    double dp = -2.0 / (z2 * z);
    double zpow = z2;  // z^{2k-2} for k = 2
    for (std::size_t k = 2; k < c.size(); ++k) {
        const double term = c[k] * zpow;
        p += term;
        dp += static_cast<double>(2 * k - 2) * term / z;
        zpow *= z2;
    }
    return {p, dp};
}

}  // namespace

WeierstrassInvariants WeierstrassInvariants::from(double g2, double g3) {
    WeierstrassInvariants inv;
    inv.g2 = g2;
    inv.g3 = g3;
    // u³ + p u + q = 0 with p = -g2/4, q = -g3/4
    const double p = -g2 / 4.0;
    const double q = -g3 / 4.0;
    const double disc = g2 * g2 * g2 - 27.0 * g3 * g3;
    if (disc > 0.0) {
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double theta = std::acos(std::clamp(3.0 * q / (p * r), -1.0, 1.0));
        std::array<double, 3> e{};
        for (int j = 0; j < 3; ++j)
            e[j] = r * std::cos((theta - 2.0 * std::numbers::pi * j) / 3.0);
        std::sort(e.begin(), e.end(), std::greater<>());
        for (int j = 0; j < 3; ++j) inv.roots[j] = newton_polish(Complex(e[j]), g2, g3);
        for (auto& rt : inv.roots) rt = Complex(rt.real(), 0.0);
    } else {
        const double d = q * q / 4.0 + p * p * p / 27.0;
        const double sd = std::sqrt(std::max(d, 0.0));
        const double A = std::cbrt(-q / 2.0 + sd);
        const double B = std::cbrt(-q / 2.0 - sd);
        double real_root = A + B;
        const Complex pair(-real_root / 2.0, std::sqrt(3.0) / 2.0 * std::abs(A - B));
        real_root = newton_polish(Complex(real_root), g2, g3).real();
        Complex c = newton_polish(pair, g2, g3);
        if (c.imag() < 0.0) c = std::conj(c);
        inv.roots = {Complex(real_root), c, std::conj(c)};
        if (d == 0.0) {
            // repeated roots: sort real parts descending
            std::sort(inv.roots.begin(), inv.roots.end(),
                      [](Complex a, Complex b) { return a.real() > b.real(); });
        }
    }
    if (disc != 0.0) {
        const Complex e1 = inv.roots[0];
        inv.omega_re =
            carlson_rf(Complex(0.0), e1 - inv.roots[1], e1 - inv.roots[2]).real();
        if (disc > 0.0) {
            const Complex e3 = inv.roots[2];
            inv.omega_im = carlson_rf(e1 - e3, inv.roots[1] - e3, Complex(0.0)).real();
        } else {
            inv.omega_im =
                carlson_rf(Complex(0.0), inv.roots[1] - e1, inv.roots[2] - e1).real();
        }
    }
    return inv;
}

double WeierstrassInvariants::real_half_period() const {
    if (omega_re <= 0.0) throw DomainError("degenerate lattice: no finite real period");
    return omega_re;
}

double WeierstrassInvariants::imag_half_period() const {
    if (omega_im <= 0.0) throw DomainError("degenerate lattice: no finite imaginary period");
    return omega_im;
}

double distance_to_lattice(double x, const WeierstrassInvariants& inv) {
    const double period = 2.0 * inv.real_half_period();
    return std::abs(x - period * std::round(x / period));
}

WpValue weierstrass_p_unchecked(double x, const WeierstrassInvariants& inv) {
    const double omega = inv.real_half_period();
    const double period = 2.0 * omega;
    const double xr = x - period * std::round(x / period);
    const double sign = (xr < 0.0) ? -1.0 : 1.0;
    double z = std::abs(xr);
    if (z == 0.0) return {std::numeric_limits<double>::infinity(), 0.0};

    const double radius = 0.5 * std::min(omega, inv.imag_half_period());
    int doublings = 0;
    while (z > radius) {
        z *= 0.5;
        ++doublings;
    }
    WpValue v = laurent(z, inv.g2, inv.g3);
    for (int i = 0; i < doublings; ++i) {
        const double p = v.p, dp = v.p_prime;
        const double ddp = 6.0 * p * p - 0.5 * inv.g2;
        const double r = ddp / dp;
        v.p = -2.0 * p + 0.25 * r * r;
        v.p_prime = -dp + 3.0 * p * r - 0.25 * r * r * r;
    }
    v.p_prime *= sign;
    return v;
}

WpValue weierstrass_p(double x, const WeierstrassInvariants& inv, double exclusion) {
    const double d = distance_to_lattice(x, inv);
    if (d < exclusion) {
        std::ostringstream os;
        os.precision(6);
        os << "weierstrass_p: x = " << x << " lies within " << d << " of a lattice point";
        throw PoleError(os.str(), x, d);
    }
    return weierstrass_p_unchecked(x, inv);
}

}  // namespace soliton::elliptic
