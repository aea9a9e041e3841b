#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/jacobi_elliptic.hpp>

#include "doctest.h"
#include "soliton/elliptic.hpp"
#include "soliton/errors.hpp"
#include "soliton/quadrature.hpp"

using namespace soliton;
using namespace soliton::elliptic;

namespace {

// R_F = 1/2 ∫_0^∞ dt / sqrt((t+x)(t+y)(t+z)); substitute t = s² to remove
// the endpoint singularity when an argument vanishes.
double rf_by_quadrature(double x, double y, double z) {
    auto f = [&](double s) {
        const double t = s * s;
        return s / std::sqrt((t + x) * (t + y) * (t + z));
    };
    return quad::integrate_to_infinity(f, 0.0).value;
}

double rj_by_quadrature(double x, double y, double z, double p) {
    auto f = [&](double s) {
        const double t = s * s;
        return 3.0 * s / ((t + p) * std::sqrt((t + x) * (t + y) * (t + z)));
    };
    return quad::integrate_to_infinity(f, 0.0).value;
}

// Π via t = sin θ, which keeps the integrand smooth up to u = ±1.
double pi_by_quadrature(double u, double alpha2, double k) {
    auto f = [&](double th) {
        const double s = std::sin(th);
        return 1.0 / ((1.0 - alpha2 * s * s) * std::sqrt(1.0 - k * k * s * s));
    };
    return quad::integrate(f, 0.0, std::asin(u)).value;
}

// Fourth-order Runge-Kutta on s' = cd, c' = -sd, d' = -k²sc.
std::array<double, 3> jacobi_by_rk4(double x, double k, int steps) {
    std::array<double, 3> y{0.0, 1.0, 1.0};
    const double h = x / steps;
    auto rhs = [k](const std::array<double, 3>& v) {
        return std::array<double, 3>{v[1] * v[2], -v[0] * v[2], -k * k * v[0] * v[1]};
    };
    for (int i = 0; i < steps; ++i) {
        auto k1 = rhs(y);
        std::array<double, 3> t{};
        for (int j = 0; j < 3; ++j) t[j] = y[j] + 0.5 * h * k1[j];
        auto k2 = rhs(t);
        for (int j = 0; j < 3; ++j) t[j] = y[j] + 0.5 * h * k2[j];
        auto k3 = rhs(t);
        for (int j = 0; j < 3; ++j) t[j] = y[j] + h * k3[j];
        auto k4 = rhs(t);
        for (int j = 0; j < 3; ++j) y[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    }
    return y;
}

// Laurent series written out independently of the library, no duplication.
std::pair<double, double> wp_series(double z, double g2, double g3, int terms) {
    std::vector<double> c(terms + 2, 0.0);
    c[2] = g2 / 20.0;
    c[3] = g3 / 28.0;
    for (int k = 4; k < terms; ++k) {
        double s = 0.0;
        for (int m = 2; m <= k - 2; ++m) s += c[m] * c[k - m];
        c[k] = 3.0 * s / ((2.0 * k + 1.0) * (k - 3.0));
    }
    double p = 1.0 / (z * z), dp = -2.0 / (z * z * z);
    for (int k = 2; k < terms; ++k) {
        p += c[k] * std::pow(z, 2 * k - 2);
        dp += (2 * k - 2) * c[k] * std::pow(z, 2 * k - 3);
    }
    return {p, dp};
}

}  // namespace

TEST_CASE("carlson_rf trivial identities") {
    CHECK(carlson_rf(1.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(carlson_rf(4.0, 4.0, 4.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("carlson_rf matches quadrature at (0,1,2)") {
    const double oracle = rf_by_quadrature(0.0, 1.0, 2.0);
    CHECK(std::abs(carlson_rf(0.0, 1.0, 2.0) - oracle) < 1e-12);
    // frozen value (DLMF 19.39 example: R_F(0,1,2) = 1.3110287771461)
    CHECK(std::abs(oracle - 1.3110287771461) < 1e-12);
}

TEST_CASE("carlson_rf is symmetric and satisfies the duplication theorem") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.01, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double x = U(rng), y = U(rng), z = U(rng);
        const double v = carlson_rf(x, y, z);
        CHECK(std::abs(carlson_rf(z, x, y) - v) < 1e-14 * v);
        CHECK(std::abs(carlson_rf(y, z, x) - v) < 1e-14 * v);
        const double lam = std::sqrt(x * y) + std::sqrt(x * z) + std::sqrt(y * z);
        const double dup = carlson_rf((x + lam) / 4, (y + lam) / 4, (z + lam) / 4);
        CHECK(std::abs(dup - v) < 1e-13 * v);
    }
}

TEST_CASE("carlson_rf rejects two zero arguments") {
    CHECK_THROWS_AS(carlson_rf(0.0, 0.0, 1.0), DivergenceError);
    CHECK_THROWS_AS(carlson_rf(-1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("carlson_rj trivial identities and quadrature") {
    CHECK(carlson_rj(1, 1, 1, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(carlson_rj(4, 4, 4, 4) == doctest::Approx(0.125).epsilon(1e-15));
    const double oracle = rj_by_quadrature(0.0, 1.0, 2.0, 3.0);
    CHECK(std::abs(carlson_rj(0.0, 1.0, 2.0, 3.0) - oracle) < 1e-11);
    CHECK(std::abs(oracle - 0.77688623778582) < 1e-12);  // DLMF 19.39 example
    CHECK_THROWS_AS(carlson_rj(1, 2, 3, 0), PoleError);
}

TEST_CASE("carlson_rj symmetric in x,y,z") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.01, 5.0);
    for (int i = 0; i < 100; ++i) {
        const double x = U(rng), y = U(rng), z = U(rng), p = U(rng);
        const double v = carlson_rj(x, y, z, p);
        CHECK(std::abs(carlson_rj(z, x, y, p) - v) < 1e-13 * v);
        CHECK(std::abs(carlson_rj(y, x, z, p) - v) < 1e-13 * v);
    }
}

TEST_CASE("complex Carlson forms reduce to the real ones") {
    const Complex v = carlson_rf(Complex(0.3), Complex(1.2), Complex(2.5));
    CHECK(std::abs(v - carlson_rf(0.3, 1.2, 2.5)) < 1e-15);
    const Complex w = carlson_rj(Complex(0.3), Complex(1.2), Complex(2.5), Complex(0.7));
    CHECK(std::abs(w - carlson_rj(0.3, 1.2, 2.5, 0.7)) < 1e-14);
    // conjugate pair gives a real value
    const Complex c(1.5, 0.8);
    const Complex r = carlson_rf(Complex(0.0), c, std::conj(c));
    CHECK(std::abs(r.imag()) < 1e-15);
}

TEST_CASE("ellint_pi special values") {
    CHECK(ellint_pi(0.0, 0.3, 0.4) == 0.0);
    for (double u : {-0.9, -0.2, 0.3, 0.7, 1.0})
        CHECK(std::abs(ellint_pi(u, 0.0, 0.0) - std::asin(u)) < 1e-15);
    const double oracle = pi_by_quadrature(0.5, 0.25, 0.5);
    CHECK(std::abs(ellint_pi(0.5, 0.25, 0.5) - oracle) < 1e-12);
}

TEST_CASE("ellint_pi reports a pole on the path") {
    try {
        ellint_pi(0.8, 4.0, 0.3);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("t* = 0.5") != std::string::npos);
    }
}

TEST_CASE("ellint_pi agrees with quadrature on random admissible inputs") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> Uu(-1.0, 1.0), Uk(0.0, 0.99), Ua(-4.0, 0.95);
    for (int i = 0; i < 100; ++i) {
        const double u = Uu(rng), k = Uk(rng), a2 = Ua(rng);
        CHECK(std::abs(ellint_pi(u, a2, k) - pi_by_quadrature(u, a2, k)) < 1e-11);
    }
}

TEST_CASE("jacobi_sn_cn_dn initial and degenerate values") {
    auto t = jacobi_sn_cn_dn(0.0, 0.7);
    CHECK(t.sn == 0.0);
    CHECK(t.cn == 1.0);
    CHECK(t.dn == 1.0);
    for (double x : {-2.0, 0.3, 1.7, 9.0}) {
        auto d = jacobi_sn_cn_dn(x, 0.0);
        CHECK(d.sn == doctest::Approx(std::sin(x)).epsilon(1e-15));
        CHECK(d.cn == doctest::Approx(std::cos(x)).epsilon(1e-15));
        CHECK(d.dn == 1.0);
        auto h = jacobi_sn_cn_dn(x, 1.0);
        CHECK(h.sn == doctest::Approx(std::tanh(x)).epsilon(1e-15));
    }
}

TEST_CASE("jacobi_sn_cn_dn matches RK4 integration at (1, 0.5)") {
    const auto oracle = jacobi_by_rk4(1.0, 0.5, 20000);
    const auto t = jacobi_sn_cn_dn(1.0, 0.5);
    CHECK(std::abs(t.sn - oracle[0]) < 1e-10);
    CHECK(std::abs(t.cn - oracle[1]) < 1e-10);
    CHECK(std::abs(t.dn - oracle[2]) < 1e-10);
}

TEST_CASE("jacobi_sn_cn_dn agrees with Boost.Math") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> Ux(-30.0, 30.0), Uk(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = Ux(rng), k = Uk(rng);
        double cn = 0, dn = 0;
        const double sn = boost::math::jacobi_elliptic(k, x, &cn, &dn);
        const auto t = jacobi_sn_cn_dn(x, k);
        REQUIRE(std::abs(t.sn - sn) < 1e-12);
        REQUIRE(std::abs(t.cn - cn) < 1e-12);
        REQUIRE(std::abs(t.dn - dn) < 1e-12);
    }
}

TEST_CASE("complex Carlson forms agree with the real ones off the axis limit") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.1, 5.0);
    for (int i = 0; i < 100; ++i) {
        const double x = U(rng), y = U(rng), z = U(rng), p = U(rng);
        const Complex rf = carlson_rf(Complex(x), Complex(y), Complex(z));
        const Complex rj = carlson_rj(Complex(x), Complex(y), Complex(z), Complex(p));
        REQUIRE(std::abs(rf - carlson_rf(x, y, z)) < 1e-14 * std::abs(rf));
        REQUIRE(std::abs(rj - carlson_rj(x, y, z, p)) < 1e-13 * std::abs(rj));
    }
}

TEST_CASE("jacobi identities hold on random points") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> Ux(-30.0, 30.0), Uk(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = Ux(rng), k = Uk(rng);
        const auto t = jacobi_sn_cn_dn(x, k);
        REQUIRE(std::abs(t.sn * t.sn + t.cn * t.cn - 1.0) < 1e-13);
        REQUIRE(std::abs(t.dn * t.dn + k * k * t.sn * t.sn - 1.0) < 1e-13);
    }
}

TEST_CASE("jacobi functions have quarter period K") {
    for (double k : {0.2, 0.5, 0.8, 0.95}) {
        const double K = complete_k(k);
        const auto t = jacobi_sn_cn_dn(K, k);
        CHECK(std::abs(t.sn - 1.0) < 1e-13);
        CHECK(std::abs(t.cn) < 1e-8);
    }
}

TEST_CASE("elliptic modulus") {
    const auto m = EllipticModulus::from_k(0.6);
    CHECK(std::abs(m.k * m.k + m.k_prime * m.k_prime - 1.0) < 1e-14);
    CHECK_THROWS_AS(EllipticModulus::from_k(1.5), DomainError);
}

TEST_CASE("weierstrass invariants: roots and Vieta") {
    for (auto [g2, g3] : {std::pair{0.0, 1.0}, {4.0, 0.0}, {3.0, -1.5}, {10.0, 2.0}}) {
        const auto inv = WeierstrassInvariants::from(g2, g3);
        const Complex s = inv.roots[0] + inv.roots[1] + inv.roots[2];
        CHECK(std::abs(s) < 1e-12);
        const Complex e2 = inv.roots[0] * inv.roots[1] + inv.roots[0] * inv.roots[2] +
                           inv.roots[1] * inv.roots[2];
        const Complex e3 = inv.roots[0] * inv.roots[1] * inv.roots[2];
        CHECK(std::abs(4.0 * e2 + g2) < 1e-12);  // 4u³-g2u-g3 = 4(u³ + e2 u - e3)
        CHECK(std::abs(4.0 * e3 - g3) < 1e-12);
    }
}

TEST_CASE("weierstrass half period: equianharmonic value") {
    const auto inv = WeierstrassInvariants::from(0.0, 1.0);
    // ω = Γ(1/3)³ / (4π) for g2 = 0, g3 = 1
    const double expected = std::pow(std::tgamma(1.0 / 3.0), 3) / (4.0 * std::numbers::pi);
    CHECK(std::abs(inv.real_half_period() - expected) < 1e-13);
}

TEST_CASE("weierstrass_p pole behaviour x²℘ -> 1") {
    const auto inv = WeierstrassInvariants::from(0.0, 1.0);
    double prev = 1.0;
    for (double x : {1e-1, 1e-2, 1e-3}) {
        const double v = x * x * weierstrass_p(x, inv, 1e-4).p;
        CHECK(std::abs(v - 1.0) <= prev);
        prev = std::abs(v - 1.0);
    }
    CHECK(prev < 1e-12);
    CHECK_THROWS_AS(weierstrass_p(2e-4, inv), PoleError);
}

TEST_CASE("weierstrass_p at 0.5 matches series oracle and Carlson inverse") {
    const auto inv = WeierstrassInvariants::from(0.0, 1.0);
    const auto v = weierstrass_p(0.5, inv);
    const auto [p, dp] = wp_series(0.5, 0.0, 1.0, 40);
    CHECK(std::abs(v.p - p) < 1e-10);
    CHECK(std::abs(v.p_prime - dp) < 1e-10);
    // x = R_F(℘-e1, ℘-e2, ℘-e3) on (0, ω]
    const Complex xinv = carlson_rf(v.p - inv.roots[0], v.p - inv.roots[1], v.p - inv.roots[2]);
    CHECK(std::abs(xinv.real() - 0.5) < 1e-13);
}

TEST_CASE("weierstrass_p is decreasing on the first half period") {
    const auto inv = WeierstrassInvariants::from(0.0, 1.0);
    const double omega = inv.real_half_period();
    for (int i = 1; i < 50; ++i) {
        const double x = omega * i / 50.0;
        const auto v = weierstrass_p(x, inv);
        CHECK(v.p_prime < 0.0);
        const double f = 4 * v.p * v.p * v.p - 1.0;
        CHECK(std::abs(v.p_prime + std::sqrt(f)) < 1e-10 * std::max(1.0, std::abs(v.p)));
    }
}

TEST_CASE("weierstrass ODE residual on a log grid approaching the pole") {
    for (auto [g2, g3] : {std::pair{0.0, 1.0}, {4.0, 0.0}, {3.0, -1.5}}) {
        const auto inv = WeierstrassInvariants::from(g2, g3);
        const double omega = inv.real_half_period();
        for (int i = 0; i <= 60; ++i) {
            const double x = 1e-3 * std::pow(2.0 * omega / 1e-3, i / 61.0);
            const auto v = weierstrass_p(x, inv);
            const double res = v.p_prime * v.p_prime - (4 * v.p * v.p * v.p - g2 * v.p - g3);
            CHECK(std::abs(res) < 1e-10 * std::max(1.0, std::pow(std::abs(v.p), 3)));
        }
    }
}

TEST_CASE("weierstrass_p rectangular lattice via Carlson inverse") {
    const auto inv = WeierstrassInvariants::from(4.0, 0.0);
    CHECK(std::abs(inv.roots[0].real() - 1.0) < 1e-14);
    for (double x : {0.2, 0.8, 1.2}) {
        const auto v = weierstrass_p(x, inv);
        const Complex xinv =
            carlson_rf(v.p - inv.roots[0], v.p - inv.roots[1], v.p - inv.roots[2]);
        CHECK(std::abs(xinv.real() - x) < 1e-12);
    }
    // evenness and periodicity
    const double P = 2.0 * inv.real_half_period();
    const auto a = weierstrass_p(0.7, inv), b = weierstrass_p(-0.7, inv),
               c = weierstrass_p(0.7 + 3 * P, inv);
    CHECK(a.p == doctest::Approx(b.p).epsilon(1e-14));
    CHECK(a.p_prime == doctest::Approx(-b.p_prime).epsilon(1e-14));
    CHECK(a.p == doctest::Approx(c.p).epsilon(1e-12));
}

TEST_CASE("quadrature orientation") {
    auto f = [](double t) { return std::exp(-t) * std::cos(3 * t); };
    auto fwd = soliton::quad::integrate(f, 0.0, 7.0);
    auto rev = soliton::quad::integrate(f, 7.0, 0.0);
    CHECK(fwd.converged);
    CHECK(rev.converged);
    CHECK(rev.value == -fwd.value);
    double exact = (1 + std::exp(-7.0) * (3 * std::sin(21.0) - std::cos(21.0))) / 10.0;
    CHECK(std::abs(fwd.value - exact) < 1e-14);
}
