#pragma once

// Special functions: Carlson symmetric integrals, Legendre's third-kind
// integral, Jacobi sn/cn/dn and the Weierstrass p-function on the real line.

#include <array>
#include <complex>

#include "soliton/sl2.hpp"

namespace soliton::elliptic {

/// Modulus pair with k^2 + k'^2 = 1.
struct EllipticModulus {
    double k = 0.0;
    double k_prime = 1.0;

    static EllipticModulus from_k(double k);
};

// Carlson integrals.  The real overloads validate their arguments; the complex
// overloads assume the caller stays inside the cut plane.
double carlson_rf(double x, double y, double z);
double carlson_rc(double x, double y);
double carlson_rj(double x, double y, double z, double p);
double carlson_rd(double x, double y, double z);
Complex carlson_rf(Complex x, Complex y, Complex z);
Complex carlson_rc(Complex x, Complex y);
Complex carlson_rj(Complex x, Complex y, Complex z, Complex p);

/// Π(u; α², k) = ∫_0^u dt / ((1 - α²t²) √(1-t²) √(1-k²t²)), |u| <= 1.
/// Throws DomainError when 1 - α²t² vanishes on [0,u].
double ellint_pi(double u, double alpha2, double k);

/// Same integral with the parameter m = k² given directly (m may be negative).
double ellint_pi_m(double u, double alpha2, double m);

/// Analytic continuation of ellint_pi_m through the Carlson forms.
Complex ellint_pi_m(Complex u, Complex alpha2, Complex m);

struct JacobiTriple {
    double sn;
    double cn;
    double dn;
};

/// sn, cn, dn by descending Landen transformation; 0 <= k <= 1.
JacobiTriple jacobi_sn_cn_dn(double x, double k);

/// Complete integral K(k).
double complete_k(double k);

/// 4u³ - g2 u - g3 with its roots.  roots[0] is the largest real root; for a
/// single real root roots[1] has positive imaginary part.
struct WeierstrassInvariants {
    double g2 = 0.0;
    double g3 = 0.0;
    std::array<Complex, 3> roots{};

    static WeierstrassInvariants from(double g2, double g3);

    /// g2³ - 27 g3²; positive for three real roots.
    double discriminant() const { return g2 * g2 * g2 - 27.0 * g3 * g3; }
    /// Real half-period: ℘ has poles at integer multiples of 2ω on the real axis.
    double real_half_period() const;
    /// Half-period along the imaginary axis.
    double imag_half_period() const;

    // Filled by from(); the periods are needed on every ℘ evaluation.
    double omega_re = 0.0;
    double omega_im = 0.0;
};

struct WpValue {
    double p;
    double p_prime;
};

inline constexpr double kDefaultPoleExclusion = 1e-3;

/// ℘(x) and ℘'(x) for real x: Laurent series near the origin plus duplication.
/// Throws PoleError when x lies within `exclusion` of a real lattice point.
WpValue weierstrass_p(double x, const WeierstrassInvariants& inv,
                      double exclusion = kDefaultPoleExclusion);

/// As weierstrass_p without the exclusion check (returns inf at a lattice point).
WpValue weierstrass_p_unchecked(double x, const WeierstrassInvariants& inv);

/// Distance from x to the nearest real lattice point 2nω.
double distance_to_lattice(double x, const WeierstrassInvariants& inv);

}  // namespace soliton::elliptic
