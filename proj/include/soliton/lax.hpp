#pragma once

// Lax pair L, M for u_xx = f'(u)/2 with spectral parameter λ.
//
//   M = [[u_x, -(f - g)/(u+λ)], [u+λ, -u_x]],   L = ½[[0, f[u,u,-λ]], [1, 0]]
//
// where g(λ) = f(-λ) and f[.,.] are divided differences of f, so both are
// polynomial in u.

#include <vector>

#include "soliton/potential.hpp"
#include "soliton/sl2.hpp"

namespace soliton {

inline constexpr double kPoleGuard = 1e-9;

struct SpectralPoint {
    double lambda = 0.0;
    double g = 0.0;
    Complex sqrt_g;

    static SpectralPoint at(const Potential& pot, double lambda);
};

/// Throws PoleError when |u+λ| < kPoleGuard.
void check_pole(const SpectralPoint& sp, const JetPoint& jet);

Sl2Element build_L(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet);
Sl2Element build_M(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet);

/// The L displayed in closed form for the Jacobi and Weierstrass families
/// (L12 = ½(-3k2u²+2λk2u+k1-k2-k2λ²) and ½(4u-2λ)).  Kept for comparison; it
/// does not satisfy the Lax equation.
Sl2Element printed_L(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet);

/// Partial derivatives of L and M with respect to the jet variables and λ.
/// L does not depend on u_x, M does not depend on u_xx.
struct LaxJacobians {
    Sl2Element dL_du;
    Sl2Element dM_du;
    Sl2Element dM_dux;
    Sl2Element dL_dlambda;
    Sl2Element dM_dlambda;
};

LaxJacobians lax_jacobians(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet);

/// Total x-derivatives through the jet chain rule.
Sl2Element dx_L(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet);
Sl2Element dx_M(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet);

Sl2Element dlambda_L(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet);
Sl2Element dlambda_M(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet);

/// ‖D_xM + [M,L]‖ (Frobenius norm of the matrix).
double lax_residual(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet);
double lax_residual(const Solution& sol, const SpectralPoint& sp, double x);

struct ResidualStats {
    double max = 0.0;
    double mean = 0.0;
    double argmax = 0.0;
    std::size_t evaluated = 0;
    std::size_t masked = 0;
};

/// Points within the pole guard (or a ℘ pole) are counted as masked.
ResidualStats lax_residual_grid(const Solution& sol, const SpectralPoint& sp,
                                const std::vector<double>& xs);

std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace soliton
