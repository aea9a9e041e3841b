#include "soliton/lax.hpp"

#include <array>
#include <cmath>

#include "soliton/errors.hpp"

namespace soliton {

namespace {

struct Divided {
    double q;    // f[u,-λ]
    double r;    // f[u,u,-λ]
    double r_u;  // ∂u f[u,u,-λ] = 2 f[u,u,u,-λ]
    double q_l;  // ∂λ f[u,-λ] = -f[u,-λ,-λ]
    double r_l;  // ∂λ f[u,u,-λ] = -f[u,u,-λ,-λ]
};

Divided divided(const Potential& pot, double u, double lambda) {
    const double a = -lambda;
    Divided d;
    d.q = pot.divided_difference(std::array{u, a});
    d.r = pot.divided_difference(std::array{u, u, a});
    d.r_u = 2.0 * pot.divided_difference(std::array{u, u, u, a});
    d.q_l = -pot.divided_difference(std::array{u, a, a});
    d.r_l = -pot.divided_difference(std::array{u, u, a, a});
    return d;
}

}  // namespace

SpectralPoint SpectralPoint::at(const Potential& pot, double lambda) {
    SpectralPoint sp;
    sp.lambda = lambda;
    sp.g = discriminate(pot, lambda);
    sp.sqrt_g = sp.g < 0.0 ? Complex(0.0, std::sqrt(-sp.g)) : Complex(std::sqrt(sp.g), 0.0);
    return sp;
}

void check_pole(const SpectralPoint& sp, const JetPoint& jet) {
    const double s = jet.u + sp.lambda;
    if (std::abs(s) < kPoleGuard)
        throw PoleError("u + lambda vanishes", jet.x, std::abs(s), sp.lambda);
}

Sl2Element build_L(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet) {
    check_pole(sp, jet);
    const double r = pot.divided_difference(std::array{jet.u, jet.u, -sp.lambda});
    return {0.5, 0.5 * r, 0.0};
}

Sl2Element build_M(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet) {
    check_pole(sp, jet);
    const double q = pot.divided_difference(std::array{jet.u, -sp.lambda});
    return {jet.u + sp.lambda, -q, jet.u_x};
}

Sl2Element printed_L(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet) {
    check_pole(sp, jet);
    const double u = jet.u;
    const double l = sp.lambda;
    switch (pot.kind()) {
    case PotentialKind::Jacobi: {
        const double k1 = pot.k1(), k2 = pot.k2();
        return {0.5, 0.5 * (-3.0 * k2 * u * u + 2.0 * l * k2 * u + k1 - k2 - k2 * l * l), 0.0};
    }
    case PotentialKind::Weierstrass:
        return {0.5, 0.5 * (4.0 * u - 2.0 * l), 0.0};
    default:
        throw UnsupportedError("no closed-form L display for a general polynomial");
    }
}

LaxJacobians lax_jacobians(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet) {
    check_pole(sp, jet);
    const Divided d = divided(pot, jet.u, sp.lambda);
    LaxJacobians j;
    j.dL_du = {0.0, 0.5 * d.r_u, 0.0};
    j.dM_du = {1.0, -d.r, 0.0};
    j.dM_dux = {0.0, 0.0, 1.0};
    j.dL_dlambda = {0.0, 0.5 * d.r_l, 0.0};
    j.dM_dlambda = {1.0, -d.q_l, 0.0};
    return j;
}

Sl2Element dx_L(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet) {
    return lax_jacobians(pot, sp, jet).dL_du * jet.u_x;
}

Sl2Element dx_M(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet) {
    const LaxJacobians j = lax_jacobians(pot, sp, jet);
    return j.dM_du * jet.u_x + j.dM_dux * jet.u_xx;
}

Sl2Element dlambda_L(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet) {
    return lax_jacobians(pot, sp, jet).dL_dlambda;
}

Sl2Element dlambda_M(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet) {
    return lax_jacobians(pot, sp, jet).dM_dlambda;
}

double lax_residual(const Potential& pot, const SpectralPoint& sp, const JetPoint& jet) {
    const Sl2Element M = build_M(pot, sp, jet);
    const Sl2Element L = build_L(pot, sp, jet);
    const Sl2Element R = dx_M(pot, sp, jet) + bracket(M, L);
    return frobenius(R.matrix());
}

double lax_residual(const Solution& sol, const SpectralPoint& sp, double x) {
    return lax_residual(sol.potential(), sp, sol.jet(x));
}

ResidualStats lax_residual_grid(const Solution& sol, const SpectralPoint& sp,
                                const std::vector<double>& xs) {
    ResidualStats st;
    double sum = 0.0;
    for (double x : xs) {
        double r;
        try {
            r = lax_residual(sol, sp, x);
        } catch (const PoleError&) {
            ++st.masked;
            continue;
        }
        ++st.evaluated;
        sum += r;
        if (r > st.max || st.evaluated == 1) {
            st.max = r;
            st.argmax = x;
        }
    }
    if (st.evaluated) st.mean = sum / static_cast<double>(st.evaluated);
    return st;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i)
        v[i] = i + 1 == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

}  // namespace soliton
