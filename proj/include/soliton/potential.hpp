#pragma once

// The ODE family u_xx = f'(u)/2 with first integral u_x² = f(u), and the
// exact solutions used as jet suppliers.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "soliton/elliptic.hpp"

namespace soliton {

enum class PotentialKind { Jacobi, Weierstrass, GeneralPolynomial };

struct FValue {
    double f;
    double f_prime;
    double f_double_prime;
};

/// Polynomial f(u) = Σ c_i u^i of degree 1..4.
class Potential {
public:
    /// f(u) = (1 - u²)(k1 + k2 u²)
    static Potential jacobi(double k1, double k2);
    /// f(u) = 4u³ - g2 u - g3
    static Potential weierstrass(double g2, double g3);
    static Potential polynomial(std::array<double, 5> coeffs);

    PotentialKind kind() const noexcept { return kind_; }
    const std::array<double, 5>& coeffs() const noexcept { return coeffs_; }
    int degree() const noexcept;

    double k1() const noexcept { return p1_; }
    double k2() const noexcept { return p2_; }
    double g2() const noexcept { return p1_; }
    double g3() const noexcept { return p2_; }

    FValue eval(double u) const;
    /// Third derivative; needed for D_x of f''(u).
    double f_triple_prime(double u) const;

    /// Divided difference f[z0, ..., zk] (k <= 4), exact for the stored
    /// polynomial and well defined for repeated nodes.
    double divided_difference(std::span<const double> nodes) const;

private:
    PotentialKind kind_ = PotentialKind::GeneralPolynomial;
    std::array<double, 5> coeffs_{};
    double p1_ = 0.0;
    double p2_ = 0.0;
};

FValue eval_f(const Potential& pot, double u);

/// g(λ) = f(-λ).
double discriminate(const Potential& pot, double lambda);

/// g'(λ) = -f'(-λ).
double discriminate_prime(const Potential& pot, double lambda);

/// Prolonged solution point.  epsilon is the branch sign in u_x = ε√f(u).
struct JetPoint {
    double x = 0.0;
    double u = 0.0;
    double u_x = 0.0;
    double u_xx = 0.0;
    int epsilon = 1;
};

enum class SolutionKind { Sn, Cn, Dn, WeierstrassP, Numeric };

struct NamedSolution {
    SolutionKind kind = SolutionKind::Sn;
    double k = 0.0;   // Jacobi modulus
    double g2 = 0.0;  // Weierstrass invariants
    double g3 = 0.0;
    double x0 = 0.0;  // phase shift: u(x) = named(x - x0)
};

/// A solution of u_xx = f'(u)/2 that can be queried for its jet anywhere on
/// its real domain.
class Solution {
public:
    static Solution sn(double k, double x0 = 0.0);
    static Solution cn(double k, double x0 = 0.0);
    static Solution dn(double k, double x0 = 0.0);
    static Solution weierstrass(double g2, double g3, double x0 = 0.0);
    static Solution named(const NamedSolution& spec);

    /// Integrates u_xx = f'(u)/2 with RK4 from (x_start, u_start) and
    /// u_x = epsilon·√f(u_start).
    static Solution numeric(const Potential& pot, double x_start, double u_start, int epsilon,
                            double step = 1e-3);

    const Potential& potential() const noexcept { return potential_; }
    SolutionKind kind() const noexcept { return spec_.kind; }
    const NamedSolution& spec() const noexcept { return spec_; }
    const elliptic::WeierstrassInvariants* invariants() const {
        return spec_.kind == SolutionKind::WeierstrassP ? &inv_ : nullptr;
    }

    /// Throws PoleError near a ℘ pole.
    JetPoint jet(double x) const;

    /// Point where the wave function is normalised: x = 0 for Jacobi
    /// solutions, x = 0.5 for ℘, x_start for numeric solutions.
    double reference_point() const noexcept;

    /// Distance to the nearest pole of u (infinite for bounded solutions).
    double pole_distance(double x) const;

    /// 1/(u+λ) evaluated without the pole exclusion, so that integrands in
    /// 1/(u+λ) stay finite (and tend to 0) through a ℘ pole.
    double inverse_u_plus(double x, double lambda) const;

    std::string describe() const;

private:
    Potential potential_;
    NamedSolution spec_;
    elliptic::WeierstrassInvariants inv_;
    // numeric solutions
    double x_start_ = 0.0;
    double u_start_ = 0.0;
    double ux_start_ = 0.0;
    double step_ = 1e-3;
};

JetPoint solution_jet(const Solution& sol, double x);

/// a1, a2 with 4u³ - g2u - g3 = 4(u+a1)(u+a2)(u-a1-a2).  The largest real root
/// is a1 + a2, so a complex pair of roots gives conjugate a1, a2.
struct RootPair {
    Complex a1;
    Complex a2;
    bool degenerate = false;  // repeated root: lattice degenerates
};

RootPair weierstrass_root_pair(const elliptic::WeierstrassInvariants& inv);

/// Parses "jacobi_sn k=0.5", "jacobi_cn k=..", "jacobi_dn k=..",
/// "weierstrass g2=0 g3=1", optionally with "x0=..", or
/// "polynomial c0=.. c1=.. c2=.. c3=.. c4=.. u0=.. [eps=-1]".
Solution parse_solution(std::string_view text);

/// Canonical text accepted by parse_solution.
std::string to_text(const Solution& sol);

}  // namespace soliton
