#pragma once

// Wave function Φ of the linear spectral problem D_xΦ = LΦ, ∂_yΦ = MΦ.
//
//   Ψ± = exp[±√g (y + P(x))],  P(x) = ∫ ds / (2(u(s)+λ))
//   φ1± = (±√g + u_x)/√(u+λ) Ψ±,  φ2± = √(u+λ) Ψ±
//   Φ = [φ+ φ-]·[[c1, c3], [c2, c4]],  c1 = c2 = ½,  c3 = -c4 = -1/(2√g)

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "soliton/lax.hpp"

namespace soliton {

/// Piecewise antiderivative of 1/(2(u+λ)) along a solution.  The real line is
/// split at the zeros of u+λ; the segment containing the reference point is
/// anchored there (P(x_ref) = 0), every other segment at its midpoint.
/// Values are integrated from a fixed node lattice, so they do not depend on
/// the order of evaluation.  Holds a node cache, so one accumulator must not
/// be shared between threads.
class PhaseAccumulator {
public:
    PhaseAccumulator(Solution sol, SpectralPoint sp);

    const Solution& solution() const noexcept { return sol_; }
    const SpectralPoint& spectral() const noexcept { return sp_; }
    double reference() const noexcept { return x_ref_; }

    double phase(double x);

    /// As phase() but throws PoleCrossingError if u+λ vanishes between the
    /// reference point and x.
    double phase_strict(double x);

    double anchor(double x);

    /// Zeros of u+λ in [a, b], in increasing order.
    std::vector<double> zeros(double a, double b);

    double u_plus_lambda(double x) const;

private:
    struct Segment {
        double lo;
        double hi;
        double anchor;
    };
    Segment segment_of(double x);
    void scan_to(double x);
    std::optional<double> first_zero(double from, int dir, double limit);

    Solution sol_;
    SpectralPoint sp_;
    double x_ref_;
    double step_;
    long k_lo_ = 0;
    long k_hi_ = 0;
    std::map<long, double> zeros_;  // keyed by scan cell
    static constexpr double kNodeSpacing = 0.25;
    std::map<double, std::map<long, double>> nodes_;  // lattice anchor + k·spacing
};

/// P(x) with P(x_ref) = 0.
enum class PhaseMethod { Quadrature, ClosedForm };
double phase_integral(const Solution& sol, const SpectralPoint& sp, double x,
                      PhaseMethod method = PhaseMethod::Quadrature);

/// Closed forms of the phase.  Derived: the antiderivative worked out from the
/// partial-fraction split (Jacobi) or the substitution u = -a1 + (a1-a2)t²
/// (Weierstrass).  Printed: the displayed formulas taken verbatim.
/// PrintedExponent: the Jacobi phase implied by the displayed Ψ± exponent.
enum class ClosedVariant { Derived, Printed, PrintedExponent };

struct PhaseTerm {
    std::string name;
    double closed = 0.0;
    double quadrature = 0.0;
};

struct ClosedPhaseReport {
    double value = 0.0;       // closed form, or quadrature on fallback
    double quadrature = 0.0;  // oracle
    std::vector<PhaseTerm> terms;
    bool fallback = false;
    std::string reason;
};

ClosedPhaseReport closed_phase(const Solution& sol, const SpectralPoint& sp, double x,
                               ClosedVariant variant = ClosedVariant::Derived);

struct PsiPair {
    Complex plus;
    Complex minus;
};

PsiPair psi_pair(const SpectralPoint& sp, double phase, double y);
PsiPair psi_pair(PhaseAccumulator& acc, double x, double y);

struct BranchSet {
    Complex phi1_plus;
    Complex phi1_minus;
    Complex phi2_plus;
    Complex phi2_minus;
};

BranchSet branch_functions(const JetPoint& jet, const SpectralPoint& sp, const PsiPair& psi);

enum class WaveMode { Real, Complex };

struct WaveFn {
    CMat2 phi;
    std::array<Complex, 4> c;

    /// Throws BranchError if any entry has |Im| > 1e-10·max(1,|entry|).
    RMat2 real() const;
};

std::array<Complex, 4> normalization_constants(const SpectralPoint& sp);

/// Real mode rejects u+λ <= 0 with BranchError.
WaveFn wave_function(PhaseAccumulator& acc, double x, double y, WaveMode mode = WaveMode::Complex);
WaveFn wave_function(const JetPoint& jet, const SpectralPoint& sp, double phase, double y,
                     WaveMode mode = WaveMode::Complex);

inline constexpr double kStripHalfWidth = 0.05;

struct LspOptions {
    bool flip_phi1_plus = false;  // defect injection: -√g in φ1+ only
    bool finite_difference = true;
    double mask = kStripHalfWidth;
};

struct LspRow {
    double x;
    double y;
    std::array<double, 4> de;
    double det_minus_1;
    double fd_x;
};

struct LspReport {
    std::array<double, 4> max_de{};
    double max_det = 0.0;
    double max_fd_x = 0.0;
    std::size_t evaluated = 0;
    std::size_t masked = 0;
    std::vector<LspRow> rows;
};

/// Residuals of the four component equations
///   D_xφ1 - L12 φ2,  D_xφ2 - ½φ1,  ∂yφ1 - u_xφ1 + (f-g)/(u+λ) φ2,
///   ∂yφ2 + u_xφ2 - (u+λ)φ1
/// for both branches, relative to the size of their terms.
std::array<double, 4> lsp_point_residual(const Potential& pot, const JetPoint& jet,
                                         const SpectralPoint& sp, double phase, double y,
                                         bool flip_phi1_plus = false);

LspReport lsp_residual(const Solution& sol, const SpectralPoint& sp, const std::vector<double>& xs,
                       const std::vector<double>& ys, const LspOptions& opt = {});

void write_lsp_csv(std::ostream& os, const LspReport& report);

}  // namespace soliton
