#pragma once

// Surfaces F in sl(2) attached to the linear spectral problem:
//
//   F = a Φ⁻¹∂_λΦ + Φ⁻¹SΦ + b Φ⁻¹LΦ
//
// and the path-integrated surfaces F^Q whose tangents are Φ⁻¹(pr v_Q L)Φ and
// Φ⁻¹(pr v_Q M)Φ.

#include <functional>
#include <optional>
#include <vector>

#include "soliton/symmetry.hpp"
#include "soliton/wavefunction.hpp"

namespace soliton {

/// S(λ, y, [u]) with its total x-derivative and y-derivative.
struct GaugeField {
    using Fn = std::function<Sl2Element(double lambda, double y, const JetPoint&)>;
    Fn S;
    Fn Dx;
    Fn Dy;

    static GaugeField constant(const Sl2Element& s);
    /// S = s(y)·dir.
    static GaugeField along(const Sl2Element& dir, std::function<double(double)> s,
                            std::function<double(double)> ds);
    /// S = L(λ, [u]).
    static GaugeField lax_L(const Potential& pot);
};

struct SurfaceParams {
    double lambda = 1.0;
    double a_lambda = 0.0;
    double b = 0.0;
    std::optional<GaugeField> gauge;
};

struct SurfaceSample {
    double x = 0.0;
    double y = 0.0;
    Sl2Element F;
    Sl2Element Fx;
    Sl2Element Fy;
    Sl2Element A;  // Fx = Φ⁻¹AΦ
    Sl2Element B;  // Fy = Φ⁻¹BΦ
    bool masked = false;
    bool immersive = false;
    double imag = 0.0;  // largest imaginary part discarded
};

/// Euclidean Gram determinant of (Fx, Fy).
double gram_determinant(const Sl2Element& Fx, const Sl2Element& Fy);
inline constexpr double kImmersionThreshold = 1e-12;

/// Evaluates surfaces at a fixed λ.  Caches phase accumulators (including the
/// ones at λ ± h for ∂_λΦ), so a builder must not be shared between threads.
class SurfaceBuilder {
public:
    SurfaceBuilder(Solution sol, double lambda);

    const Solution& solution() const noexcept { return sol_; }
    const SpectralPoint& spectral() const noexcept { return sp_; }

    /// λ step of the ∂_λΦ difference; throws DomainError if g changes sign
    /// within it after shrinking.
    double lambda_step();

    /// |u+λ| below the strip half-width, or a ℘ pole closer than that.
    bool masked(double x) const;

    CMat2 phi(double x, double y);
    CMat2 dlambda_phi(double x, double y);

    SurfaceSample sym_tafel(double a, double x, double y);
    SurfaceSample gauge(const GaugeField& S, double x, double y);
    SurfaceSample q1(double b, double x, double y);
    SurfaceSample combined(const SurfaceParams& p, double x, double y);

    /// Tangents of F^Q; F is left zero.
    SurfaceSample q_tangents(const Characteristic& Q, double x, double y);

private:
    PhaseAccumulator& shifted(int i);
    SurfaceSample masked_sample(double x, double y) const;
    void finish(SurfaceSample& s, const CMat2& phi, const CMat2& F) const;

    Solution sol_;
    SpectralPoint sp_;
    PhaseAccumulator acc_;
    std::optional<double> h_;
    std::vector<std::optional<PhaseAccumulator>> shifted_;  // λ+h, λ-h, λ+h/2, λ-h/2
};

SurfaceSample f_sym_tafel(const Solution& sol, double lambda, double a, double x, double y);
SurfaceSample f_gauge(const Solution& sol, double lambda, const GaugeField& S, double x, double y);
SurfaceSample f_q1(const Solution& sol, double lambda, double b, double x, double y);
SurfaceSample fq_tangents(const Characteristic& Q, const Solution& sol, double lambda, double x,
                          double y);

struct Grid {
    std::vector<double> xs;
    std::vector<double> ys;
};

struct SurfaceGrid {
    Grid grid;
    std::vector<SurfaceSample> samples;  // x-major: samples[ix * ny + iy]

    const SurfaceSample& at(std::size_t ix, std::size_t iy) const {
        return samples[ix * grid.ys.size() + iy];
    }
    std::size_t masked() const;
};

SurfaceGrid sample_surface(const Solution& sol, const SurfaceParams& p, const Grid& grid,
                           int threads = 0);

struct IntegrationOptions {
    int substeps = 2;               // RK4 steps per grid interval
    double closure_tolerance = 1e-5;
    std::optional<Sl2Element> origin;  // F at (xs[0], ys[0]); zero if unset
    int threads = 0;
};

struct IntegratedSurface {
    SurfaceGrid surface;
    double closure = 0.0;  // max |F(y-then-x) - F(x-then-y)| / max(1, |F|)
};

/// Integrates the F^Q tangent field over a pole-free grid, first along y at
/// xs[0] and then along x, and again along the transposed path.
/// Throws CompatibilityError when the two disagree beyond closure_tolerance.
IntegratedSurface integrate_surface(const Characteristic& Q, const Solution& sol, double lambda,
                                    const Grid& grid, const IntegrationOptions& opt = {});

using LaxField = std::function<Sl2Element(const JetPoint&, double y)>;

struct LaxFieldPair {
    LaxField A;
    LaxField B;
};

LaxFieldPair sym_tafel_fields(const Potential& pot, double lambda);
LaxFieldPair q1_fields(const Potential& pot, double lambda);
LaxFieldPair gauge_fields(const Potential& pot, double lambda, const GaugeField& S);

/// max |∂_yA − D_xB + [A,M] + [L,B]| over unmasked grid points, relative to the
/// largest of the four terms (floored at 1).  Derivatives by central differences
/// with one Richardson level; the x step shrinks near poles.
double ab_compatibility_residual(const LaxField& A, const LaxField& B, const Solution& sol,
                                 double lambda, const Grid& grid, double h = 1e-3);

}  // namespace soliton
