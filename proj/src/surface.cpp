#include "soliton/surface.hpp"

#include <algorithm>
#include <cmath>

#include "soliton/errors.hpp"
#include "soliton/parallel.hpp"

namespace soliton {

namespace {

constexpr double kShift[4] = {1.0, -1.0, 0.5, -0.5};

double take_real(const CSl2& X, Sl2Element& out) {
    out = {X.x1.real(), X.x2.real(), X.x3.real()};
    return std::max({std::abs(X.x1.imag()), std::abs(X.x2.imag()), std::abs(X.x3.imag())});
}

int resolve_threads(int threads) { return threads > 0 ? threads : worker_count(); }

}  // namespace

GaugeField GaugeField::constant(const Sl2Element& s) {
    return {[s](double, double, const JetPoint&) { return s; },
            [](double, double, const JetPoint&) { return Sl2Element{}; },
            [](double, double, const JetPoint&) { return Sl2Element{}; }};
}

GaugeField GaugeField::along(const Sl2Element& dir, std::function<double(double)> s,
                             std::function<double(double)> ds) {
    return {[dir, s](double, double y, const JetPoint&) { return s(y) * dir; },
            [](double, double, const JetPoint&) { return Sl2Element{}; },
            [dir, ds](double, double y, const JetPoint&) { return ds(y) * dir; }};
}

GaugeField GaugeField::lax_L(const Potential& pot) {
    return {[pot](double lambda, double, const JetPoint& j) {
                return build_L(pot, SpectralPoint::at(pot, lambda), j);
            },
            [pot](double lambda, double, const JetPoint& j) {
                return dx_L(pot, SpectralPoint::at(pot, lambda), j);
            },
            [](double, double, const JetPoint&) { return Sl2Element{}; }};
}

double gram_determinant(const Sl2Element& Fx, const Sl2Element& Fy) {
    auto dot = [](const Sl2Element& a, const Sl2Element& b) {
        return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3;
    };
    return dot(Fx, Fx) * dot(Fy, Fy) - dot(Fx, Fy) * dot(Fx, Fy);
}

SurfaceBuilder::SurfaceBuilder(Solution sol, double lambda)
    : sol_(std::move(sol)),
      sp_(SpectralPoint::at(sol_.potential(), lambda)),
      acc_(sol_, sp_),
      shifted_(4) {}

double SurfaceBuilder::lambda_step() {
    if (h_) return *h_;
    if (sp_.g == 0.0) throw DomainError("g(lambda) = 0: wave function not normalizable");
    double h = 1e-5 * std::max(1.0, std::abs(sp_.lambda));
    for (int attempt = 0; attempt < 4; ++attempt, h /= 10.0) {
        bool same = true;
        for (double s : {1.0, -1.0}) {
            const double g = discriminate(sol_.potential(), sp_.lambda + s * h);
            if (g == 0.0 || (g > 0.0) != (sp_.g > 0.0)) same = false;
        }
        if (same) return *(h_ = h);
    }
    throw DomainError("g changes sign within the lambda step");
}

bool SurfaceBuilder::masked(double x) const {
    if (sol_.pole_distance(x) < kStripHalfWidth) return true;
    return std::abs(sol_.jet(x).u + sp_.lambda) < kStripHalfWidth;
}

CMat2 SurfaceBuilder::phi(double x, double y) { return wave_function(acc_, x, y).phi; }

PhaseAccumulator& SurfaceBuilder::shifted(int i) {
    if (!shifted_[i])
        shifted_[i].emplace(sol_, SpectralPoint::at(sol_.potential(),
                                                    sp_.lambda + kShift[i] * lambda_step()));
    return *shifted_[i];
}

CMat2 SurfaceBuilder::dlambda_phi(double x, double y) {
    const double h = lambda_step();
    const JetPoint jet = sol_.jet(x);
    CMat2 v[4];
    for (int i = 0; i < 4; ++i) {
        PhaseAccumulator& a = shifted(i);
        v[i] = wave_function(jet, a.spectral(), a.phase(x), y).phi;
    }
    const CMat2 d1 = (v[0] - v[1]) * Complex(1.0 / (2.0 * h));
    const CMat2 d2 = (v[2] - v[3]) * Complex(1.0 / h);
    return (d2 * Complex(4.0) - d1) * Complex(1.0 / 3.0);
}

SurfaceSample SurfaceBuilder::masked_sample(double x, double y) const {
    SurfaceSample s;
    s.x = x;
    s.y = y;
    s.masked = true;
    return s;
}

void SurfaceBuilder::finish(SurfaceSample& s, const CMat2& phi, const CMat2& F) const {
    double imag = take_real(CSl2::from_matrix(F), s.F);
    imag = std::max(imag, take_real(conjugate_by(phi, to_complex(s.A)), s.Fx));
    imag = std::max(imag, take_real(conjugate_by(phi, to_complex(s.B)), s.Fy));
    s.imag = imag;
    s.immersive = gram_determinant(s.Fx, s.Fy) > kImmersionThreshold;
}

SurfaceSample SurfaceBuilder::combined(const SurfaceParams& p, double x, double y) {
    if (p.lambda != sp_.lambda) throw DomainError("surface parameters use a different lambda");
    if (masked(x)) return masked_sample(x, y);
    const Potential& pot = sol_.potential();
    const JetPoint jet = sol_.jet(x);
    const CMat2 phi = wave_function(jet, sp_, acc_.phase(x), y).phi;
    const CMat2 inv = phi.adjugate();
    SurfaceSample s;
    s.x = x;
    s.y = y;
    CMat2 F{};
    if (p.a_lambda != 0.0) {
        F = F + inv * dlambda_phi(x, y) * Complex(p.a_lambda);
        s.A += p.a_lambda * dlambda_L(pot, sp_, jet);
        s.B += p.a_lambda * dlambda_M(pot, sp_, jet);
    }
    if (p.gauge) {
        const GaugeField& g = *p.gauge;
        const Sl2Element S = g.S(sp_.lambda, y, jet);
        F = F + inv * to_complex(S.matrix()) * phi;
        s.A += g.Dx(sp_.lambda, y, jet) + bracket(S, build_L(pot, sp_, jet));
        s.B += g.Dy(sp_.lambda, y, jet) + bracket(S, build_M(pot, sp_, jet));
    }
    if (p.b != 0.0) {
        F = F + inv * to_complex(build_L(pot, sp_, jet).matrix()) * phi * Complex(p.b);
        s.A += p.b * dx_L(pot, sp_, jet);
        s.B += p.b * dx_M(pot, sp_, jet);
    }
    finish(s, phi, F);
    return s;
}

SurfaceSample SurfaceBuilder::sym_tafel(double a, double x, double y) {
    return combined({sp_.lambda, a, 0.0, std::nullopt}, x, y);
}

SurfaceSample SurfaceBuilder::gauge(const GaugeField& S, double x, double y) {
    return combined({sp_.lambda, 0.0, 0.0, S}, x, y);
}

SurfaceSample SurfaceBuilder::q1(double b, double x, double y) {
    return combined({sp_.lambda, 0.0, b, std::nullopt}, x, y);
}

SurfaceSample SurfaceBuilder::q_tangents(const Characteristic& Q, double x, double y) {
    if (masked(x)) return masked_sample(x, y);
    const Potential& pot = sol_.potential();
    const JetPoint jet = sol_.jet(x);
    const CMat2 phi = wave_function(jet, sp_, acc_.phase(x), y).phi;
    SurfaceSample s;
    s.x = x;
    s.y = y;
    s.A = prolong_on_matrix(Q, LaxTarget::L, pot, sp_, jet);
    s.B = prolong_on_matrix(Q, LaxTarget::M, pot, sp_, jet);
    finish(s, phi, CMat2{});
    return s;
}

SurfaceSample f_sym_tafel(const Solution& sol, double lambda, double a, double x, double y) {
    return SurfaceBuilder(sol, lambda).sym_tafel(a, x, y);
}

SurfaceSample f_gauge(const Solution& sol, double lambda, const GaugeField& S, double x, double y) {
    return SurfaceBuilder(sol, lambda).gauge(S, x, y);
}

SurfaceSample f_q1(const Solution& sol, double lambda, double b, double x, double y) {
    return SurfaceBuilder(sol, lambda).q1(b, x, y);
}

SurfaceSample fq_tangents(const Characteristic& Q, const Solution& sol, double lambda, double x,
                          double y) {
    return SurfaceBuilder(sol, lambda).q_tangents(Q, x, y);
}

std::size_t SurfaceGrid::masked() const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const SurfaceSample& s) { return s.masked; }));
}

SurfaceGrid sample_surface(const Solution& sol, const SurfaceParams& p, const Grid& grid,
                           int threads) {
    SurfaceGrid out;
    out.grid = grid;
    const std::size_t nx = grid.xs.size(), ny = grid.ys.size();
    out.samples.resize(nx * ny);
    const int workers = resolve_threads(threads);
    std::vector<std::optional<SurfaceBuilder>> builders(workers);
    parallel_for(
        nx,
        [&](std::size_t ix, int w) {
            if (!builders[w]) builders[w].emplace(sol, p.lambda);
            for (std::size_t iy = 0; iy < ny; ++iy)
                out.samples[ix * ny + iy] = builders[w]->combined(p, grid.xs[ix], grid.ys[iy]);
        },
        workers);
    return out;
}

namespace {

// F(b) - F(a) along a coordinate line; the tangent does not depend on F, so
// each RK4 step reduces to Simpson's rule.  Steps are bisected until the
// Richardson estimate is below 1e-12 relative, which matters near poles.
template <typename T>
Sl2Element simpson(const T& tangent, double a, double b, const Sl2Element& fa, const Sl2Element& fm,
                   const Sl2Element& fb, const Sl2Element& whole, int depth) {
    const double m = 0.5 * (a + b);
    const Sl2Element fl = tangent(0.5 * (a + m)), fr = tangent(0.5 * (m + b));
    const Sl2Element left = ((m - a) / 6.0) * (fa + 4.0 * fl + fm);
    const Sl2Element right = ((b - m) / 6.0) * (fm + 4.0 * fr + fb);
    const Sl2Element diff = left + right - whole;
    if (depth == 0 || norm(diff) <= 15e-12 * std::max(1.0, norm(whole))) return left + right + (1.0 / 15.0) * diff;
    return simpson(tangent, a, m, fa, fl, fm, left, depth - 1) + simpson(tangent, m, b, fm, fr, fb, right, depth - 1);
}

template <typename T>
Sl2Element line_integral(const T& tangent, double a, double b, int substeps) {
    Sl2Element sum{};
    const double h = (b - a) / substeps;
    for (int k = 0; k < substeps; ++k) {
        const double t0 = a + k * h;
        const Sl2Element f0 = tangent(t0), fm = tangent(t0 + 0.5 * h), f1 = tangent(t0 + h);
        sum += simpson(tangent, t0, t0 + h, f0, fm, f1, (h / 6.0) * (f0 + 4.0 * fm + f1), 12);
    }
    return sum;
}

}  // namespace

IntegratedSurface integrate_surface(const Characteristic& Q, const Solution& sol, double lambda,
                                    const Grid& grid, const IntegrationOptions& opt) {
    const auto& xs = grid.xs;
    const auto& ys = grid.ys;
    const std::size_t nx = xs.size(), ny = ys.size();
    if (nx == 0 || ny == 0) throw DomainError("empty grid");
    if (opt.substeps < 1) throw DomainError("substeps must be positive");

    const int workers = resolve_threads(opt.threads);
    std::vector<std::optional<SurfaceBuilder>> builders(workers);
    auto builder = [&](int w) -> SurfaceBuilder& {
        if (!builders[w]) builders[w].emplace(sol, lambda);
        return *builders[w];
    };

    {
        SurfaceBuilder& b = builder(0);
        for (std::size_t i = 0; i < nx; ++i) {
            const double x0 = xs[i];
            const double x1 = i + 1 < nx ? xs[i + 1] : xs[i];
            for (int k = 0; k <= 2 * opt.substeps; ++k) {
                const double x = x0 + (x1 - x0) * k / (2.0 * opt.substeps);
                if (b.masked(x)) throw DomainError("grid crosses a pole strip at x = " + std::to_string(x));
            }
        }
    }

    auto Fx_at = [&](int w, double y) {
        return [&, w, y](double x) { return builder(w).q_tangents(Q, x, y).Fx; };
    };
    auto Fy_at = [&](int w, double x) {
        return [&, w, x](double y) { return builder(w).q_tangents(Q, x, y).Fy; };
    };

    const Sl2Element origin = opt.origin.value_or(Sl2Element{});
    std::vector<Sl2Element> primary(nx * ny), transposed(nx * ny);
    auto idx = [ny](std::size_t i, std::size_t j) { return i * ny + j; };

    primary[idx(0, 0)] = origin;
    for (std::size_t j = 0; j + 1 < ny; ++j)
        primary[idx(0, j + 1)] =
            primary[idx(0, j)] + line_integral(Fy_at(0, xs[0]), ys[j], ys[j + 1], opt.substeps);
    parallel_for(
        ny,
        [&](std::size_t j, int w) {
            for (std::size_t i = 0; i + 1 < nx; ++i)
                primary[idx(i + 1, j)] =
                    primary[idx(i, j)] + line_integral(Fx_at(w, ys[j]), xs[i], xs[i + 1], opt.substeps);
        },
        workers);

    transposed[idx(0, 0)] = origin;
    for (std::size_t i = 0; i + 1 < nx; ++i)
        transposed[idx(i + 1, 0)] =
            transposed[idx(i, 0)] + line_integral(Fx_at(0, ys[0]), xs[i], xs[i + 1], opt.substeps);
    parallel_for(
        nx,
        [&](std::size_t i, int w) {
            for (std::size_t j = 0; j + 1 < ny; ++j)
                transposed[idx(i, j + 1)] = transposed[idx(i, j)] +
                                            line_integral(Fy_at(w, xs[i]), ys[j], ys[j + 1], opt.substeps);
        },
        workers);

    IntegratedSurface out;
    out.surface.grid = grid;
    out.surface.samples.resize(nx * ny);
    parallel_for(
        nx,
        [&](std::size_t i, int w) {
            for (std::size_t j = 0; j < ny; ++j) {
                SurfaceSample s = builder(w).q_tangents(Q, xs[i], ys[j]);
                s.F = primary[idx(i, j)];
                out.surface.samples[idx(i, j)] = s;
            }
        },
        workers);
    for (std::size_t k = 0; k < nx * ny; ++k)
        out.closure = std::max(out.closure, norm(primary[k] - transposed[k]) / std::max(1.0, norm(primary[k])));
    if (out.closure > opt.closure_tolerance)
        throw CompatibilityError("surface integration is path dependent: closure " +
                                 std::to_string(out.closure));
    return out;
}

LaxFieldPair sym_tafel_fields(const Potential& pot, double lambda) {
    const SpectralPoint sp = SpectralPoint::at(pot, lambda);
    return {[pot, sp](const JetPoint& j, double) { return dlambda_L(pot, sp, j); },
            [pot, sp](const JetPoint& j, double) { return dlambda_M(pot, sp, j); }};
}

LaxFieldPair q1_fields(const Potential& pot, double lambda) {
    const SpectralPoint sp = SpectralPoint::at(pot, lambda);
    return {[pot, sp](const JetPoint& j, double) { return dx_L(pot, sp, j); },
            [pot, sp](const JetPoint& j, double) { return dx_M(pot, sp, j); }};
}

LaxFieldPair gauge_fields(const Potential& pot, double lambda, const GaugeField& S) {
    const SpectralPoint sp = SpectralPoint::at(pot, lambda);
    return {[pot, sp, S](const JetPoint& j, double y) {
                return S.Dx(sp.lambda, y, j) + bracket(S.S(sp.lambda, y, j), build_L(pot, sp, j));
            },
            [pot, sp, S](const JetPoint& j, double y) {
                return S.Dy(sp.lambda, y, j) + bracket(S.S(sp.lambda, y, j), build_M(pot, sp, j));
            }};
}

double ab_compatibility_residual(const LaxField& A, const LaxField& B, const Solution& sol,
                                 double lambda, const Grid& grid, double h) {
    const Potential& pot = sol.potential();
    const SpectralPoint sp = SpectralPoint::at(pot, lambda);
    auto clear = [&](double x) {
        return sol.pole_distance(x) >= kStripHalfWidth &&
               std::abs(sol.jet(x).u + lambda) >= kStripHalfWidth;
    };
    auto richardson = [](const auto& fn, double step) {
        const Sl2Element d1 = (1.0 / (2.0 * step)) * (fn(step) - fn(-step));
        const Sl2Element d2 = (1.0 / step) * (fn(0.5 * step) - fn(-0.5 * step));
        return (1.0 / 3.0) * (4.0 * d2 - d1);
    };
    double worst = 0.0;
    for (double x : grid.xs) {
        const double hx = std::min(h, 0.002 * sol.pole_distance(x));
        if (!clear(x) || !clear(x - hx) || !clear(x + hx)) continue;
        const JetPoint jet = sol.jet(x);
        const Sl2Element L = build_L(pot, sp, jet);
        const Sl2Element M = build_M(pot, sp, jet);
        for (double y : grid.ys) {
            const Sl2Element dyA = richardson([&](double d) { return A(jet, y + d); }, h);
            const Sl2Element dxB = richardson([&](double d) { return B(sol.jet(x + d), y); }, hx);
            const Sl2Element AM = bracket(A(jet, y), M), LB = bracket(L, B(jet, y));
            const double scale = std::max({1.0, norm(dyA), norm(dxB), norm(AM), norm(LB)});
            worst = std::max(worst, norm(dyA - dxB + AM + LB) / scale);
        }
    }
    return worst;
}

}  // namespace soliton
