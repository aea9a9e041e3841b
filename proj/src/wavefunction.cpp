#include "soliton/wavefunction.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "soliton/errors.hpp"
#include "soliton/quadrature.hpp"

namespace soliton {

namespace {

constexpr double kScanStep = 0.01;
constexpr double kFarLimit = 100.0;

quad::Options phase_quad() {
    quad::Options o;
    o.abs_tol = 1e-15;
    o.rel_tol = 1e-14;
    return o;
}

}  // namespace

PhaseAccumulator::PhaseAccumulator(Solution sol, SpectralPoint sp)
    : sol_(std::move(sol)), sp_(sp), x_ref_(sol_.reference_point()), step_(kScanStep) {}

double PhaseAccumulator::u_plus_lambda(double x) const {
    if (sol_.kind() == SolutionKind::WeierstrassP) {
        auto w = elliptic::weierstrass_p_unchecked(x - sol_.spec().x0, *sol_.invariants());
        return w.p + sp_.lambda;
    }
    return sol_.jet(x).u + sp_.lambda;
}

void PhaseAccumulator::scan_to(double x) {
    const long k = static_cast<long>(std::floor((x - x_ref_) / step_));
    auto cell = [&](long j) {
        const double a = x_ref_ + step_ * static_cast<double>(j);
        const double b = x_ref_ + step_ * static_cast<double>(j + 1);
        double sa = u_plus_lambda(a), sb = u_plus_lambda(b);
        if ((sa > 0.0) == (sb > 0.0)) return;
        double lo = a, hi = b;
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
            double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if ((u_plus_lambda(mid) > 0.0) == (sa > 0.0))
                lo = mid;
            else
                hi = mid;
        }
        zeros_[j] = 0.5 * (lo + hi);
    };
    while (k_hi_ <= k + 1) cell(k_hi_++);
    while (k_lo_ > k - 1) cell(--k_lo_);
}

std::vector<double> PhaseAccumulator::zeros(double a, double b) {
    if (a > b) std::swap(a, b);
    scan_to(a);
    scan_to(b);
    std::vector<double> out;
    for (const auto& [k, z] : zeros_)
        if (z >= a && z <= b) out.push_back(z);
    return out;
}

std::optional<double> PhaseAccumulator::first_zero(double from, int dir, double limit) {
    auto zs = dir > 0 ? zeros(from, from + limit) : zeros(from - limit, from);
    std::optional<double> best;
    for (double z : zs) {
        if (dir > 0 && z > from && (!best || z < *best)) best = z;
        if (dir < 0 && z < from && (!best || z > *best)) best = z;
    }
    return best;
}

PhaseAccumulator::Segment PhaseAccumulator::segment_of(double x) {
    const double inf = std::numeric_limits<double>::infinity();
    auto between = zeros(std::min(x, x_ref_), std::max(x, x_ref_));
    if (between.empty()) return {-inf, inf, x_ref_};
    const int dir = x > x_ref_ ? 1 : -1;
    const double z_near = dir > 0 ? between.back() : between.front();
    auto z_far = first_zero(x, dir, kFarLimit);
    double anchor = z_far ? 0.5 * (z_near + *z_far) : z_near + dir * 1.0;
    double lo = dir > 0 ? z_near : (z_far ? *z_far : -inf);
    double hi = dir > 0 ? (z_far ? *z_far : inf) : z_near;
    return {lo, hi, anchor};
}

double PhaseAccumulator::anchor(double x) { return segment_of(x).anchor; }

double PhaseAccumulator::phase(double x) {
    const Segment seg = segment_of(x);
    auto& nodes = nodes_[seg.anchor];
    const double lambda = sp_.lambda;
    auto integrand = [&](double s) { return 0.5 * sol_.inverse_u_plus(s, lambda); };
    auto node = [&](long k) { return seg.anchor + k * kNodeSpacing; };
    const long k = static_cast<long>(std::trunc((x - seg.anchor) / kNodeSpacing));
    if (nodes.empty()) nodes[0] = 0.0;
    // nodes form a contiguous run [k_min, k_max] containing 0
    const long dir = k >= 0 ? 1 : -1;
    long have = dir > 0 ? nodes.rbegin()->first : nodes.begin()->first;
    if (dir * have < 0) have = 0;
    for (long j = have; dir * j < dir * k; j += dir)
        nodes[j + dir] = nodes[j] + quad::integrate(integrand, node(j), node(j + dir), phase_quad()).value;
    return nodes[k] + quad::integrate(integrand, node(k), x, phase_quad()).value;
}

double PhaseAccumulator::phase_strict(double x) {
    auto between = zeros(std::min(x, x_ref_), std::max(x, x_ref_));
    if (!between.empty()) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "u + lambda changes sign at x = %.17g between %.17g and %.17g",
                      between.front(), x_ref_, x);
        throw PoleCrossingError(buf, between.front());
    }
    return phase(x);
}

double phase_integral(const Solution& sol, const SpectralPoint& sp, double x, PhaseMethod method) {
    if (method == PhaseMethod::ClosedForm) return closed_phase(sol, sp, x).value;
    PhaseAccumulator acc(sol, sp);
    return acc.phase_strict(x);
}

namespace {

// Integral of h(x) dx from x_ref to x.
template <typename F>
double path_integral(F h, double a, double b) {
    return quad::integrate(h, a, b, phase_quad()).value;
}

// Sign of u_x is constant (turning points allowed at the ends only).
bool monotone_path(const Solution& sol, double a, double b, int& eps) {
    const int n = std::max(8, static_cast<int>(std::ceil(std::abs(b - a) / kScanStep)));
    int sign = 0;
    for (int i = 1; i < n; ++i) {
        double ux = sol.jet(a + (b - a) * i / n).u_x;
        int s = ux > 0 ? 1 : (ux < 0 ? -1 : 0);
        if (s == 0) return false;
        if (sign == 0) sign = s;
        if (s != sign) return false;
    }
    eps = sign == 0 ? sol.jet(0.5 * (a + b)).epsilon : sign;
    return true;
}

struct JacobiG {
    double pi;
    double log;
};

// Antiderivatives in u (without ε) of λ/((λ²-u²)√f) / 2 and -u/((λ²-u²)√f) / 2.
JacobiG jacobi_g(const Potential& pot, const SpectralPoint& sp, double u, bool printed_numerator) {
    const double k1 = pot.k1(), k2 = pot.k2(), l = sp.lambda, g = sp.g;
    JacobiG G;
    G.pi = elliptic::ellint_pi_m(u, 1.0 / (l * l), -k2 / k1) / (2.0 * l * std::sqrt(k1));
    const double a = printed_numerator ? -2.0 * k2 * l * l : k2 - k1 - 2.0 * k2 * l * l;
    const double N = a * u * u + (k2 - k1) * l * l + 2.0 * k1;
    const double f = std::max(0.0, pot.eval(u).f);
    if (g < 0.0) {
        const double beta = std::sqrt(-g);
        G.log = std::atan2(N, 2.0 * beta * std::sqrt(f)) / (4.0 * beta);
    } else {
        const double A = 2.0 * std::sqrt(g) * std::sqrt(f);
        G.log = -(std::log(std::abs(A + N)) - std::log(std::abs(A - N))) / (8.0 * std::sqrt(g));
    }
    return G;
}

ClosedPhaseReport closed_jacobi(const Solution& sol, const SpectralPoint& sp, double x,
                                ClosedVariant variant, ClosedPhaseReport rep) {
    const Potential& pot = sol.potential();
    const double x0 = sol.reference_point();
    const double l = sp.lambda;
    if (pot.k1() <= 0.0) {
        rep.reason = "k1 <= 0: no real sqrt(k1)";
        return rep;
    }
    if (l == 0.0 || sp.g == 0.0) {
        rep.reason = "lambda = 0 or g = 0";
        return rep;
    }
    int eps = 1;
    if (!monotone_path(sol, x0, x, eps)) {
        rep.reason = "turning point on the path";
        return rep;
    }
    const bool printed = variant != ClosedVariant::Derived;
    const double scale = variant == ClosedVariant::PrintedExponent ? 2.0 : 1.0;
    JacobiG g0, g1;
    try {
        g0 = jacobi_g(pot, sp, sol.jet(x0).u, printed);
        g1 = jacobi_g(pot, sp, sol.jet(x).u, printed);
    } catch (const DomainError& e) {
        rep.reason = std::string("inadmissible elliptic-integral arguments: ") + e.what();
        return rep;
    }
    const double pi_term = scale * eps * (g1.pi - g0.pi);
    const double log_term = scale * eps * (g1.log - g0.log);
    auto u_at = [&](double s) { return sol.jet(s).u; };
    const double q_pi = path_integral([&](double s) {
        double u = u_at(s);
        return l / (2.0 * (l * l - u * u));
    }, x0, x);
    const double q_log = path_integral([&](double s) {
        double u = u_at(s);
        return -u / (2.0 * (l * l - u * u));
    }, x0, x);
    rep.fallback = false;
    rep.reason.clear();
    rep.value = pi_term + log_term;
    rep.terms = {{"elliptic_pi", pi_term, q_pi}, {"inverse_tanh", log_term, q_log}};
    return rep;
}

ClosedPhaseReport closed_weierstrass(const Solution& sol, const SpectralPoint& sp, double x,
                                     ClosedVariant variant, ClosedPhaseReport rep) {
    if (variant == ClosedVariant::PrintedExponent)
        throw UnsupportedError("no separate exponent display for the Weierstrass phase");
    const auto& inv = *sol.invariants();
    const double x0 = sol.reference_point();
    const double period = 2.0 * inv.real_half_period();
    const double t0 = x0 - sol.spec().x0, t1 = x - sol.spec().x0;
    if (std::floor(t0 / period) != std::floor(t1 / period) ||
        std::fmod(t1, period) == 0.0) {
        rep.reason = "pole of u on the path";
        return rep;
    }
    int eps = -1;
    if (!monotone_path(sol, x0, x, eps)) {
        rep.reason = "turning point on the path";
        return rep;
    }
    const Complex a1 = -inv.roots[0];
    const Complex a2 = -inv.roots[1];
    const Complex l(sp.lambda, 0.0);
    const Complex d = a1 - a2;
    const Complex c = 2.0 * a1 + a2;
    const Complex m = d / c;
    const bool printed = variant == ClosedVariant::Printed;
    const Complex n = printed ? d / (l - a1) : -d / (l - a1);
    const Complex pref = printed ? -1.0 / (2.0 * (l - a1) * c) : 1.0 / (2.0 * (l - a1) * std::sqrt(c));
    auto G = [&](double u) {
        Complex t = std::sqrt((Complex(u) + a1) / d);
        return pref * elliptic::ellint_pi_m(t, n, m);
    };
    Complex sigma(1.0, 0.0);
    if (!printed) {
        const double um = sol.jet(0.5 * (x0 + x)).u;
        Complex t = std::sqrt((Complex(um) + a1) / d);
        Complex S = 2.0 * d * std::sqrt(c) * t * std::sqrt(1.0 - t * t) * std::sqrt(1.0 - m * t * t);
        sigma = S / std::sqrt(sol.potential().eval(um).f);
    }
    Complex value;
    try {
        value = (printed ? 1.0 : eps) * sigma * (G(sol.jet(x).u) - G(sol.jet(x0).u));
    } catch (const DomainError& e) {
        rep.reason = std::string("inadmissible elliptic-integral arguments: ") + e.what();
        return rep;
    }
    if (!std::isfinite(value.real())) {
        rep.reason = "closed form is not finite";
        return rep;
    }
    const bool complex_valued = std::abs(value.imag()) > 1e-8 * std::max(1.0, std::abs(value));
    if (complex_valued && !printed) {
        rep.reason = "closed form is not real on this branch";
        return rep;
    }
    rep.fallback = false;
    rep.reason.clear();
    if (complex_valued) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "imaginary part %.6g dropped", value.imag());
        rep.reason = buf;
    }
    rep.value = value.real();
    rep.terms = {{"elliptic_pi", value.real(), rep.quadrature}};
    return rep;
}

}  // namespace

ClosedPhaseReport closed_phase(const Solution& sol, const SpectralPoint& sp, double x,
                               ClosedVariant variant) {
    if (sol.potential().kind() == PotentialKind::GeneralPolynomial)
        throw UnsupportedError("closed-form phase needs a Jacobi or Weierstrass potential");
    ClosedPhaseReport rep;
    PhaseAccumulator acc(sol, sp);
    rep.quadrature = acc.phase_strict(x);
    rep.value = rep.quadrature;
    rep.fallback = true;
    if (x == sol.reference_point()) {
        rep.fallback = false;
        rep.value = 0.0;
        return rep;
    }
    if (sol.potential().kind() == PotentialKind::Jacobi)
        return closed_jacobi(sol, sp, x, variant, std::move(rep));
    return closed_weierstrass(sol, sp, x, variant, std::move(rep));
}

PsiPair psi_pair(const SpectralPoint& sp, double phase, double y) {
    const Complex z = sp.sqrt_g * (y + phase);
    return {std::exp(z), std::exp(-z)};
}

PsiPair psi_pair(PhaseAccumulator& acc, double x, double y) {
    return psi_pair(acc.spectral(), acc.phase(x), y);
}

BranchSet branch_functions(const JetPoint& jet, const SpectralPoint& sp, const PsiPair& psi) {
    const Complex rs = std::sqrt(Complex(jet.u + sp.lambda));
    BranchSet b;
    b.phi1_plus = (sp.sqrt_g + jet.u_x) / rs * psi.plus;
    b.phi1_minus = (-sp.sqrt_g + jet.u_x) / rs * psi.minus;
    b.phi2_plus = rs * psi.plus;
    b.phi2_minus = rs * psi.minus;
    return b;
}

std::array<Complex, 4> normalization_constants(const SpectralPoint& sp) {
    if (sp.g == 0.0) throw DomainError("g(lambda) = 0: wave function degenerates");
    const Complex c3 = -1.0 / (2.0 * sp.sqrt_g);
    return {0.5, 0.5, c3, -c3};
}

RMat2 WaveFn::real() const {
    for (const Complex& z : {phi.a11, phi.a12, phi.a21, phi.a22})
        if (std::abs(z.imag()) > 1e-10 * std::max(1.0, std::abs(z)))
            throw BranchError("wave function is not real here; use complex mode");
    return real_part(phi);
}

WaveFn wave_function(const JetPoint& jet, const SpectralPoint& sp, double phase, double y,
                     WaveMode mode) {
    check_pole(sp, jet);
    if (mode == WaveMode::Real && jet.u + sp.lambda <= 0.0)
        throw BranchError("u + lambda <= 0: sqrt(u+lambda) is imaginary; use complex mode");
    WaveFn w;
    w.c = normalization_constants(sp);
    const BranchSet b = branch_functions(jet, sp, psi_pair(sp, phase, y));
    const auto& c = w.c;
    w.phi = {c[0] * b.phi1_plus + c[1] * b.phi1_minus, c[2] * b.phi1_plus + c[3] * b.phi1_minus,
             c[0] * b.phi2_plus + c[1] * b.phi2_minus, c[2] * b.phi2_plus + c[3] * b.phi2_minus};
    if (mode == WaveMode::Real) w.real();
    return w;
}

WaveFn wave_function(PhaseAccumulator& acc, double x, double y, WaveMode mode) {
    const JetPoint jet = acc.solution().jet(x);
    return wave_function(jet, acc.spectral(), acc.phase(x), y, mode);
}

std::array<double, 4> lsp_point_residual(const Potential& pot, const JetPoint& jet,
                                         const SpectralPoint& sp, double phase, double y,
                                         bool flip_phi1_plus) {
    check_pole(sp, jet);
    const double p = build_L(pot, sp, jet).x2;
    const double q = -build_M(pot, sp, jet).x2;
    const Complex s(jet.u + sp.lambda);
    const Complex rs = std::sqrt(s);
    const double ux = jet.u_x, uxx = jet.u_xx;
    std::array<double, 4> out{};
    for (int sigma : {1, -1}) {
        const Complex rho = double(sigma) * sp.sqrt_g;
        const Complex cst = (sigma == 1 && flip_phi1_plus) ? -rho : rho;
        const PsiPair psi = psi_pair(sp, phase, y);
        const Complex Psi = sigma == 1 ? psi.plus : psi.minus;
        const Complex phi1 = (cst + ux) / rs * Psi;
        const Complex phi2 = rs * Psi;
        const Complex dphi1 = (uxx / rs - 0.5 * (cst + ux) * ux / (rs * s) +
                               (cst + ux) / rs * rho / (2.0 * s)) * Psi;
        const Complex dphi2 = (0.5 * ux / rs + rs * rho / (2.0 * s)) * Psi;
        auto rel = [](Complex r, std::initializer_list<double> mags) {
            double m = 1.0;
            for (double v : mags) m += v;
            return std::abs(r) / m;
        };
        const Complex pphi2 = p * phi2;
        const double r1 = rel(dphi1 - pphi2, {std::abs(dphi1), std::abs(pphi2)});
        const double r2 = rel(dphi2 - 0.5 * phi1, {std::abs(dphi2), 0.5 * std::abs(phi1)});
        const Complex t3a = rho * phi1, t3b = ux * phi1, t3c = q * phi2;
        const double r3 = rel(t3a - t3b + t3c, {std::abs(t3a), std::abs(t3b), std::abs(t3c)});
        const Complex t4a = rho * phi2, t4b = ux * phi2, t4c = s * phi1;
        const double r4 = rel(t4a + t4b - t4c, {std::abs(t4a), std::abs(t4b), std::abs(t4c)});
        out[0] = std::max(out[0], r1);
        out[1] = std::max(out[1], r2);
        out[2] = std::max(out[2], r3);
        out[3] = std::max(out[3], r4);
    }
    return out;
}

LspReport lsp_residual(const Solution& sol, const SpectralPoint& sp, const std::vector<double>& xs,
                       const std::vector<double>& ys, const LspOptions& opt) {
    LspReport rep;
    PhaseAccumulator acc(sol, sp);
    const Potential& pot = sol.potential();
    const double h = 1e-5;
    for (double x : xs) {
        JetPoint jet;
        bool masked = sol.pole_distance(x) < opt.mask;
        if (!masked) {
            jet = sol.jet(x);
            masked = std::abs(jet.u + sp.lambda) < opt.mask;
        }
        if (masked) {
            rep.masked += ys.size();
            continue;
        }
        const double P = acc.phase(x);
        std::array<double, 4> P_fd{};
        std::array<JetPoint, 4> J_fd{};
        if (opt.finite_difference) {
            const double off[4] = {-h, h, -0.5 * h, 0.5 * h};
            for (int i = 0; i < 4; ++i) {
                P_fd[i] = acc.phase(x + off[i]);
                J_fd[i] = sol.jet(x + off[i]);
            }
        }
        const Sl2Element L = build_L(pot, sp, jet);
        for (double y : ys) {
            LspRow row{x, y, lsp_point_residual(pot, jet, sp, P, y, opt.flip_phi1_plus), 0.0, 0.0};
            const WaveFn w = wave_function(jet, sp, P, y);
            row.det_minus_1 = std::abs(w.phi.det() - 1.0);
            if (opt.finite_difference) {
                auto at = [&](int i) { return wave_function(J_fd[i], sp, P_fd[i], y).phi; };
                const CMat2 d1 = (at(1) - at(0)) * Complex(1.0 / (2.0 * h));
                const CMat2 d2 = (at(3) - at(2)) * Complex(1.0 / h);
                const CMat2 d = (d2 * Complex(4.0) - d1) * Complex(1.0 / 3.0);
                const CMat2 r = d - to_complex(L.matrix()) * w.phi;
                row.fd_x = frobenius(r) / std::max(1.0, frobenius(w.phi));
            }
            for (int i = 0; i < 4; ++i) rep.max_de[i] = std::max(rep.max_de[i], row.de[i]);
            rep.max_det = std::max(rep.max_det, row.det_minus_1);
            rep.max_fd_x = std::max(rep.max_fd_x, row.fd_x);
            ++rep.evaluated;
            rep.rows.push_back(row);
        }
    }
    return rep;
}

void write_lsp_csv(std::ostream& os, const LspReport& report) {
    os << "x,y,r_de1,r_de2,r_de3,r_de4,detPhi_minus_1\n";
    char buf[400];
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.x, r.y,
                      r.de[0], r.de[1], r.de[2], r.de[3], r.det_minus_1);
        os << buf;
    }
}

}  // namespace soliton
