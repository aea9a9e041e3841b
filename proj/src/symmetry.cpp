#include "soliton/symmetry.hpp"

#include <algorithm>
#include <cmath>

#include "soliton/errors.hpp"
#include "soliton/quadrature.hpp"

namespace soliton {

Characteristic Characteristic::q1() {
    Characteristic c;
    c.kind_ = CharacteristicKind::Q1;
    c.name_ = "Q1";
    c.eval_ = [](const Potential& pot, const JetPoint& j) {
        return QValue{j.u_x, j.u_xx, 0.5 * pot.eval(j.u).f_double_prime * j.u_x};
    };
    return c;
}

Q2Integral::Q2Integral(const Solution& sol, double x_lo, double x_hi)
    : sol_(sol), x_lo_(x_lo), x_hi_(x_hi) {
    if (sol.kind() == SolutionKind::WeierstrassP)
        throw UnsupportedError("Q2 integral is implemented for bounded solutions only");
    const double step = 0.01;
    const int n = static_cast<int>(std::ceil((x_hi - x_lo) / step));
    double xa = x_lo, va = sol.jet(xa).u_x;
    for (int i = 1; i <= n; ++i) {
        const double xb = std::min(x_hi, x_lo + step * i);
        const double vb = sol.jet(xb).u_x;
        if ((va > 0.0) != (vb > 0.0)) {
            double lo = xa, hi = xb;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                if ((sol.jet(mid).u_x > 0.0) == (va > 0.0))
                    lo = mid;
                else
                    hi = mid;
            }
            turning_.push_back(0.5 * (lo + hi));
        }
        xa = xb;
        va = vb;
    }
}

double Q2Integral::base(double x) const {
    auto it = std::upper_bound(turning_.begin(), turning_.end(), x);
    const double lo = it == turning_.begin() ? x_lo_ : *std::prev(it);
    const double hi = it == turning_.end() ? x_hi_ : *it;
    return 0.5 * (lo + hi);
}

double Q2Integral::operator()(double x) const {
    if (x < x_lo_ || x > x_hi_) throw DomainError("x outside the range of the Q2 integral");
    const double u = sol_.jet(x).u;
    auto it = std::upper_bound(turning_.begin(), turning_.end(), x);
    if (it != turning_.end() && std::abs(sol_.jet(*it).u - u) < kTurningMargin)
        throw DomainError("too close to a turning point for the Q2 integral");
    if (it != turning_.begin() && std::abs(sol_.jet(*std::prev(it)).u - u) < kTurningMargin)
        throw DomainError("too close to a turning point for the Q2 integral");
    const Potential& pot = sol_.potential();
    auto integrand = [&](double s) {
        JetPoint j = sol_.jet(s);
        return std::pow(pot.eval(j.u).f, -1.5) * j.u_x;
    };
    quad::Options opt;
    opt.abs_tol = 1e-15;
    return quad::integrate(integrand, base(x), x, opt).value;
}

double q2_integral(const Solution& sol, double x) {
    return Q2Integral(sol, std::min(-50.0, x - 1.0), std::max(50.0, x + 1.0))(x);
}

Characteristic Characteristic::q2(const Solution& sol, double x_lo, double x_hi) {
    auto I = std::make_shared<const Q2Integral>(sol, x_lo, x_hi);
    Characteristic c;
    c.kind_ = CharacteristicKind::Q2;
    c.name_ = "Q2";
    c.eval_ = [I](const Potential& pot, const JetPoint& j) {
        const double in = (*I)(j.x);
        const FValue fv = pot.eval(j.u);
        const double f32 = std::pow(fv.f, -1.5);
        const double f52 = std::pow(fv.f, -2.5);
        QValue v;
        v.q = j.u_x * in;
        v.dq = j.u_xx * in + j.u_x * j.u_x * f32;
        v.d2q = 0.5 * fv.f_double_prime * j.u_x * in + 3.0 * j.u_x * j.u_xx * f32 -
                1.5 * j.u_x * j.u_x * j.u_x * fv.f_prime * f52;
        return v;
    };
    return c;
}

Characteristic Characteristic::q3(const Potential& pot, double gamma) {
    if (gamma == 0.0) throw DomainError("Q3 needs gamma != 0");
    const double ell = 2.0 * (1.0 + 1.0 / gamma);
    const double rounded = std::round(ell);
    if (std::abs(ell - rounded) > 1e-12 || rounded < 1.0 || rounded > 4.0 || rounded == 2.0)
        throw DomainError("Q3 needs l = 2(1 + 1/gamma) in {1, 3, 4}");
    const int l = static_cast<int>(rounded);
    const auto& c = pot.coeffs();
    double scale = 0.0;
    for (double v : c) scale = std::max(scale, std::abs(v));
    for (int i = 1; i <= 4; ++i)
        if (i != l && std::abs(c[i]) > 1e-12 * scale)
            throw DomainError("Q3 needs f(u) = c1 + c2 u^l with l = 2(1 + 1/gamma)");
    Characteristic q;
    q.kind_ = CharacteristicKind::Q3;
    q.name_ = "Q3";
    q.gamma_ = gamma;
    q.c1_ = c[0];
    q.c2_ = c[l];
    q.ell_ = l;
    q.eval_ = [gamma](const Potential& p, const JetPoint& j) {
        QValue v;
        v.q = j.x * j.u_x + gamma * j.u;
        v.dq = (1.0 + gamma) * j.u_x + j.x * j.u_xx;
        v.d2q = (2.0 + gamma) * j.u_xx + j.x * 0.5 * p.eval(j.u).f_double_prime * j.u_x;
        return v;
    };
    return q;
}

Characteristic Characteristic::custom(std::string name, Evaluator eval) {
    Characteristic c;
    c.kind_ = CharacteristicKind::Custom;
    c.name_ = std::move(name);
    c.eval_ = std::move(eval);
    return c;
}

Characteristic Characteristic::combine(double a, const Characteristic& A, double b,
                                       const Characteristic& B) {
    Evaluator ea = A.eval_, eb = B.eval_;
    return custom("combination", [=](const Potential& pot, const JetPoint& j) {
        QValue x = ea(pot, j), y = eb(pot, j);
        return QValue{a * x.q + b * y.q, a * x.dq + b * y.dq, a * x.d2q + b * y.d2q};
    });
}

double determining_residual(const Characteristic& Q, const Potential& pot, const JetPoint& jet) {
    const QValue v = Q.eval(pot, jet);
    return std::abs(v.d2q - 0.5 * pot.eval(jet.u).f_double_prime * v.q);
}

Sl2Element prolong_on_matrix(const Characteristic& Q, LaxTarget target, const Potential& pot,
                             const SpectralPoint& sp, const JetPoint& jet) {
    const LaxJacobians J = lax_jacobians(pot, sp, jet);
    const QValue v = Q.eval(pot, jet);
    if (target == LaxTarget::L) return J.dL_du * v.q;
    return J.dM_du * v.q + J.dM_dux * v.dq;
}

namespace {

CMat2 assemble(const SpectralPoint& sp, const std::array<Complex, 2>& plus,
               const std::array<Complex, 2>& minus) {
    const auto c = normalization_constants(sp);
    return {c[0] * plus[0] + c[1] * minus[0], c[2] * plus[0] + c[3] * minus[0],
            c[0] * plus[1] + c[1] * minus[1], c[2] * plus[1] + c[3] * minus[1]};
}

}  // namespace

DefectPair lsp_symmetry_defect(const Characteristic& Q, const Potential& pot,
                               const SpectralPoint& sp, const JetPoint& jet, double phase,
                               double y) {
    check_pole(sp, jet);
    const QValue v = Q.eval(pot, jet);
    const FValue fv = pot.eval(jet.u);
    const Complex s(jet.u + sp.lambda);
    const Complex rs = std::sqrt(s);
    const double K = fv.f_prime * v.q - 2.0 * jet.u_x * v.dq;
    const double DR = v.d2q - 0.5 * fv.f_double_prime * v.q;
    const double Kf = K == 0.0 ? 0.0 : K / fv.f;
    const PsiPair psi = psi_pair(sp, phase, y);
    std::array<Complex, 2> xp, xm, yp, ym;
    for (int sigma : {1, -1}) {
        const Complex rho = double(sigma) * sp.sqrt_g;
        const Complex Psi = sigma == 1 ? psi.plus : psi.minus;
        const Complex row1 =
            (0.5 * Kf * (2.0 * fv.f - sp.g - rho * jet.u_x) + 2.0 * s * DR) / (2.0 * s * rs) * Psi;
        const Complex row2 = -rho * Kf / (4.0 * rs) * Psi;
        const Complex yrow1 = K / rs * Psi;
        (sigma == 1 ? xp : xm) = {row1, row2};
        (sigma == 1 ? yp : ym) = {yrow1, Complex(0.0)};
    }
    return {assemble(sp, xp, xm), assemble(sp, yp, ym)};
}

DefectPair lsp_symmetry_defect(const Characteristic& Q, PhaseAccumulator& acc, double x, double y) {
    const JetPoint jet = acc.solution().jet(x);
    return lsp_symmetry_defect(Q, acc.solution().potential(), acc.spectral(), jet, acc.phase(x), y);
}

DefectPair printed_defect(const Characteristic& Q, const Potential& pot, const SpectralPoint& sp,
                          const JetPoint& jet, double phase, double y) {
    check_pole(sp, jet);
    const Complex s(jet.u + sp.lambda);
    const Complex rs = std::sqrt(s);
    Complex pre_y;
    switch (Q.kind()) {
    case CharacteristicKind::Q1:
        return {CMat2{}, CMat2{}};
    case CharacteristicKind::Q2:
        pre_y = jet.u_x / (rs * std::sqrt(pot.eval(jet.u).f));
        break;
    case CharacteristicKind::Q3:
        pre_y = Q.c1() * (1.0 + Q.gamma()) / rs;
        break;
    default:
        throw UnsupportedError("no displayed defect for a custom characteristic");
    }
    const Complex pre_x = pre_y / (2.0 * s);
    const PsiPair psi = psi_pair(sp, phase, y);
    const Complex sum = psi.plus + psi.minus;
    const CMat2 pattern{-sum, (psi.plus - psi.minus) / sp.sqrt_g, Complex(0.0), sum};
    return {pattern * pre_x, pattern * pre_y};
}

EntryComparison compare_entries(const CMat2& computed, const CMat2& printed) {
    EntryComparison out;
    const double scale = std::max({max_abs(computed), max_abs(printed), 1e-300});
    const CMat2 d = computed - printed;
    out.relative = {std::abs(d.a11) / scale, std::abs(d.a12) / scale, std::abs(d.a21) / scale,
                    std::abs(d.a22) / scale};
    out.max_relative = *std::max_element(out.relative.begin(), out.relative.end());
    out.entry21 = std::abs(computed.a21);
    return out;
}

}  // namespace soliton
