#include <doctest.h>

#include <cmath>

#include "soliton/errors.hpp"
#include "soliton/surface.hpp"

using namespace soliton;

namespace {

double killing(const Sl2Element& X, const Sl2Element& Y) {
    return X.x1 * Y.x2 + X.x2 * Y.x1 + 2 * X.x3 * Y.x3;
}

template <typename Fn>
Sl2Element fd(const Fn& F, double h = 1e-3) {
    Sl2Element d1 = (1.0 / (2 * h)) * (F(h) - F(-h));
    Sl2Element d2 = (1.0 / h) * (F(h / 2) - F(-h / 2));
    return (1.0 / 3.0) * (4.0 * d2 - d1);
}

double rel(const Sl2Element& a, const Sl2Element& b) {
    return norm(a - b) / std::max(1.0, norm(b));
}

}  // namespace

TEST_CASE("Sym-Tafel surface") {
    auto sn = Solution::sn(0.5);
    SurfaceBuilder sb(sn, 1.2);
    double worst_x = 0, worst_y = 0;
    for (double x : linspace(-8, 8, 17))
        for (double y : linspace(-8, 8, 9)) {
            if (sb.masked(x) || sb.masked(x - 1e-3) || sb.masked(x + 1e-3)) continue;
            SurfaceSample s = sb.sym_tafel(1.0, x, y);
            CHECK(std::isfinite(norm(s.F)));
            CHECK(s.imag < 1e-8 * std::max(1.0, norm(s.F)));
            Sl2Element dx = fd([&](double d) { return sb.sym_tafel(1.0, x + d, y).F; });
            Sl2Element dy = fd([&](double d) { return sb.sym_tafel(1.0, x, y + d).F; });
            worst_x = std::max(worst_x, rel(dx, s.Fx));
            worst_y = std::max(worst_y, rel(dy, s.Fy));
        }
    CHECK(worst_x < 1e-6);
    CHECK(worst_y < 1e-6);

    SurfaceSample zero = sb.sym_tafel(0.0, 1.0, 1.0);
    CHECK(norm(zero.F) == 0.0);
    CHECK(norm(zero.Fx) == 0.0);

    auto pot = Potential::weierstrass(0, 1);
    auto wp = Solution::weierstrass(0, 1);
    for (double lambda : {1.0, -2.0})
        for (double x : {0.4, 1.3}) {
            JetPoint j = wp.jet(x);
            RMat2 m = dlambda_M(pot, SpectralPoint::at(pot, lambda), j).matrix();
            CHECK(m.a11 == doctest::Approx(0.0));
            CHECK(m.a12 == doctest::Approx(4 * j.u - 8 * lambda));
            CHECK(m.a21 == doctest::Approx(1.0));
        }

    // g(1) = 0 for sn
    SurfaceBuilder bad(sn, 1.0);
    CHECK_THROWS_AS(bad.sym_tafel(1.0, 0.3, 0.0), DomainError);
    // g = f(-λ) changes sign at λ = 1: a point 1e-7 away is within the step
    SurfaceBuilder close(sn, 1.0 + 1e-8);
    CHECK_THROWS_AS(close.sym_tafel(1.0, 0.3, 0.0), DomainError);
}

TEST_CASE("surfaces with u + lambda < 0 stay real") {
    auto sn = Solution::sn(0.5);
    SurfaceBuilder sb(sn, 0.5);
    int negative = 0;
    for (double x : linspace(-6, 6, 61)) {
        if (sb.masked(x)) continue;
        if (sn.jet(x).u + 0.5 < 0) ++negative;
        SurfaceParams p{0.5, 1.0, 0.7, GaugeField::constant(Sl2Element::e2())};
        SurfaceSample s = sb.combined(p, x, 0.3);
        CHECK(s.imag < 1e-8 * std::max({1.0, norm(s.F), norm(s.Fx), norm(s.Fy)}));
    }
    CHECK(negative > 5);
}

TEST_CASE("gauge surfaces") {
    auto cn = Solution::cn(0.5);
    SurfaceBuilder sb(cn, 1.2);
    auto e3 = GaugeField::constant(Sl2Element::e3());
    auto ramp = GaugeField::along(Sl2Element::e1(), [](double y) { return std::sin(y); },
                                  [](double y) { return std::cos(y); });
    auto lax = GaugeField::lax_L(cn.potential());
    for (double x : linspace(-5, 5, 11))
        for (double y : {-1.0, 0.2, 1.5}) {
            SurfaceSample s = sb.gauge(e3, x, y);
            CHECK(killing(s.F, s.F) == doctest::Approx(2.0).epsilon(1e-10));
            SurfaceSample r = sb.gauge(ramp, x, y);
            Sl2Element dy = fd([&](double d) { return sb.gauge(ramp, x, y + d).F; });
            CHECK(rel(dy, r.Fy) < 1e-7);
            SurfaceSample l = sb.gauge(lax, x, y);
            Sl2Element expect = conjugate_by(sb.phi(x, y), to_complex(dx_L(cn.potential(), sb.spectral(), cn.jet(x)))).x1.real() * Sl2Element::e1();
            CHECK(std::abs(l.Fx.x1 - expect.x1) < 1e-8 * std::max(1.0, std::abs(expect.x1)));
            Sl2Element dx = fd([&](double d) { return sb.gauge(lax, x + d, y).F; });
            CHECK(rel(dx, l.Fx) < 1e-7);
        }
}

TEST_CASE("Q1 surface") {
    auto sn = Solution::sn(0.8);
    SurfaceBuilder sb(sn, 1.2);
    const double b = 1.7;
    for (double x : linspace(-8, 8, 17))
        for (double y : linspace(-8, 8, 9)) {
            SurfaceSample s = sb.q1(b, x, y);
            CHECK(std::isfinite(norm(s.F)));
            Sl2Element L = build_L(sn.potential(), sb.spectral(), sn.jet(x));
            CHECK(killing(s.F, s.F) == doctest::Approx(b * b * killing(L, L)).epsilon(1e-10));
            Sl2Element dy = fd([&](double d) { return sb.q1(b, x, y + d).F; });
            CHECK(rel(dy, s.Fy) < 1e-6);
            SurfaceSample t = sb.q_tangents(Characteristic::q1(), x, y);
            CHECK(norm(b * t.Fx - s.Fx) < 1e-12 * std::max(1.0, norm(s.Fx)));
            CHECK(norm(b * t.Fy - s.Fy) < 1e-12 * std::max(1.0, norm(s.Fy)));
        }
}

TEST_CASE("tangent pairings are frame independent") {
    auto sn = Solution::sn(0.5);
    SurfaceBuilder sb(sn, 1.2);
    SurfaceParams p{1.2, 1.0, 0.5, GaugeField::constant(Sl2Element::e1())};
    for (double x : linspace(-8, 8, 33))
        for (double y : {-3.0, 0.0, 2.5}) {
            SurfaceSample s = sb.combined(p, x, y);
            if (s.masked) continue;
            double scale = std::max(1.0, norm(s.A) * norm(s.B));
            CHECK(std::abs(killing(s.Fx, s.Fx) - killing(s.A, s.A)) < 1e-10 * std::max(1.0, norm(s.A) * norm(s.A)));
            CHECK(std::abs(killing(s.Fx, s.Fy) - killing(s.A, s.B)) < 1e-10 * scale);
            CHECK(std::abs(killing(s.Fy, s.Fy) - killing(s.B, s.B)) < 1e-10 * std::max(1.0, norm(s.B) * norm(s.B)));
            // immersion flag agrees with a rank check on the tangents
            Sl2Element c{s.Fx.x2 * s.Fy.x3 - s.Fx.x3 * s.Fy.x2, s.Fx.x3 * s.Fy.x1 - s.Fx.x1 * s.Fy.x3,
                         s.Fx.x1 * s.Fy.x2 - s.Fx.x2 * s.Fy.x1};
            CHECK(s.immersive == (norm(c) * norm(c) > kImmersionThreshold));
        }
}

TEST_CASE("mixed partials") {
    auto sn = Solution::sn(0.5);
    SurfaceBuilder sb(sn, 1.2);
    SurfaceParams p{1.2, 1.0, 0.5, GaugeField::constant(Sl2Element::e3())};
    for (double x : linspace(-6, 6, 9))
        for (double y : {-1.0, 0.5}) {
            Sl2Element dyFx = fd([&](double d) { return sb.combined(p, x, y + d).Fx; });
            Sl2Element dxFy = fd([&](double d) { return sb.combined(p, x + d, y).Fy; });
            CHECK(norm(dyFx - dxFy) < 5e-6 * std::max(1.0, norm(dyFx)));
        }
}

TEST_CASE("integrated surfaces") {
    auto sn = Solution::sn(0.5);
    Grid g{linspace(-2, 2, 21), linspace(-1, 1, 11)};
    SurfaceBuilder sb(sn, 1.2);
    IntegrationOptions opt;
    opt.origin = sb.q1(1.0, g.xs[0], g.ys[0]).F;
    auto res = integrate_surface(Characteristic::q1(), sn, 1.2, g, opt);
    CHECK(res.closure < 1e-6);
    double worst = 0;
    for (std::size_t i = 0; i < g.xs.size(); ++i)
        for (std::size_t j = 0; j < g.ys.size(); ++j)
            worst = std::max(worst, norm(res.surface.at(i, j).F - sb.q1(1.0, g.xs[i], g.ys[j]).F));
    CHECK(worst < 1e-6);

    auto zero = Characteristic::custom("0", [](const Potential&, const JetPoint&) { return QValue{}; });
    IntegrationOptions zopt;
    zopt.origin = Sl2Element{1, 2, 3};
    auto z = integrate_surface(zero, sn, 1.2, g, zopt);
    for (const auto& s : z.surface.samples) CHECK(norm(s.F - Sl2Element{1, 2, 3}) == 0.0);

    auto dn = Solution::dn(0.9);
    auto q2 = Characteristic::q2(dn, -10, 10);
    Grid g2{linspace(0.45, 1.6, 40), linspace(-1, 1, 40)};
    auto r2 = integrate_surface(q2, dn, 1.2, g2);
    CHECK(r2.closure < 1e-6);
    for (const auto& s : r2.surface.samples) {
        CHECK(std::isfinite(norm(s.F)));
        CHECK(norm(s.Fx) + norm(s.Fy) > 0);
    }

    // a tangent field that fails the compatibility condition
    auto u_only = Characteristic::custom("u", [](const Potential&, const JetPoint& j) {
        return QValue{j.u, j.u_x, j.u_xx};
    });
    CHECK_THROWS_AS(integrate_surface(u_only, sn, 1.2, g), CompatibilityError);

    // pole strip inside the grid
    CHECK_THROWS_AS(integrate_surface(Characteristic::q1(), sn, 0.5, g), DomainError);
}

TEST_CASE("prolongation tangents are linear in Q") {
    auto dn = Solution::dn(0.9);
    auto q2 = Characteristic::q2(dn, -10, 10);
    auto q1 = Characteristic::q1();
    auto mix = Characteristic::combine(0.3, q1, -1.4, q2);
    SurfaceBuilder sb(dn, 1.2);
    for (double x : {0.5, 0.9, 1.4}) {
        auto a = sb.q_tangents(q1, x, 0.2), b = sb.q_tangents(q2, x, 0.2), c = sb.q_tangents(mix, x, 0.2);
        CHECK(norm(c.Fx - (0.3 * a.Fx - 1.4 * b.Fx)) < 1e-13 * std::max(1.0, norm(c.Fx)));
        CHECK(norm(c.Fy - (0.3 * a.Fy - 1.4 * b.Fy)) < 1e-13 * std::max(1.0, norm(c.Fy)));
    }
}

TEST_CASE("compatibility of the A, B fields") {
    auto sn = Solution::sn(0.5);
    auto pot = sn.potential();
    Grid g{linspace(-8, 8, 41), linspace(-2, 2, 5)};
    auto st = sym_tafel_fields(pot, 1.2);
    CHECK(ab_compatibility_residual(st.A, st.B, sn, 1.2, g) < 1e-6);
    auto q1 = q1_fields(pot, 1.2);
    CHECK(ab_compatibility_residual(q1.A, q1.B, sn, 1.2, g) < 1e-6);
    auto ga = gauge_fields(pot, 1.2, GaugeField::constant(Sl2Element::e3()));
    CHECK(ab_compatibility_residual(ga.A, ga.B, sn, 1.2, g) < 1e-6);
    auto ramp = gauge_fields(pot, 1.2, GaugeField::along(Sl2Element::e2(), [](double y) { return y * y; },
                                                          [](double y) { return 2 * y; }));
    CHECK(ab_compatibility_residual(ramp.A, ramp.B, sn, 1.2, g) < 1e-6);
    // mismatched pair
    CHECK(ab_compatibility_residual(st.A, q1.B, sn, 1.2, g) > 1e-3);
}

TEST_CASE("grid sampling") {
    auto sn = Solution::sn(0.2);
    SurfaceParams p{0.5, 1.0, 0.0, std::nullopt};
    Grid g{linspace(-20, 20, 81), linspace(-5, 5, 11)};
    auto serial = sample_surface(sn, p, g, 1);
    auto threaded = sample_surface(sn, p, g, 4);
    CHECK(serial.masked() > 0);
    CHECK(serial.masked() == threaded.masked());
    for (std::size_t k = 0; k < serial.samples.size(); ++k) {
        CHECK(serial.samples[k].F.x1 == threaded.samples[k].F.x1);
        CHECK(serial.samples[k].Fy.x3 == threaded.samples[k].Fy.x3);
    }

    auto wp = Solution::weierstrass(0, 1);
    SurfaceParams pw{1.0, 1.0, 0.0, std::nullopt};
    Grid gw{linspace(0.2, 3, 29), linspace(-M_PI / 5, M_PI / 5, 9)};
    auto sw = sample_surface(wp, pw, gw);
    CHECK(sw.masked() == 0);
    for (const auto& s : sw.samples) CHECK(std::isfinite(norm(s.F)));
}
