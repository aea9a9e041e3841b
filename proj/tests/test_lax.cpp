#include <doctest.h>

#include <cmath>
#include <random>

#include "soliton/errors.hpp"
#include "soliton/lax.hpp"

using namespace soliton;

TEST_CASE("structure constants") {
    auto e1 = Sl2Element::e1(), e2 = Sl2Element::e2(), e3 = Sl2Element::e3();
    auto same = [](const Sl2Element& a, const Sl2Element& b) {
        return a.x1 == b.x1 && a.x2 == b.x2 && a.x3 == b.x3;
    };
    CHECK(same(bracket(e3, e1), -2.0 * e1));
    CHECK(same(bracket(e3, e2), 2.0 * e2));
    CHECK(same(bracket(e2, e1), e3));
    CHECK(same(Sl2Element::from_matrix(commutator(e3.matrix(), e1.matrix())), -2.0 * e1));
    CHECK(same(Sl2Element::from_matrix(commutator(e2.matrix(), e1.matrix())), e3));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-10, 10);
    for (int i = 0; i < 1000; ++i) {
        Sl2Element X{d(rng), d(rng), d(rng)}, Y{d(rng), d(rng), d(rng)};
        Sl2Element a = bracket(X, Y);
        Sl2Element b = Sl2Element::from_matrix(commutator(X.matrix(), Y.matrix()));
        CHECK(norm(a - b) <= 1e-14 * std::max(1.0, norm(a)) * 10);
        CHECK(X.matrix().trace() == 0.0);
        Sl2Element back = Sl2Element::from_matrix(X.matrix());
        CHECK(same(back, X));
    }
}

TEST_CASE("spectral point") {
    auto pot = Potential::jacobi(1.0, -0.25);
    auto sp = SpectralPoint::at(pot, 1.2);
    CHECK(sp.g < 0);
    CHECK(sp.sqrt_g.imag() != 0.0);
    CHECK(std::abs(sp.sqrt_g * sp.sqrt_g - sp.g) < 1e-14);
    auto sp2 = SpectralPoint::at(pot, 0.5);
    CHECK(sp2.sqrt_g.imag() == 0.0);
    CHECK(std::abs(sp2.sqrt_g * sp2.sqrt_g - sp2.g) < 1e-14);
}

TEST_CASE("closed-form entries") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-2, 2);
    auto wp = Potential::weierstrass(0.7, 1.0);
    auto jac = Potential::jacobi(0.6, -0.3);
    for (int i = 0; i < 200; ++i) {
        JetPoint j{0.0, d(rng), d(rng), d(rng), 1};
        double l = d(rng);
        if (std::abs(j.u + l) < 1e-3) continue;
        auto sw = SpectralPoint::at(wp, l);
        Sl2Element M = build_M(wp, sw, j);
        CHECK(M.x2 == doctest::Approx(-4 * j.u * j.u + 4 * l * j.u - 4 * l * l + 0.7).epsilon(1e-12));
        CHECK(M.x1 == j.u + l);
        CHECK(M.x3 == j.u_x);
        Sl2Element L = build_L(wp, sw, j);
        CHECK(L.x2 == doctest::Approx(4 * j.u - 2 * l).epsilon(1e-12));
        CHECK(L.x1 == 0.5);
        CHECK(L.x3 == 0.0);
        CHECK(printed_L(wp, sw, j).x2 == doctest::Approx(0.5 * (4 * j.u - 2 * l)));

        auto sj = SpectralPoint::at(jac, l);
        const double k1 = 0.6, k2 = -0.3, u = j.u;
        CHECK(build_M(jac, sj, j).x2 ==
              doctest::Approx((u - l) * (k2 * (u * u + l * l) + k1 - k2)).epsilon(1e-12));
        CHECK(build_L(jac, sj, j).x2 ==
              doctest::Approx(0.5 * (-3 * k2 * u * u + 2 * l * k2 * u + k2 - k1 - k2 * l * l)).epsilon(1e-12));

        // general quotient form
        FValue fv = jac.eval(u);
        double s = u + l;
        CHECK(build_L(jac, sj, j).x2 ==
              doctest::Approx(0.5 * (fv.f_prime / s - (fv.f - sj.g) / (s * s))).epsilon(1e-8));
        CHECK(build_M(jac, sj, j).x2 == doctest::Approx(-(fv.f - sj.g) / s).epsilon(1e-10));
    }
    CHECK_THROWS_AS(printed_L(Potential::polynomial({1, 1, 0, 0, 0}), SpectralPoint{}, JetPoint{0, 1, 0, 0, 1}),
                    UnsupportedError);
}

TEST_CASE("pole guard") {
    auto pot = Potential::jacobi(1.0, -0.25);
    auto sp = SpectralPoint::at(pot, 0.5);
    JetPoint j{2.0, -0.5, 0.1, 0.0, 1};
    try {
        build_M(pot, sp, j);
        FAIL("expected pole");
    } catch (const PoleError& e) {
        CHECK(e.x() == 2.0);
        CHECK(e.lambda() == 0.5);
    }
    j.u = -0.5 + 2e-9;
    CHECK_NOTHROW(build_L(pot, sp, j));
}

TEST_CASE("determinant of M on solutions") {
    for (const auto& sol : {Solution::sn(0.5), Solution::cn(0.8), Solution::dn(0.8)}) {
        auto sp = SpectralPoint::at(sol.potential(), 1.2);
        for (double x : linspace(-8, 8, 101)) {
            Sl2Element M = build_M(sol.potential(), sp, sol.jet(x));
            CHECK(std::abs(M.matrix().det() + sp.g) < 1e-12);
        }
    }
}

TEST_CASE("jacobians match finite differences") {
    auto pot = Potential::polynomial({0.3, -1.0, 0.5, 2.0, -0.7});
    JetPoint j{0.0, 0.4, 0.9, -0.2, 1};
    auto sp = SpectralPoint::at(pot, 0.8);
    auto J = lax_jacobians(pot, sp, j);
    const double h = 1e-6;
    auto shifted_u = [&](double du) {
        JetPoint k = j;
        k.u += du;
        return k;
    };
    Sl2Element fdL = (build_L(pot, sp, shifted_u(h)) - build_L(pot, sp, shifted_u(-h))) * (0.5 / h);
    Sl2Element fdM = (build_M(pot, sp, shifted_u(h)) - build_M(pot, sp, shifted_u(-h))) * (0.5 / h);
    CHECK(norm(fdL - J.dL_du) < 1e-8);
    CHECK(norm(fdM - J.dM_du) < 1e-8);
    JetPoint jx = j;
    jx.u_x += h;
    JetPoint jm = j;
    jm.u_x -= h;
    CHECK(norm((build_M(pot, sp, jx) - build_M(pot, sp, jm)) * (0.5 / h) - J.dM_dux) < 1e-8);
    CHECK(norm((build_L(pot, sp, jx) - build_L(pot, sp, jm))) == 0.0);
    auto sp_p = SpectralPoint::at(pot, 0.8 + h), sp_m = SpectralPoint::at(pot, 0.8 - h);
    CHECK(norm((build_L(pot, sp_p, j) - build_L(pot, sp_m, j)) * (0.5 / h) - J.dL_dlambda) < 1e-8);
    CHECK(norm((build_M(pot, sp_p, j) - build_M(pot, sp_m, j)) * (0.5 / h) - J.dM_dlambda) < 1e-8);

    auto wp = Potential::weierstrass(0, 1);
    JetPoint w{0.0, 1.7, 0.0, 0.0, -1};
    auto sw = SpectralPoint::at(wp, 1.0);
    Sl2Element dM = dlambda_M(wp, sw, w);
    CHECK(dM.x1 == 1.0);
    CHECK(dM.x2 == doctest::Approx(4 * 1.7 - 8 * 1.0));
    CHECK(dM.x3 == 0.0);
}

TEST_CASE("lax residual on named solutions") {
    for (double k : {0.0, 0.5, 0.8}) {
        for (const auto& sol : {Solution::sn(k), Solution::cn(k)}) {
            auto sp = SpectralPoint::at(sol.potential(), 1.2);
            auto st = lax_residual_grid(sol, sp, linspace(-8, 8, 200));
            CHECK(st.max < 1e-9);
            CHECK(st.evaluated == 200);
        }
        if (k > 0) {
            auto dn = Solution::dn(k);
            auto st = lax_residual_grid(dn, SpectralPoint::at(dn.potential(), 1.2), linspace(-8, 8, 200));
            CHECK(st.max < 1e-9);
        }
    }
    auto wp = Solution::weierstrass(0, 1);
    auto st = lax_residual_grid(wp, SpectralPoint::at(wp.potential(), 1.0), linspace(0.2, 3, 200));
    CHECK(st.max < 1e-9);
    CHECK(st.evaluated == 200);
}

TEST_CASE("random spectral parameters") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-4, 4);
    std::vector<Solution> sols{Solution::sn(0.5), Solution::cn(0.3), Solution::dn(0.8),
                               Solution::weierstrass(0, 1)};
    for (const auto& sol : sols) {
        for (int i = 0; i < 20; ++i) {
            double l = d(rng);
            auto sp = SpectralPoint::at(sol.potential(), l);
            double x0 = sol.kind() == SolutionKind::WeierstrassP ? 0.3 : -6.0;
            double x1 = sol.kind() == SolutionKind::WeierstrassP ? 2.7 : 6.0;
            for (double x : linspace(x0, x1, 60)) {
                JetPoint j = sol.jet(x);
                if (std::abs(j.u + l) < 0.05) continue;
                CHECK(lax_residual(sol.potential(), sp, j) < 1e-9);
            }
        }
    }
}

TEST_CASE("residual detects non-solutions") {
    auto sol = Solution::sn(0.5);
    auto sp = SpectralPoint::at(sol.potential(), 1.2);
    JetPoint j = sol.jet(0.7);
    j.u_xx += 0.1;
    // only D_xM's diagonal sees u_xx: residual = 0.1·‖diag(1,-1)‖
    CHECK(lax_residual(sol.potential(), sp, j) == doctest::Approx(0.1 * std::sqrt(2.0)).epsilon(1e-9));

    double worst = 0.0;
    for (double x : linspace(-8, 8, 200)) {
        JetPoint k = sol.jet(x);
        Sl2Element M = build_M(sol.potential(), sp, k);
        Sl2Element L = printed_L(sol.potential(), sp, k);
        worst = std::max(worst, frobenius((dx_M(sol.potential(), sp, k) + bracket(M, L)).matrix()));
    }
    CHECK(worst > 1e-3);
}
