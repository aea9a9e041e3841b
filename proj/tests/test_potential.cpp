#include <doctest.h>

#include <cmath>
#include <random>

#include "soliton/errors.hpp"
#include "soliton/potential.hpp"

using namespace soliton;

namespace {

void check_jet(const Solution& sol, double x) {
    JetPoint j = sol.jet(x);
    FValue fv = eval_f(sol.potential(), j.u);
    CHECK(std::abs(j.u_x * j.u_x - fv.f) < 1e-10 * std::max(1.0, std::abs(fv.f)));
    CHECK(std::abs(j.u_xx - 0.5 * fv.f_prime) < 1e-10 * std::max(1.0, std::abs(fv.f_prime)));
    if (std::abs(j.u_x) > 1e-8) CHECK((j.u_x > 0) == (j.epsilon > 0));
}

}  // namespace

TEST_CASE("polynomial values") {
    auto sn = Potential::jacobi(1.0, -0.25);
    CHECK(eval_f(sn, 0.0).f == 1.0);
    auto wp = Potential::weierstrass(0.0, 1.0);
    FValue v = eval_f(wp, 1.0);
    CHECK(v.f == 3.0);
    CHECK(v.f_prime == 12.0);
    CHECK(v.f_double_prime == 24.0);
    for (const auto& p : {sn, wp, Potential::jacobi(0.3, 0.7), Potential::polynomial({1, -2, 0.5, 3, -1})}) {
        for (double u : {-1.3, -0.2, 0.0, 0.4, 2.1}) {
            double h = 1e-5;
            double fd = (p.eval(u + h).f - p.eval(u - h).f) / (2 * h);
            CHECK(std::abs(fd - p.eval(u).f_prime) < 1e-8);
            double fd2 = (p.eval(u + h).f_prime - p.eval(u - h).f_prime) / (2 * h);
            CHECK(std::abs(fd2 - p.eval(u).f_double_prime) < 1e-7);
        }
    }
}

TEST_CASE("jacobi coefficients expand the product form") {
    auto p = Potential::jacobi(0.36, 0.64);
    for (double u : {-0.9, 0.0, 0.3, 1.7})
        CHECK(p.eval(u).f == doctest::Approx((1 - u * u) * (0.36 + 0.64 * u * u)).epsilon(1e-15));
    CHECK(p.degree() == 4);
    CHECK(Potential::weierstrass(1, 2).degree() == 3);
    CHECK_THROWS_AS(Potential::polynomial({1, 0, 0, 0, 0}), DomainError);
}

TEST_CASE("discriminate") {
    CHECK(discriminate(Potential::weierstrass(0, 1), 1.0) == -5.0);
    auto sn = Potential::jacobi(1.0, -0.25);
    double g = discriminate(sn, 1.2);
    CHECK(g == doctest::Approx((1 - 1.44) * (1 - 0.25 * 1.44)).epsilon(1e-15));
    CHECK(g < 0.0);
    CHECK(discriminate(sn, 0.0) == sn.eval(0.0).f);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-5, 5);
    for (int i = 0; i < 100; ++i) {
        double l = d(rng);
        CHECK(discriminate(sn, l) == sn.eval(-l).f);
        double h = 1e-6;
        CHECK(std::abs(discriminate_prime(sn, l) -
                       (discriminate(sn, l + h) - discriminate(sn, l - h)) / (2 * h)) <
              1e-6 * std::max(1.0, std::abs(discriminate_prime(sn, l))));
    }
}

TEST_CASE("divided differences") {
    auto p = Potential::polynomial({0.7, -1.1, 2.0, 0.3, -0.4});
    auto f = [&](double u) { return p.eval(u).f; };
    double a = 0.3, b = -1.2, c = 0.9;
    double ab = (f(a) - f(b)) / (a - b);
    CHECK(p.divided_difference(std::array{a, b}) == doctest::Approx(ab).epsilon(1e-13));
    double bc = (f(b) - f(c)) / (b - c);
    CHECK(p.divided_difference(std::array{a, b, c}) == doctest::Approx((ab - bc) / (a - c)).epsilon(1e-12));
    // confluent nodes give derivatives
    CHECK(p.divided_difference(std::array{a, a}) == doctest::Approx(p.eval(a).f_prime).epsilon(1e-14));
    CHECK(p.divided_difference(std::array{a, a, a}) ==
          doctest::Approx(p.eval(a).f_double_prime / 2).epsilon(1e-14));
    CHECK(p.divided_difference(std::array{a, b, c, 0.1, 5.0}) == doctest::Approx(-0.4).epsilon(1e-15));
}

TEST_CASE("named solution jets") {
    JetPoint j = Solution::sn(0.5).jet(0.0);
    CHECK(j.u == 0.0);
    CHECK(j.u_x == 1.0);
    CHECK(j.u_xx == 0.0);

    JetPoint d = Solution::dn(0.8).jet(1.3);
    double kp2 = 1 - 0.64;
    CHECK(std::abs(d.u_x * d.u_x - (1 - d.u * d.u) * (-kp2 + d.u * d.u)) < 1e-10);

    JetPoint w = Solution::weierstrass(0, 1).jet(0.7);
    CHECK(std::abs(w.u_xx - 6 * w.u * w.u) < 1e-10);
    CHECK(w.epsilon == -1);

    std::vector<Solution> sols{Solution::sn(0.5),  Solution::sn(0.8),  Solution::cn(0.3),
                               Solution::cn(1.0 / std::sqrt(2.0)), Solution::dn(0.8),
                               Solution::sn(0.0),  Solution::sn(0.2, 1.5)};
    for (const auto& s : sols)
        for (int i = 0; i < 1000; ++i) check_jet(s, -20.0 + 40.0 * i / 999.0);
    auto wp = Solution::weierstrass(0, 1);
    for (int i = 0; i < 1000; ++i) {
        double x = 0.05 + 2.95 * i / 999.0;
        if (wp.pole_distance(x) > 0.05) check_jet(wp, x);
    }
    auto lem = Solution::weierstrass(4, 0);
    for (int i = 0; i < 200; ++i) check_jet(lem, 0.1 + 2.3 * i / 199.0);
}

TEST_CASE("weierstrass branch sign") {
    auto wp = Solution::weierstrass(0, 1);
    double om = wp.invariants()->real_half_period();
    CHECK(wp.jet(0.5 * om).epsilon == -1);
    CHECK(wp.jet(1.5 * om).epsilon == 1);
    CHECK_THROWS_AS(wp.jet(2 * om + 1e-5), PoleError);
    CHECK_THROWS_AS(wp.jet(0.0), PoleError);
    CHECK(wp.inverse_u_plus(2 * om, 1.0) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("translation is exact") {
    for (double x0 : {0.37, -2.5}) {
        auto a = Solution::cn(0.6, x0);
        auto b = Solution::cn(0.6);
        for (double x : {-3.0, 0.1, 4.4}) {
            JetPoint ja = a.jet(x), jb = b.jet(x - x0);
            CHECK(ja.u == jb.u);
            CHECK(ja.u_x == jb.u_x);
            CHECK(ja.u_xx == jb.u_xx);
        }
        auto wa = Solution::weierstrass(0, 1, x0), wb = Solution::weierstrass(0, 1);
        JetPoint ja = wa.jet(1.0 + x0), jb = wb.jet(1.0);
        CHECK(ja.u == jb.u);
        CHECK(ja.u_x == jb.u_x);
    }
}

TEST_CASE("numeric solution tracks sn") {
    auto pot = Potential::jacobi(1.0, -0.25);
    auto num = Solution::numeric(pot, 0.0, 0.0, 1);
    auto ex = Solution::sn(0.5);
    for (double x : {-3.0, 0.5, 2.0, 5.0}) {
        CHECK(std::abs(num.jet(x).u - ex.jet(x).u) < 1e-9);
        check_jet(num, x);
    }
    CHECK_THROWS_AS(Solution::numeric(pot, 0.0, 1.5, 1), DomainError);
}

TEST_CASE("root pair") {
    auto lem = weierstrass_root_pair(elliptic::WeierstrassInvariants::from(4, 0));
    CHECK(!lem.degenerate);
    std::vector<double> roots{-lem.a1.real(), -lem.a2.real(), (lem.a1 + lem.a2).real()};
    std::sort(roots.begin(), roots.end());
    CHECK(roots[0] == doctest::Approx(-1.0));
    CHECK(std::abs(roots[1]) < 1e-12);
    CHECK(roots[2] == doctest::Approx(1.0));

    for (auto [g2, g3] : {std::pair{0.0, 1.0}, {4.0, 0.0}, {3.0, -2.5}, {-1.0, 0.7}, {10.0, 1.0}}) {
        auto inv = elliptic::WeierstrassInvariants::from(g2, g3);
        auto r = weierstrass_root_pair(inv);
        // 4(u+a1)(u+a2)(u-a1-a2) = 4u³ - 4(a1² + a1a2 + a2²)u - 4a1a2(a1+a2)
        Complex c1 = -4.0 * (r.a1 * r.a1 + r.a1 * r.a2 + r.a2 * r.a2);
        Complex c0 = -4.0 * r.a1 * r.a2 * (r.a1 + r.a2);
        CHECK(std::abs(c1 + g2) < 1e-12 * std::max(1.0, std::abs(g2)));
        CHECK(std::abs(c0 + g3) < 1e-12 * std::max(1.0, std::abs(g3)));
    }
    auto g01 = weierstrass_root_pair(elliptic::WeierstrassInvariants::from(0, 1));
    CHECK(std::abs((g01.a1 + g01.a2).real() - std::cbrt(0.25)) < 1e-12);
    CHECK(std::abs(g01.a1 - std::conj(g01.a2)) < 1e-12);
    CHECK(weierstrass_root_pair(elliptic::WeierstrassInvariants::from(3, 1)).degenerate);
}

TEST_CASE("config text") {
    auto s = parse_solution("jacobi_sn k=0.5");
    CHECK(s.kind() == SolutionKind::Sn);
    CHECK(s.spec().k == 0.5);
    CHECK(s.potential().k2() == -0.25);
    auto w = parse_solution("  weierstrass g2=0 g3=1");
    CHECK(w.potential().kind() == PotentialKind::Weierstrass);
    CHECK(w.potential().g3() == 1.0);
    CHECK(to_text(parse_solution(to_text(Solution::cn(0.3, 1.25)))) == to_text(Solution::cn(0.3, 1.25)));
    auto poly = parse_solution("polynomial c0=1 c2=-1.25 c4=0.25 u0=0");
    CHECK(std::abs(poly.jet(1.0).u - Solution::sn(0.5).jet(1.0).u) < 1e-9);
    CHECK_THROWS_AS(parse_solution("jacobi_xn k=0.5"), ConfigError);
    CHECK_THROWS_AS(parse_solution("jacobi_sn k=abc"), ConfigError);
    CHECK_THROWS_AS(parse_solution("jacobi_sn"), ConfigError);
    CHECK_THROWS_AS(parse_solution("jacobi_sn k=2"), ConfigError);
    CHECK_THROWS_AS(parse_solution("weierstrass g2=0 g3=1 q=3"), ConfigError);
    try {
        parse_solution("jacobi_sn k=0.5x");
    } catch (const ConfigError& e) {
        CHECK(e.column() == 13);
    }
}
