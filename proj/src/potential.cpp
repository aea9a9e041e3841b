#include "soliton/potential.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "soliton/errors.hpp"

namespace soliton {

namespace {

int sign_of(double v, int fallback) {
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return fallback;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Potential Potential::jacobi(double k1, double k2) {
    Potential p;
    p.kind_ = PotentialKind::Jacobi;
    p.p1_ = k1;
    p.p2_ = k2;
    // (1 - u²)(k1 + k2u²) = k1 + (k2 - k1)u² - k2u⁴
    p.coeffs_ = {k1, 0.0, k2 - k1, 0.0, -k2};
    if (p.degree() < 1) throw DomainError("jacobi potential is constant");
    return p;
}

Potential Potential::weierstrass(double g2, double g3) {
    Potential p;
    p.kind_ = PotentialKind::Weierstrass;
    p.p1_ = g2;
    p.p2_ = g3;
    p.coeffs_ = {-g3, -g2, 0.0, 4.0, 0.0};
    return p;
}

Potential Potential::polynomial(std::array<double, 5> coeffs) {
    Potential p;
    p.kind_ = PotentialKind::GeneralPolynomial;
    p.coeffs_ = coeffs;
    if (p.degree() < 1) throw DomainError("potential must have degree 1..4");
    return p;
}

int Potential::degree() const noexcept {
    for (int i = 4; i > 0; --i)
        if (coeffs_[i] != 0.0) return i;
    return 0;
}

FValue Potential::eval(double u) const {
    const auto& c = coeffs_;
    double f = (((c[4] * u + c[3]) * u + c[2]) * u + c[1]) * u + c[0];
    double fp = ((4.0 * c[4] * u + 3.0 * c[3]) * u + 2.0 * c[2]) * u + c[1];
    double fpp = (12.0 * c[4] * u + 6.0 * c[3]) * u + 2.0 * c[2];
    return {f, fp, fpp};
}

double Potential::f_triple_prime(double u) const { return 24.0 * coeffs_[4] * u + 6.0 * coeffs_[3]; }

double Potential::divided_difference(std::span<const double> nodes) const {
    const std::size_t k = nodes.size() - 1;
    if (nodes.empty() || k > 4) throw DomainError("divided difference needs 1..5 nodes");
    // f[z0..zk] = Σ_n c_n h_{n-k}(z0..zk), h = complete homogeneous symmetric polynomial
    std::array<double, 5> h{1.0, 0.0, 0.0, 0.0, 0.0};
    const std::size_t top = 4 - k;
    for (double z : nodes)
        for (std::size_t m = 1; m <= top; ++m) h[m] += z * h[m - 1];
    double sum = 0.0;
    for (std::size_t n = k; n <= 4; ++n) sum += coeffs_[n] * h[n - k];
    return sum;
}

FValue eval_f(const Potential& pot, double u) { return pot.eval(u); }

double discriminate(const Potential& pot, double lambda) { return pot.eval(-lambda).f; }

double discriminate_prime(const Potential& pot, double lambda) { return -pot.eval(-lambda).f_prime; }

Solution Solution::sn(double k, double x0) { return named({SolutionKind::Sn, k, 0.0, 0.0, x0}); }
Solution Solution::cn(double k, double x0) { return named({SolutionKind::Cn, k, 0.0, 0.0, x0}); }
Solution Solution::dn(double k, double x0) { return named({SolutionKind::Dn, k, 0.0, 0.0, x0}); }
Solution Solution::weierstrass(double g2, double g3, double x0) {
    return named({SolutionKind::WeierstrassP, 0.0, g2, g3, x0});
}

Solution Solution::named(const NamedSolution& spec) {
    Solution s;
    s.spec_ = spec;
    const double k = spec.k;
    const double k2 = k * k;
    const double kp2 = 1.0 - k2;
    if (spec.kind != SolutionKind::WeierstrassP && spec.kind != SolutionKind::Numeric) {
        if (!(k >= 0.0 && k <= 1.0)) throw DomainError("jacobi modulus must lie in [0,1]");
    }
    switch (spec.kind) {
    case SolutionKind::Sn:
        s.potential_ = Potential::jacobi(1.0, -k2);
        break;
    case SolutionKind::Cn:
        s.potential_ = Potential::jacobi(kp2, k2);
        break;
    case SolutionKind::Dn:
        if (k == 0.0) throw DomainError("dn with k = 0 is constant");
        s.potential_ = Potential::jacobi(-kp2, 1.0);
        break;
    case SolutionKind::WeierstrassP:
        s.potential_ = Potential::weierstrass(spec.g2, spec.g3);
        s.inv_ = elliptic::WeierstrassInvariants::from(spec.g2, spec.g3);
        if (!(s.inv_.omega_re > 0.0) || !std::isfinite(s.inv_.omega_re))
            throw DomainError("weierstrass invariants give a degenerate lattice");
        break;
    case SolutionKind::Numeric:
        throw DomainError("numeric solutions are built with Solution::numeric");
    }
    return s;
}

Solution Solution::numeric(const Potential& pot, double x_start, double u_start, int epsilon,
                           double step) {
    double f = pot.eval(u_start).f;
    if (f < 0.0) throw DomainError("f(u0) < 0: no real solution through u0");
    if (!(step > 0.0)) throw DomainError("step must be positive");
    Solution s;
    s.potential_ = pot;
    s.spec_.kind = SolutionKind::Numeric;
    s.x_start_ = x_start;
    s.u_start_ = u_start;
    s.ux_start_ = (epsilon < 0 ? -1.0 : 1.0) * std::sqrt(f);
    s.step_ = step;
    return s;
}

JetPoint Solution::jet(double x) const {
    JetPoint j;
    j.x = x;
    const double t = x - spec_.x0;
    const double k = spec_.k;
    const double k2 = k * k;
    switch (spec_.kind) {
    case SolutionKind::Sn: {
        auto e = elliptic::jacobi_sn_cn_dn(t, k);
        j.u = e.sn;
        j.u_x = e.cn * e.dn;
        break;
    }
    case SolutionKind::Cn: {
        auto e = elliptic::jacobi_sn_cn_dn(t, k);
        j.u = e.cn;
        j.u_x = -e.sn * e.dn;
        break;
    }
    case SolutionKind::Dn: {
        auto e = elliptic::jacobi_sn_cn_dn(t, k);
        j.u = e.dn;
        j.u_x = -k2 * e.sn * e.cn;
        break;
    }
    case SolutionKind::WeierstrassP: {
        auto w = elliptic::weierstrass_p(t, inv_);
        j.u = w.p;
        j.u_x = w.p_prime;
        break;
    }
    case SolutionKind::Numeric: {
        const double span = x - x_start_;
        const int n = static_cast<int>(std::ceil(std::abs(span) / step_));
        double u = u_start_;
        double v = ux_start_;
        if (n > 0) {
            const double h = span / n;
            auto acc = [&](double uu) { return 0.5 * potential_.eval(uu).f_prime; };
            for (int i = 0; i < n; ++i) {
                double k1u = v, k1v = acc(u);
                double k2u = v + 0.5 * h * k1v, k2v = acc(u + 0.5 * h * k1u);
                double k3u = v + 0.5 * h * k2v, k3v = acc(u + 0.5 * h * k2u);
                double k4u = v + h * k3v, k4v = acc(u + h * k3u);
                u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
                v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            }
            const double f = potential_.eval(u).f;
            const double drift = v * v - f;
            if (std::abs(drift) > 1e-9 * std::max(1.0, std::abs(f)))
                throw DomainError("numeric solution lost its first integral (drift " + fmt(drift) +
                                  ")");
        }
        j.u = u;
        j.u_x = v;
        break;
    }
    }
    const FValue fv = potential_.eval(j.u);
    j.u_xx = 0.5 * fv.f_prime;
    // At a turning point the branch is the one the solution enters next.
    j.epsilon = sign_of(j.u_x, sign_of(j.u_xx, -1));
    if (spec_.kind == SolutionKind::WeierstrassP && j.u_x == 0.0) j.epsilon = -1;
    return j;
}

double Solution::reference_point() const noexcept {
    switch (spec_.kind) {
    case SolutionKind::WeierstrassP:
        return 0.5;
    case SolutionKind::Numeric:
        return x_start_;
    default:
        return 0.0;
    }
}

double Solution::pole_distance(double x) const {
    if (spec_.kind != SolutionKind::WeierstrassP) return std::numeric_limits<double>::infinity();
    return elliptic::distance_to_lattice(x - spec_.x0, inv_);
}

double Solution::inverse_u_plus(double x, double lambda) const {
    if (spec_.kind == SolutionKind::WeierstrassP) {
        auto w = elliptic::weierstrass_p_unchecked(x - spec_.x0, inv_);
        if (!std::isfinite(w.p)) return 0.0;
        return 1.0 / (w.p + lambda);
    }
    return 1.0 / (jet(x).u + lambda);
}

std::string Solution::describe() const { return to_text(*this); }

JetPoint solution_jet(const Solution& sol, double x) { return sol.jet(x); }

RootPair weierstrass_root_pair(const elliptic::WeierstrassInvariants& inv) {
    RootPair r;
    r.a1 = -inv.roots[1];
    r.a2 = -inv.roots[2];
    const double scale = std::max({1.0, std::abs(inv.roots[0]), std::abs(inv.roots[1])});
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(inv.roots[i] - inv.roots[j]) < 1e-9 * scale) r.degenerate = true;
    return r;
}

namespace {

std::map<std::string, double> parse_params(std::string_view rest, std::size_t offset) {
    std::map<std::string, double> out;
    std::size_t i = 0;
    while (i < rest.size()) {
        while (i < rest.size() && std::isspace(static_cast<unsigned char>(rest[i]))) ++i;
        if (i >= rest.size()) break;
        std::size_t start = i;
        while (i < rest.size() && !std::isspace(static_cast<unsigned char>(rest[i]))) ++i;
        std::string_view tok = rest.substr(start, i - start);
        auto eq = tok.find('=');
        int col = static_cast<int>(offset + start + 1);
        if (eq == std::string_view::npos || eq == 0)
            throw ConfigError("expected name=value, got '" + std::string(tok) + "'", 1, col);
        std::string name(tok.substr(0, eq));
        std::string_view val = tok.substr(eq + 1);
        double v = 0.0;
        auto res = std::from_chars(val.data(), val.data() + val.size(), v);
        if (res.ec != std::errc() || res.ptr != val.data() + val.size() || !std::isfinite(v))
            throw ConfigError("bad number '" + std::string(val) + "' for " + name, 1,
                              col + static_cast<int>(eq) + 1);
        out[name] = v;
    }
    return out;
}

double take(std::map<std::string, double>& p, const std::string& key, double fallback,
            bool required) {
    auto it = p.find(key);
    if (it == p.end()) {
        if (required) throw ConfigError("missing parameter " + key, 1, 1);
        return fallback;
    }
    double v = it->second;
    p.erase(it);
    return v;
}

}  // namespace

Solution parse_solution(std::string_view text) {
    std::size_t b = text.find_first_not_of(" \t");
    if (b == std::string_view::npos) throw ConfigError("empty potential", 1, 1);
    std::size_t e = text.find_first_of(" \t", b);
    std::string_view head = text.substr(b, e == std::string_view::npos ? text.size() - b : e - b);
    std::string_view rest = e == std::string_view::npos ? std::string_view{} : text.substr(e);
    std::size_t offset = e == std::string_view::npos ? text.size() : e;
    auto p = parse_params(rest, offset);

    Solution sol;
    try {
        if (head == "jacobi_sn" || head == "jacobi_cn" || head == "jacobi_dn") {
            double k = take(p, "k", 0.0, true);
            double x0 = take(p, "x0", 0.0, false);
            sol = head == "jacobi_sn"   ? Solution::sn(k, x0)
                  : head == "jacobi_cn" ? Solution::cn(k, x0)
                                        : Solution::dn(k, x0);
        } else if (head == "weierstrass") {
            double g2 = take(p, "g2", 0.0, true);
            double g3 = take(p, "g3", 0.0, true);
            double x0 = take(p, "x0", 0.0, false);
            sol = Solution::weierstrass(g2, g3, x0);
        } else if (head == "polynomial") {
            std::array<double, 5> c{};
            for (int i = 0; i < 5; ++i) c[i] = take(p, "c" + std::to_string(i), 0.0, false);
            double u0 = take(p, "u0", 0.0, true);
            double x0 = take(p, "x0", 0.0, false);
            double eps = take(p, "eps", 1.0, false);
            sol = Solution::numeric(Potential::polynomial(c), x0, u0, eps < 0 ? -1 : 1);
        } else {
            throw ConfigError("unknown potential '" + std::string(head) + "'", 1,
                              static_cast<int>(b + 1));
        }
    } catch (const DomainError& err) {
        throw ConfigError(err.what(), 1, static_cast<int>(b + 1));
    }
    if (!p.empty()) throw ConfigError("unknown parameter " + p.begin()->first, 1, 1);
    return sol;
}

std::string to_text(const Solution& sol) {
    const auto& s = sol.spec();
    std::ostringstream os;
    switch (s.kind) {
    case SolutionKind::Sn:
        os << "jacobi_sn k=" << fmt(s.k);
        break;
    case SolutionKind::Cn:
        os << "jacobi_cn k=" << fmt(s.k);
        break;
    case SolutionKind::Dn:
        os << "jacobi_dn k=" << fmt(s.k);
        break;
    case SolutionKind::WeierstrassP:
        os << "weierstrass g2=" << fmt(s.g2) << " g3=" << fmt(s.g3);
        break;
    case SolutionKind::Numeric: {
        os << "polynomial";
        const auto& c = sol.potential().coeffs();
        for (int i = 0; i < 5; ++i) os << " c" << i << "=" << fmt(c[i]);
        JetPoint j0 = sol.jet(sol.reference_point());
        os << " u0=" << fmt(j0.u) << " x0=" << fmt(sol.reference_point())
           << " eps=" << (j0.u_x < 0 ? -1 : 1);
        return os.str();
    }
    }
    if (s.x0 != 0.0) os << " x0=" << fmt(s.x0);
    return os.str();
}

}  // namespace soliton
