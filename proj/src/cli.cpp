#include "soliton/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "soliton/errors.hpp"

namespace soliton::cli {

namespace {

struct BadValue : std::runtime_error {
    BadValue(const std::string& m, bool key) : std::runtime_error(m), bad_key(key) {}
    bool bad_key;
};

struct Field {
    std::string key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

double to_double(std::string_view v) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
        throw BadValue("not a finite number: '" + std::string(v) + "'", false);
    return out;
}

int to_int(std::string_view v) {
    int out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw BadValue("not an integer: '" + std::string(v) + "'", false);
    return out;
}

Field num(std::string key, double RunConfig::*m) {
    return {key, [m](RunConfig& c, std::string_view v) { c.*m = to_double(v); },
            [m](const RunConfig& c) { return format_double(c.*m); }};
}

Field count(std::string key, int RunConfig::*m) {
    return {key,
            [m, key](RunConfig& c, std::string_view v) {
                const int n = to_int(v);
                if (n < 2) throw BadValue(key + " must be at least 2", false);
                c.*m = n;
            },
            [m](const RunConfig& c) { return std::to_string(c.*m); }};
}

Field choice(std::string key, std::string RunConfig::*m, std::initializer_list<const char*> allowed) {
    std::vector<const char*> keep(allowed);
    return {key,
            [m, keep](RunConfig& c, std::string_view v) {
                for (const char* a : keep)
                    if (v == a) {
                        c.*m = std::string(v);
                        return;
                    }
                std::string msg = "'" + std::string(v) + "' is not one of";
                for (const char* a : keep) msg += std::string(" ") + a;
                throw BadValue(msg, false);
            },
            [m](const RunConfig& c) { return c.*m; }};
}

Field model_field() {
    Field f = choice("model", &RunConfig::model, {"sn", "cn", "dn", "wp"});
    auto set = f.set;
    f.set = [set](RunConfig& c, std::string_view v) { set(c, v == "weierstrass" ? "wp" : v); };
    return f;
}

Field text(std::string key, std::string RunConfig::*m) {
    return {key, [m](RunConfig& c, std::string_view v) { c.*m = std::string(v); },
            [m](const RunConfig& c) { return c.*m; }};
}

Field s_component(int i) {
    return {"s" + std::to_string(i + 1), [i](RunConfig& c, std::string_view v) { c.s[i] = to_double(v); },
            [i](const RunConfig& c) { return format_double(c.s[i]); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        model_field(),
        num("k", &RunConfig::k),
        num("g2", &RunConfig::g2),
        num("g3", &RunConfig::g3),
        num("x0", &RunConfig::x0),
        num("lambda", &RunConfig::lambda),
        choice("family", &RunConfig::family, {"st", "ux", "combined", "q1", "q2", "q3"}),
        num("a", &RunConfig::a),
        num("b", &RunConfig::b),
        num("gamma", &RunConfig::gamma),
        s_component(0),
        s_component(1),
        s_component(2),
        num("x_min", &RunConfig::x_min),
        num("x_max", &RunConfig::x_max),
        num("y_min", &RunConfig::y_min),
        num("y_max", &RunConfig::y_max),
        count("nx", &RunConfig::nx),
        count("ny", &RunConfig::ny),
        choice("metric", &RunConfig::metric, {"killing", "euclidean"}),
        choice("source", &RunConfig::source, {"general", "jacobi", "weierstrass", "appendix"}),
        choice("variant", &RunConfig::variant, {"printed", "corrected", "derived"}),
        choice("format", &RunConfig::format, {"csv", "obj", "both"}),
        text("out", &RunConfig::out),
        text("preset", &RunConfig::preset),
    };
    return f;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields()) k.push_back(f.key);
        return k;
    }();
    return keys;
}

namespace {

void apply(RunConfig& c, std::string_view key, std::string_view value) {
    for (const auto& f : fields())
        if (f.key == key) {
            f.set(c, value);
            return;
        }
    throw BadValue("unknown key '" + std::string(key) + "'", true);
}

}  // namespace

void set_key(RunConfig& c, std::string_view key, std::string_view value) {
    try {
        apply(c, key, value);
    } catch (const BadValue& e) {
        throw ConfigError(e.what(), 0, 0);
    }
}

RunConfig parse_config(std::string_view text, RunConfig base) {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        ++line_no;
        pos = nl + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        const auto first = line.find_first_not_of(" \t");
        if (eq == std::string_view::npos)
            throw ConfigError("expected key=value", line_no, static_cast<int>(first + 1));
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        try {
            apply(base, key, value);
        } catch (const BadValue& e) {
            std::size_t col = e.bad_key ? line.find(key) : eq + 1 + line.substr(eq + 1).find_first_not_of(" \t");
            if (col == std::string_view::npos) col = eq + 1;
            throw ConfigError(e.what(), line_no, static_cast<int>(col + 1));
        }
    }
    return base;
}

std::string to_text(const RunConfig& c) {
    std::string out;
    for (const auto& f : fields()) out += f.key + "=" + f.get(c) + "\n";
    return out;
}

Solution make_solution(const RunConfig& c) {
    if (c.model == "sn") return Solution::sn(c.k, c.x0);
    if (c.model == "cn") return Solution::cn(c.k, c.x0);
    if (c.model == "dn") return Solution::dn(c.k, c.x0);
    return Solution::weierstrass(c.g2, c.g3, c.x0);
}

Grid make_grid(const RunConfig& c) {
    return {linspace(c.x_min, c.x_max, c.nx), linspace(c.y_min, c.y_max, c.ny)};
}

Family family_of(const RunConfig& c) {
    if (c.family == "st") return Family::ST;
    if (c.family == "ux" || c.family == "q1") return Family::Ux;
    if (c.family == "q2" || c.family == "q3") return Family::Q;
    throw UnsupportedError("family '" + c.family + "' has no fundamental-form closed form");
}

MetricKind metric_of(const RunConfig& c) {
    return c.metric == "euclidean" ? MetricKind::Euclidean : MetricKind::Killing;
}

ClosedSource source_of(const RunConfig& c) {
    if (c.source == "jacobi") return ClosedSource::Jacobi;
    if (c.source == "weierstrass") return ClosedSource::Weierstrass;
    if (c.source == "appendix") return ClosedSource::Appendix;
    return ClosedSource::General;
}

FormVariant variant_of(const RunConfig& c) {
    if (c.variant == "corrected") return FormVariant::Corrected;
    if (c.variant == "derived") return FormVariant::Derived;
    return FormVariant::Printed;
}

namespace {

Characteristic characteristic(const RunConfig& c, const Solution& sol) {
    if (c.family == "q2") return Characteristic::q2(sol, c.x_min - 1.0, c.x_max + 1.0);
    if (c.family == "q3") return Characteristic::q3(sol.potential(), c.gamma);
    return Characteristic::q1();
}

}  // namespace

SurfaceGrid build_surface(const RunConfig& c, double* closure) {
    const Solution sol = make_solution(c);
    const Grid grid = make_grid(c);
    if (c.family == "q1" || c.family == "q2" || c.family == "q3") {
        const Characteristic Q = characteristic(c, sol);
        auto r = integrate_surface(Q, sol, c.lambda, grid);
        if (closure) *closure = r.closure;
        return std::move(r.surface);
    }
    SurfaceParams p;
    p.lambda = c.lambda;
    if (c.family == "st") {
        p.a_lambda = c.a;
    } else if (c.family == "ux") {
        p.b = c.b;
    } else {
        p.a_lambda = c.a;
        p.b = c.b;
        p.gauge = GaugeField::constant({c.s[0], c.s[1], c.s[2]});
    }
    if (closure) *closure = 0.0;
    return sample_surface(sol, p, grid);
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = [] {
        std::vector<Preset> t;
        auto base = [](const char* model, double lambda) {
            RunConfig c;
            c.model = model;
            c.lambda = lambda;
            return c;
        };
        // Figure 1: sn, lambda = 1.2, x and y in [-8, 8]
        for (auto [k, tag] : {std::pair{0.0, "k0"}, std::pair{0.5, "k05"}, std::pair{0.8, "k08"}})
            for (auto fam : {"st", "ux"}) {
                RunConfig c = base("sn", 1.2);
                c.k = k;
                c.family = fam;
                c.x_min = c.y_min = -8;
                c.x_max = c.y_max = 8;
                char cap[64];
                std::snprintf(cap, sizeof cap, "F^%s: lambda=1.2, k=%g", fam[0] == 's' ? "ST" : "{u_x}", k);
                t.push_back({std::string("fig1-sn-") + tag + "-" + fam, 1, cap, c, {}});
            }
        // Figure 2: sn, lambda = 0.5, k = 0.2, x in [-20, 20], y in [-5, 5]
        for (auto fam : {"st", "ux"}) {
            RunConfig c = base("sn", 0.5);
            c.k = 0.2;
            c.family = fam;
            c.x_min = -20;
            c.x_max = 20;
            c.y_min = -5;
            c.y_max = 5;
            c.nx = 161;
            t.push_back({std::string("fig2-sn-k02-") + fam, 2,
                         std::string("F^") + (fam[0] == 's' ? "ST" : "{u_x}") + ": lambda=0.5, k=0.2", c,
                         {}});
        }
        // Figure 3: p(x; 0, 1)
        const double yr = std::numbers::pi / 5;
        const std::string reversed =
            "panel y range [-pi/g(1), pi/g(1)] is reversed since g(1) = -5; using [-pi/5, pi/5]";
        for (auto fam : {"st", "ux"}) {
            RunConfig c = base("wp", 1.0);
            c.g2 = 0;
            c.g3 = 1;
            c.family = fam;
            c.x_min = 0.2;
            c.x_max = 3;
            c.y_min = -yr;
            c.y_max = yr;
            t.push_back({std::string("fig3-wp-l1-") + fam, 3,
                         std::string("F^") + (fam[0] == 's' ? "ST" : "{u_x}") + ": lambda=1, g(lambda)=-5", c,
                         {reversed}});
        }
        for (auto [lambda, tag] : {std::pair{-5.0, "lm5"}, std::pair{-2.0, "lm2"}}) {
            RunConfig c = base("wp", lambda);
            c.g2 = 0;
            c.g3 = 1;
            c.family = "ux";
            c.x_min = -1;
            c.x_max = 1;
            c.y_min = -0.5;
            c.y_max = 0.5;
            std::string note = lambda == -5.0
                                   ? "panel label pairs lambda=-5 with g(lambda)=31, but g(-5) = f(5) = 499; "
                                     "this panel keeps the labelled lambda"
                                   : "panel label pairs lambda=-5 with g(lambda)=31; lambda=-2 is the value with "
                                     "g(lambda) = f(2) = 31";
            t.push_back({std::string("fig3-wp-") + tag + "-ux", 3, "F^{u_x}: lambda=-5, g(lambda)=31", c,
                         {note}});
        }
        for (auto& p : t) p.config.preset = p.name;
        return t;
    }();
    return table;
}

std::vector<const Preset*> select_presets(std::string_view prefix) {
    std::vector<const Preset*> out;
    for (const auto& p : presets()) {
        const std::string_view n = p.name;
        if (n == prefix || (n.size() > prefix.size() && n.substr(0, prefix.size()) == prefix &&
                            n[prefix.size()] == '-'))
            out.push_back(&p);
    }
    return out;
}

void write_surface_csv(std::ostream& os, const SurfaceGrid& g) {
    os << "x,y,F1,F2,F3,masked,immersive\n";
    const std::string nan = "nan";
    for (std::size_t ix = 0; ix < g.grid.xs.size(); ++ix)
        for (std::size_t iy = 0; iy < g.grid.ys.size(); ++iy) {
            const SurfaceSample& s = g.at(ix, iy);
            os << format_double(g.grid.xs[ix]) << ',' << format_double(g.grid.ys[iy]) << ',';
            if (s.masked)
                os << nan << ',' << nan << ',' << nan;
            else
                os << format_double(s.F.x1) << ',' << format_double(s.F.x2) << ',' << format_double(s.F.x3);
            os << ',' << (s.masked ? 1 : 0) << ',' << (s.immersive ? 1 : 0) << '\n';
        }
}

std::size_t write_obj(std::ostream& os, const SurfaceGrid& g) {
    const std::size_t nx = g.grid.xs.size(), ny = g.grid.ys.size();
    std::vector<long> index(nx * ny, 0);
    long next = 1;
    for (std::size_t i = 0; i < nx * ny; ++i) {
        const SurfaceSample& s = g.samples[i];
        if (s.masked || !std::isfinite(norm(s.F))) continue;
        index[i] = next++;
        os << "v " << format_double(s.F.x1) << ' ' << format_double(s.F.x2) << ' ' << format_double(s.F.x3)
           << '\n';
    }
    std::size_t faces = 0;
    auto tri = [&](std::size_t a, std::size_t b, std::size_t c) {
        if (!index[a] || !index[b] || !index[c]) return;
        os << "f " << index[a] << ' ' << index[b] << ' ' << index[c] << '\n';
        ++faces;
    };
    for (std::size_t ix = 0; ix + 1 < nx; ++ix)
        for (std::size_t iy = 0; iy + 1 < ny; ++iy) {
            const std::size_t p00 = ix * ny + iy, p01 = p00 + 1, p10 = p00 + ny, p11 = p10 + 1;
            tri(p00, p10, p11);
            tri(p00, p11, p01);
        }
    return faces;
}

void write_fff_csv(std::ostream& os, const RunConfig& c) {
    const Solution sol = make_solution(c);
    const Family family = family_of(c);
    const MetricKind metric = metric_of(c);
    const ClosedSource source = source_of(c);
    const FormVariant variant = variant_of(c);
    const Grid grid = make_grid(c);
    const Characteristic Q = family == Family::Q ? characteristic(c, sol) : Characteristic::q1();

    SurfaceBuilder sb(sol, c.lambda);
    PhaseAccumulator acc(sol, sb.spectral());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    os << "x,y,E,F,G,E_closed,F_closed,G_closed\n";
    for (double x : grid.xs)
        for (double y : grid.ys) {
            FundamentalForm n{nan, nan, nan}, cf{nan, nan, nan};
            if (!sb.masked(x)) {
                try {
                    SurfaceSample s = family == Family::ST   ? sb.sym_tafel(c.a, x, y)
                                      : family == Family::Ux ? sb.q1(c.b, x, y)
                                                             : sb.q_tangents(Q, x, y);
                    n = fff_numeric(metric, s);
                    ClosedInput in;
                    in.jet = sol.jet(x);
                    in.a = c.a;
                    in.b = c.b;
                    in.phase = acc.phase(x);
                    in.y = y;
                    in.Q = &Q;
                    cf = fff_closed(metric, family, source, variant, sol.potential(), sb.spectral(), in).form;
                } catch (const UnsupportedError&) {
                } catch (const DomainError&) {
                }
            }
            os << format_double(x) << ',' << format_double(y);
            for (int k = 0; k < 3; ++k) os << ',' << format_double(n[k]);
            for (int k = 0; k < 3; ++k) os << ',' << format_double(cf[k]);
            os << '\n';
        }
}

}  // namespace soliton::cli
