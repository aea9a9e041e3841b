// soliton-surf: verification suites, surface meshes, fundamental-form dumps
// and special-function tables.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "soliton/cli.hpp"
#include "soliton/elliptic.hpp"
#include "soliton/errors.hpp"
#include "soliton/quadrature.hpp"

using namespace soliton;
using namespace soliton::cli;
using json = nlohmann::ordered_json;

namespace {

constexpr int kPass = 0;
constexpr int kBreach = 1;
constexpr int kUsage = 2;

struct Suite {
    std::string name;
    bool pass = true;
    json metrics = json::object();
    std::vector<std::string> lines{};

    void check(const std::string& what, double value, double limit) {
        const bool ok = value < limit;
        pass = pass && ok;
        char buf[160];
        std::snprintf(buf, sizeof buf, "  %-34s %.3e  (< %.0e)  %s", what.c_str(), value, limit,
                      ok ? "ok" : "FAIL");
        lines.push_back(buf);
        metrics[what] = value;
    }
    void info(const std::string& line) { lines.push_back("  " + line); }
};

// --- verify suites ---------------------------------------------------------

Suite verify_lax(const RunConfig& c) {
    Suite s{"lax"};
    const Solution sol = make_solution(c);
    const auto sp = SpectralPoint::at(sol.potential(), c.lambda);
    const ResidualStats st = lax_residual_grid(sol, sp, linspace(c.x_min, c.x_max, 200));
    s.check("max |D_xM + [M,L]|", st.max, 1e-9);
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean %.3e  argmax x=%.6g  evaluated %zu  masked %zu", st.mean, st.argmax,
                  st.evaluated, st.masked);
    s.info(buf);
    s.metrics["mean"] = st.mean;
    s.metrics["argmax"] = st.argmax;
    s.metrics["evaluated"] = st.evaluated;
    s.metrics["masked"] = st.masked;
    return s;
}

Suite verify_lsp(const RunConfig& c, const std::string& csv) {
    Suite s{"lsp"};
    const Solution sol = make_solution(c);
    const auto sp = SpectralPoint::at(sol.potential(), c.lambda);
    const LspReport r = lsp_residual(sol, sp, linspace(c.x_min, c.x_max, 50), linspace(c.y_min, c.y_max, 50));
    for (int i = 0; i < 4; ++i) s.check("de" + std::to_string(i + 1), r.max_de[i], 1e-9);
    s.check("|det Phi - 1|", r.max_det, 1e-10);
    s.check("x-LSP finite difference", r.max_fd_x, 1e-7);
    s.info("evaluated " + std::to_string(r.evaluated) + "  masked " + std::to_string(r.masked));
    if (!csv.empty()) {
        std::ofstream os(csv, std::ios::binary);
        write_lsp_csv(os, r);
    }
    return s;
}

Suite verify_symmetry(const RunConfig& c, int q) {
    Suite s{"symmetry q" + std::to_string(q)};
    const Solution sol = make_solution(c);
    const Potential& pot = sol.potential();
    const Characteristic Q = q == 1   ? Characteristic::q1()
                             : q == 2 ? Characteristic::q2(sol, c.x_min - 1, c.x_max + 1)
                                      : Characteristic::q3(pot, c.gamma);
    const auto sp = SpectralPoint::at(pot, c.lambda);
    PhaseAccumulator acc(sol, sp);
    double det = 0, defect = 0, printed = 0, e21 = 0;
    std::array<double, 4> entries{};
    std::size_t n = 0, skipped = 0;
    for (double x : linspace(c.x_min, c.x_max, c.nx)) {
        try {
            const JetPoint j = sol.jet(x);
            if (std::abs(j.u + c.lambda) < kStripHalfWidth) {
                ++skipped;
                continue;
            }
            det = std::max(det, determining_residual(Q, pot, j));
            for (double y : {c.y_min, 0.5 * (c.y_min + c.y_max), c.y_max}) {
                const DefectPair d = lsp_symmetry_defect(Q, acc, x, y);
                if (q == 1) {
                    defect = std::max({defect, max_abs(d.x_defect), max_abs(d.y_defect)});
                } else {
                    const DefectPair p = printed_defect(Q, pot, sp, j, acc.phase(x), y);
                    for (const auto& [got, want] : {std::pair{d.y_defect, p.y_defect}, {d.x_defect, p.x_defect}}) {
                        const EntryComparison e = compare_entries(got, want);
                        printed = std::max(printed, e.max_relative);
                        e21 = std::max(e21, e.entry21);
                        for (int i = 0; i < 4; ++i) entries[i] = std::max(entries[i], e.relative[i]);
                    }
                }
            }
            ++n;
        } catch (const DomainError&) {
            ++skipped;
        }
    }
    s.check("determining equation", det, 1e-8);
    if (q == 1) {
        s.check("LSP defect", defect, 1e-9);
    } else {
        s.check("defect vs displayed pattern", printed, 1e-8);
        s.check("defect entry (2,1)", e21, 1e-10);
        char buf[160];
        std::snprintf(buf, sizeof buf, "per entry: (1,1) %.2e  (1,2) %.2e  (2,1) %.2e  (2,2) %.2e", entries[0],
                      entries[1], entries[2], entries[3]);
        s.info(buf);
    }
    s.info("evaluated " + std::to_string(n) + "  skipped " + std::to_string(skipped));
    return s;
}

Suite verify_compat(const RunConfig& c) {
    Suite s{"compat"};
    const Solution sol = make_solution(c);
    const Grid g{linspace(c.x_min, c.x_max, std::min(c.nx, 25)), linspace(c.y_min, c.y_max, std::min(c.ny, 9))};
    const Potential& pot = sol.potential();
    Sl2Element S{c.s[0], c.s[1], c.s[2]};
    if (norm(S) == 0) S = {0, 0, 1};
    const auto st = sym_tafel_fields(pot, c.lambda);
    const auto q1 = q1_fields(pot, c.lambda);
    const auto ga = gauge_fields(pot, c.lambda, GaugeField::constant(S));
    s.check("Sym-Tafel A,B", ab_compatibility_residual(st.A, st.B, sol, c.lambda, g), 1e-6);
    s.check("gauge A,B", ab_compatibility_residual(ga.A, ga.B, sol, c.lambda, g), 1e-6);
    s.check("u_x A,B", ab_compatibility_residual(q1.A, q1.B, sol, c.lambda, g), 1e-6);

    // integrated F^{u_x} against Phi^-1 L Phi, both measured from the first grid point
    IntegrationOptions io;
    const double h = std::max((c.x_max - c.x_min) / (g.xs.size() - 1), (c.y_max - c.y_min) / (g.ys.size() - 1));
    io.substeps = std::max(2, static_cast<int>(std::ceil(h / 0.02)));
    const auto I = integrate_surface(Characteristic::q1(), sol, c.lambda, g, io);
    SurfaceBuilder sb(sol, c.lambda);
    const Sl2Element F0 = sb.q1(1.0, g.xs[0], g.ys[0]).F;
    double worst = 0;
    for (std::size_t ix = 0; ix < g.xs.size(); ++ix)
        for (std::size_t iy = 0; iy < g.ys.size(); ++iy) {
            const Sl2Element F = sb.q1(1.0, g.xs[ix], g.ys[iy]).F - F0;
            worst = std::max(worst, norm(I.surface.at(ix, iy).F - F) / std::max(1.0, norm(F)));
        }
    s.check("integrated u_x surface", worst, 1e-6);
    s.metrics["closure"] = I.closure;
    return s;
}

Suite verify_fff(const RunConfig& c) {
    Suite s{"fff"};
    const Solution sol = make_solution(c);
    DiscrepancyOptions o;
    o.lambda = c.lambda;
    o.a = c.a;
    o.b = c.b;
    const Family family = family_of(c);
    std::optional<Characteristic> Q;
    if (family == Family::Q) {
        Q = c.family == "q2" ? Characteristic::q2(sol, c.x_min - 1, c.x_max + 1)
                             : Characteristic::q3(sol.potential(), c.gamma);
        o.Q = &*Q;
    }
    const auto r = discrepancy_report(metric_of(c), family, source_of(c), variant_of(c), sol, make_grid(c), o);
    std::istringstream is(format_report(r));
    for (std::string line; std::getline(is, line);) s.lines.push_back("  " + line);
    s.pass = r.explained() && r.evaluated > 0;
    s.metrics["evaluated"] = r.evaluated;
    s.metrics["all_match"] = r.all_match();
    s.metrics["explained"] = r.explained();
    for (const auto& cr : r.coefficients) {
        json e = {{"verdict", to_string(cr.verdict)}, {"max_relative", cr.max_relative}};
        if (cr.verdict == Verdict::ScaleFactor) {
            e["scale"] = cr.scale;
            e["scale_exponent"] = cr.scale_exponent;
        }
        if (cr.typo) e["known_typo"] = cr.typo->description;
        s.metrics[std::string(1, "EFG"[cr.coefficient])] = e;
    }
    return s;
}

int report(const Suite& s, const std::string& json_path) {
    std::cout << s.name << ": " << (s.pass ? "PASS" : "FAIL") << '\n';
    for (const auto& l : s.lines) std::cout << l << '\n';
    if (!json_path.empty()) {
        json j = {{"suite", s.name}, {"pass", s.pass}, {"metrics", s.metrics}};
        std::ofstream os(json_path, std::ios::binary);
        os << j.dump(2) << '\n';
    }
    return s.pass ? kPass : kBreach;
}

// --- surface ---------------------------------------------------------------

int run_surface(const std::vector<Preset>& panels) {
    bool failed = false;
    for (const Preset& p : panels) {
        const RunConfig& c = p.config;
        double closure = 0;
        const SurfaceGrid g = build_surface(c, &closure);
        if (g.masked() == g.samples.size()) throw DomainError(p.name + ": every grid point is masked");
        std::size_t nonfinite = 0;
        double imag = 0;
        for (const auto& s : g.samples) {
            if (s.masked) continue;
            if (!std::isfinite(norm(s.F))) ++nonfinite;
            imag = std::max(imag, s.imag);
        }
        std::filesystem::create_directories(c.out);
        const std::filesystem::path base = std::filesystem::path(c.out) / p.name;
        std::size_t faces = 0;
        if (c.format != "obj") {
            std::ofstream os(base.string() + ".csv", std::ios::binary);
            write_surface_csv(os, g);
        }
        if (c.format != "csv") {
            std::ofstream os(base.string() + ".obj", std::ios::binary);
            os << "# " << p.name << ": vertices (F1,F2,F3) in the basis e1,e2,e3\n";
            faces = write_obj(os, g);
        }
        json meta = {{"name", p.name}, {"figure", p.figure}, {"caption", p.caption}, {"notes", p.notes},
                     {"points", g.samples.size()}, {"masked", g.masked()}, {"nonfinite", nonfinite},
                     {"faces", faces}, {"max_imaginary", imag}, {"closure", closure}};
        json cfg = json::object();
        std::istringstream is(to_text(c));
        for (std::string line; std::getline(is, line);) {
            const auto eq = line.find('=');
            cfg[line.substr(0, eq)] = line.substr(eq + 1);
        }
        meta["config"] = cfg;
        std::ofstream(base.string() + ".json", std::ios::binary) << meta.dump(2) << '\n';
        std::printf("%s: %zu points, %zu masked, %zu non-finite -> %s.*\n", p.name.c_str(), g.samples.size(),
                    g.masked(), nonfinite, base.string().c_str());
        failed = failed || nonfinite > 0;
    }
    return failed ? kBreach : kPass;
}

// --- elliptic --------------------------------------------------------------

std::vector<double> parse_range(const std::string& spec) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) {
        std::size_t used = 0;
        parts.push_back(std::stod(item, &used));
        if (used != item.size()) throw CLI::ValidationError("--x", "bad number '" + item + "'");
    }
    if (parts.size() == 1) return parts;
    if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0])
        throw CLI::ValidationError("--x", "expected a value or start:stop:step");
    std::vector<double> xs;
    const auto n = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long i = 0; i <= n; ++i) xs.push_back(parts[0] + i * parts[2]);
    return xs;
}

struct EllipticArgs {
    std::string fn;
    std::string x = "0";
    double k = 0.5, g2 = 0, g3 = 1, u = 0.5, alpha2 = 0.25, y = 1, z = 2, p = 3;
};

int run_elliptic(const EllipticArgs& a) {
    using namespace soliton::elliptic;
    auto out = [](std::initializer_list<double> v) {
        bool first = true;
        for (double d : v) {
            std::cout << (first ? "" : "\t") << format_double(d);
            first = false;
        }
        std::cout << '\n';
    };
    if (a.fn == "sn" || a.fn == "cn" || a.fn == "dn") {
        std::cout << "x\t" << a.fn << '\n';
        for (double x : parse_range(a.x)) {
            const auto t = jacobi_sn_cn_dn(x, a.k);
            out({x, a.fn == "sn" ? t.sn : a.fn == "cn" ? t.cn : t.dn});
        }
    } else if (a.fn == "wp") {
        const auto inv = WeierstrassInvariants::from(a.g2, a.g3);
        std::cout << "x\twp\twp_prime\tode_residual\n";
        for (double x : parse_range(a.x)) {
            const auto w = weierstrass_p(x, inv);
            const double res = std::abs(w.p_prime * w.p_prime - (4 * w.p * w.p * w.p - a.g2 * w.p - a.g3)) /
                               std::max(1.0, w.p_prime * w.p_prime);
            out({x, w.p, w.p_prime, res});
        }
    } else if (a.fn == "ellint_pi") {
        const double v = ellint_pi(a.u, a.alpha2, a.k);
        // Π as ∫_0^{asin u} dθ / ((1 - α² sin²θ) √(1 - k² sin²θ))
        auto f = [&](double t) {
            const double s = std::sin(t);
            return 1.0 / ((1 - a.alpha2 * s * s) * std::sqrt(1 - a.k * a.k * s * s));
        };
        const double q = quad::integrate(f, 0.0, std::asin(a.u)).value;
        std::cout << "u\talpha2\tk\tellint_pi\tquadrature_delta\n";
        out({a.u, a.alpha2, a.k, v, v - q});
    } else if (a.fn == "rf") {
        const double x = parse_range(a.x).at(0);
        std::cout << "x\ty\tz\trf\n";
        out({x, a.y, a.z, carlson_rf(x, a.y, a.z)});
    } else {
        const double x = parse_range(a.x).at(0);
        std::cout << "x\ty\tz\tp\trj\n";
        out({x, a.y, a.z, a.p, carlson_rj(x, a.y, a.z, a.p)});
    }
    return kPass;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open '" + path + "'", 0, 0);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Soliton surfaces in sl(2) from Lax pairs of u_xx = f'(u)/2"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, preset, json_path;
    app.add_option("--config", config_path, "key=value file; command-line flags override it");
    app.add_option("--preset", preset, "figure preset or preset prefix (fig1, fig2, fig3, fig1-sn-k05, ...)");
    std::map<std::string, std::string> flags;
    for (const auto& key : config_keys()) {
        if (key == "preset") continue;
        app.add_option("--" + key, flags[key], "config key '" + key + "'");
    }

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->require_subcommand(1);
    verify->add_option("--json", json_path, "write a machine-readable summary");
    auto* v_lax = verify->add_subcommand("lax", "Lax equation residual on 200 points");
    auto* v_lsp = verify->add_subcommand("lsp", "linear spectral problem residuals on a 50x50 grid");
    std::string lsp_csv;
    v_lsp->add_option("--csv", lsp_csv, "write per-point residuals");
    auto* v_sym = verify->add_subcommand("symmetry", "determining equation and LSP defects");
    int q = 1;
    v_sym->add_option("--q", q, "characteristic")->check(CLI::IsMember({1, 2, 3}))->required();
    auto* v_compat = verify->add_subcommand("compat", "compatibility of the tangent fields");
    auto* v_fff = verify->add_subcommand("fff", "closed-form first fundamental forms against numeric ones");

    auto* surface = app.add_subcommand("surface", "write surface meshes (CSV, OBJ) with metadata");

    auto* fff = app.add_subcommand("fff", "dump E, F, G and their closed forms as CSV");
    std::string fff_out;
    fff->add_option("-o,--output", fff_out, "output file (default stdout)");

    auto* ell = app.add_subcommand("elliptic", "evaluate special functions");
    EllipticArgs ea;
    ell->add_option("function", ea.fn, "sn, cn, dn, wp, ellint_pi, rf, rj")
        ->required()
        ->check(CLI::IsMember({"sn", "cn", "dn", "wp", "ellint_pi", "rf", "rj"}));
    ell->add_option("--x", ea.x, "value or start:stop:step");
    ell->add_option("--k", ea.k);
    ell->add_option("--g2", ea.g2);
    ell->add_option("--g3", ea.g3);
    ell->add_option("--u", ea.u);
    ell->add_option("--alpha2", ea.alpha2);
    ell->add_option("--y", ea.y);
    ell->add_option("--z", ea.z);
    ell->add_option("--p", ea.p);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kUsage;
    }

    try {
        if (ell->parsed()) return run_elliptic(ea);

        // defaults, then preset, then config file, then flags
        std::vector<Preset> panels;
        if (!preset.empty()) {
            for (const Preset* p : select_presets(preset)) panels.push_back(*p);
            if (panels.empty()) throw ConfigError("unknown preset '" + preset + "'", 0, 0);
        } else {
            panels.push_back({"surface", 0, "", RunConfig{}, {}});
        }
        const std::string file = config_path.empty() ? "" : read_file(config_path);
        for (Preset& p : panels) {
            if (!file.empty()) p.config = parse_config(file, p.config);
            for (const auto& key : config_keys())
                if (key != "preset" && app.count("--" + key) > 0) {
                    try {
                        set_key(p.config, key, flags[key]);
                    } catch (const ConfigError& e) {
                        throw ConfigError("--" + key + ": " + e.what(), 0, 0);
                    }
                }
        }
        const RunConfig& c = panels.front().config;

        if (verify->parsed()) {
            if (v_lax->parsed()) return report(verify_lax(c), json_path);
            if (v_lsp->parsed()) return report(verify_lsp(c, lsp_csv), json_path);
            if (v_sym->parsed()) return report(verify_symmetry(c, q), json_path);
            if (v_compat->parsed()) return report(verify_compat(c), json_path);
            if (v_fff->parsed()) return report(verify_fff(c), json_path);
        }
        if (surface->parsed()) return run_surface(panels);
        if (fff->parsed()) {
            if (fff_out.empty()) {
                write_fff_csv(std::cout, c);
            } else {
                std::ofstream os(fff_out, std::ios::binary);
                write_fff_csv(os, c);
            }
            return kPass;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return kUsage;
    } catch (const UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBreach;
    }
    return kUsage;
}
