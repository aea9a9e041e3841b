#pragma once

// Run configuration, figure presets and output writers behind soliton-surf.

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "soliton/geometry.hpp"

namespace soliton::cli {

struct RunConfig {
    std::string model = "sn";  // sn | cn | dn | wp
    double k = 0.5;
    double g2 = 0.0;
    double g3 = 1.0;
    double x0 = 0.0;
    double lambda = 1.2;

    std::string family = "st";  // st | ux | combined | q1 | q2 | q3
    double a = 1.0;
    double b = 1.0;
    double gamma = 1.0;
    std::array<double, 3> s{};  // constant gauge S

    double x_min = -8.0, x_max = 8.0;
    double y_min = -8.0, y_max = 8.0;
    int nx = 81, ny = 81;

    std::string metric = "killing";   // killing | euclidean
    std::string source = "general";   // general | jacobi | weierstrass | appendix
    std::string variant = "printed";  // printed | corrected | derived
    std::string format = "csv";       // csv | obj | both
    std::string out = ".";
    std::string preset;

    bool operator==(const RunConfig&) const = default;
};

/// Keys accepted in config files and as --key flags, in canonical order.
const std::vector<std::string>& config_keys();

/// Sets one key; throws ConfigError (line 0) on an unknown key or bad value.
void set_key(RunConfig& c, std::string_view key, std::string_view value);

/// key=value lines, '#' starts a comment.  Errors carry line and column.
RunConfig parse_config(std::string_view text, RunConfig base = {});

/// Every key, one per line, in canonical order; parse_config round-trips it.
std::string to_text(const RunConfig& c);

Solution make_solution(const RunConfig& c);
Grid make_grid(const RunConfig& c);
Family family_of(const RunConfig& c);
MetricKind metric_of(const RunConfig& c);
ClosedSource source_of(const RunConfig& c);
FormVariant variant_of(const RunConfig& c);

/// Samples (st, ux, combined) or path-integrates (q1, q2, q3) the configured
/// surface.  closure receives the path-independence defect for q families.
SurfaceGrid build_surface(const RunConfig& c, double* closure = nullptr);

struct Preset {
    std::string name;
    int figure;
    std::string caption;  // panel label as printed
    RunConfig config;
    std::vector<std::string> notes;  // deviations from the panel label
};

const std::vector<Preset>& presets();

/// Panels whose name equals `prefix` or starts with `prefix` followed by '-'.
std::vector<const Preset*> select_presets(std::string_view prefix);

/// x,y,F1,F2,F3,masked,immersive with %.17g and LF line endings.  Masked rows
/// carry nan.
void write_surface_csv(std::ostream& os, const SurfaceGrid& g);

/// Unmasked grid points become vertices (x-major); each grid cell is split
/// into two triangles, and triangles touching a masked point are dropped.
/// Returns the number of faces written.
std::size_t write_obj(std::ostream& os, const SurfaceGrid& g);

/// x,y,E,F,G,E_closed,F_closed,G_closed; closed columns are nan where the
/// closed form is unavailable.
void write_fff_csv(std::ostream& os, const RunConfig& c);

std::string format_double(double v);

}  // namespace soliton::cli
