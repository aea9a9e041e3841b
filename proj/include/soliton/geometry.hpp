#pragma once

// First fundamental forms of the surfaces in the Euclidean and Killing
// metrics, numerically from tangents and from closed-form displays.

#include <array>
#include <string>
#include <vector>

#include "soliton/surface.hpp"

namespace soliton {

enum class MetricKind { Euclidean, Killing };

/// Euclidean: ΣXⁱYⁱ.  Killing: tr(XY) = X¹Y² + X²Y¹ + 2X³Y³.
double inner(MetricKind metric, const Sl2Element& X, const Sl2Element& Y);

/// I = E dx² + 2F dxdy + G dy².
struct FundamentalForm {
    double E = 0.0;
    double F = 0.0;
    double G = 0.0;

    double operator[](int i) const { return i == 0 ? E : (i == 1 ? F : G); }
};

FundamentalForm fff_numeric(MetricKind metric, const SurfaceSample& s);

/// Killing form computed from the un-conjugated fields A, B.
FundamentalForm fff_frame(const SurfaceSample& s);

enum class Family { ST, Ux, Q };

/// Which closed form: General is the f-independent Killing display, Jacobi and
/// Weierstrass the model-specific Killing displays (Jacobi written for sn),
/// Appendix the Euclidean displays in terms of Ψ±.
enum class ClosedSource { General, Jacobi, Weierstrass, Appendix };

/// Printed: the display as written.  Corrected: with the catalogued typos
/// repaired.  Derived: pairings of the A, B fields worked out in closed form
/// (Killing only).
enum class FormVariant { Printed, Corrected, Derived };

struct FormTerm {
    int coefficient;  // 0 = E, 1 = F, 2 = G
    std::string name;
    double value;
};

struct ClosedForm {
    FundamentalForm form;
    std::vector<FormTerm> terms;
    std::vector<std::string> notes;
};

struct ClosedInput {
    JetPoint jet;
    double a = 1.0;
    double b = 1.0;
    double phase = 0.0;  // for Ψ± in the Euclidean displays
    double y = 0.0;
    const Characteristic* Q = nullptr;
};

/// Throws UnsupportedError when the combination has no closed form.
ClosedForm fff_closed(MetricKind metric, Family family, ClosedSource source, FormVariant variant,
                      const Potential& pot, const SpectralPoint& sp, const ClosedInput& in);

/// Coefficients of a function of y at fixed x in the basis
/// Ψ+⁴, Ψ-⁴, Ψ+², Ψ-², 1 (requires g > 0).
struct PsiModes {
    std::array<double, 5> c{};
    static constexpr const char* kNames[5] = {"psi+^4", "psi-^4", "psi+^2", "psi-^2", "1"};
};

template <typename Fn>
PsiModes psi_modes(const Fn& of_y, const SpectralPoint& sp, double phase);

enum class Verdict { Match, ScaleFactor, Structural };
const char* to_string(Verdict v);

struct KnownTypo {
    Family family;
    ClosedSource source;
    MetricKind metric;
    int coefficient;
    Verdict verdict;
    const char* description;
};

const std::vector<KnownTypo>& known_typos();

struct CoefficientReport {
    int coefficient = 0;
    double max_relative = 0.0;  // relative to the largest numeric value on the grid
    Verdict verdict = Verdict::Match;
    double scale = 1.0;         // best-fit closed / numeric when ScaleFactor
    double scale_exponent = 0.0;  // power of a (or b) in the scale, from a second run
    const KnownTypo* typo = nullptr;
};

struct DiscrepancyReport {
    MetricKind metric;
    Family family;
    ClosedSource source;
    FormVariant variant;
    std::array<CoefficientReport, 3> coefficients;
    std::size_t evaluated = 0;
    std::vector<std::string> notes;

    bool all_match() const;
    /// Every non-matching coefficient has a registry entry with that verdict.
    bool explained() const;
};

struct DiscrepancyOptions {
    double lambda = 1.2;
    double a = 1.0;
    double b = 1.0;
    const Characteristic* Q = nullptr;
    double match_tolerance = 1e-6;
};

DiscrepancyReport discrepancy_report(MetricKind metric, Family family, ClosedSource source,
                                     FormVariant variant, const Solution& sol, const Grid& grid,
                                     const DiscrepancyOptions& opt = {});

std::string format_report(const DiscrepancyReport& r);

}  // namespace soliton

#include "soliton/detail/psi_modes.hpp"
