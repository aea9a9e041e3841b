#pragma once

// Characteristics Q of generalized symmetries Q∂_u of u_xx = f'(u)/2, i.e.
// solutions of D_x²Q = ½f''(u)Q on solutions, and their action on L, M and
// on the linear spectral problem.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "soliton/wavefunction.hpp"

namespace soliton {

/// Q, D_xQ and D_x²Q at a jet.
struct QValue {
    double q = 0.0;
    double dq = 0.0;
    double d2q = 0.0;
};

enum class CharacteristicKind { Q1, Q2, Q3, Custom };

class Characteristic {
public:
    using Evaluator = std::function<QValue(const Potential&, const JetPoint&)>;

    /// Q1 = u_x.
    static Characteristic q1();

    /// Q2 = u_x ∫ f^{-3/2} du along the solution.  The integral restarts at the
    /// midpoint of every interval between turning points; turning points are
    /// located on [x_lo, x_hi].
    static Characteristic q2(const Solution& sol, double x_lo = -50.0, double x_hi = 50.0);

    /// Q3 = x u_x + γu; requires f = c1 + c2 u^ℓ with ℓ = 2(1 + 1/γ).
    static Characteristic q3(const Potential& pot, double gamma);

    static Characteristic custom(std::string name, Evaluator eval);

    /// a·A + b·B.
    static Characteristic combine(double a, const Characteristic& A, double b,
                                  const Characteristic& B);

    CharacteristicKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    double gamma() const noexcept { return gamma_; }
    double c1() const noexcept { return c1_; }
    double c2() const noexcept { return c2_; }
    int ell() const noexcept { return ell_; }

    QValue eval(const Potential& pot, const JetPoint& jet) const { return eval_(pot, jet); }

private:
    CharacteristicKind kind_ = CharacteristicKind::Custom;
    std::string name_;
    Evaluator eval_;
    double gamma_ = 0.0, c1_ = 0.0, c2_ = 0.0;
    int ell_ = 0;
};

/// |D_x²Q - ½f''(u)Q|.
double determining_residual(const Characteristic& Q, const Potential& pot, const JetPoint& jet);

/// ∫ f(u)^{-3/2} u_x ds from the base point of the turning-point-free interval
/// containing x.  Throws DomainError within 0.05 (in u) of a turning point.
class Q2Integral {
public:
    Q2Integral(const Solution& sol, double x_lo, double x_hi);
    double operator()(double x) const;
    double base(double x) const;
    const std::vector<double>& turning_points() const noexcept { return turning_; }

private:
    Solution sol_;
    double x_lo_, x_hi_;
    std::vector<double> turning_;
};

inline constexpr double kTurningMargin = 0.05;

double q2_integral(const Solution& sol, double x);

enum class LaxTarget { L, M };

/// pr v_Q(target) = ∂target/∂u·Q + ∂target/∂u_x·D_xQ.
Sl2Element prolong_on_matrix(const Characteristic& Q, LaxTarget target, const Potential& pot,
                             const SpectralPoint& sp, const JetPoint& jet);

/// pr v_Q applied to D_xΦ - LΦ and ∂_yΦ - MΦ, with Φ regarded as a function
/// of (y, u, u_x) through P(u) = ∫ε du/(2(u+λ)√f).
struct DefectPair {
    CMat2 x_defect;
    CMat2 y_defect;
};

DefectPair lsp_symmetry_defect(const Characteristic& Q, const Potential& pot,
                               const SpectralPoint& sp, const JetPoint& jet, double phase,
                               double y);
DefectPair lsp_symmetry_defect(const Characteristic& Q, PhaseAccumulator& acc, double x, double y);

/// Matrices displayed for Q2 and Q3:
///   prefactor·[[-(Ψ++Ψ-), (Ψ+-Ψ-)/√g], [0, Ψ++Ψ-]]
/// with prefactor u_x/(√(u+λ)√f) (y) and u_x/(2(u+λ)^{3/2}√f) (x) for Q2,
/// c1(1+γ)/√(u+λ) and c1(1+γ)/(2(u+λ)^{3/2}) for Q3.
DefectPair printed_defect(const Characteristic& Q, const Potential& pot, const SpectralPoint& sp,
                          const JetPoint& jet, double phase, double y);

struct EntryComparison {
    std::array<double, 4> relative{};  // per entry (11, 12, 21, 22)
    double max_relative = 0.0;
    double entry21 = 0.0;  // |computed (2,1)|
};

EntryComparison compare_entries(const CMat2& computed, const CMat2& printed);

}  // namespace soliton
