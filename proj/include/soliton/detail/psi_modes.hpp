#pragma once

#include <cmath>

#include "soliton/errors.hpp"

namespace soliton {

template <typename Fn>
PsiModes psi_modes(const Fn& of_y, const SpectralPoint& sp, double phase) {
    if (sp.g <= 0.0) throw DomainError("Psi mode decomposition needs g > 0");
    const double r = std::sqrt(sp.g);
    constexpr double ts[5] = {-0.5, -0.25, 0.0, 0.25, 0.5};
    double A[5][6];
    for (int i = 0; i < 5; ++i) {
        const double t = ts[i];
        const double row[5] = {std::exp(4 * t), std::exp(-4 * t), std::exp(2 * t), std::exp(-2 * t), 1.0};
        for (int j = 0; j < 5; ++j) A[i][j] = row[j];
        A[i][5] = of_y(t / r - phase);
    }
    for (int c = 0; c < 5; ++c) {
        int p = c;
        for (int i = c + 1; i < 5; ++i)
            if (std::abs(A[i][c]) > std::abs(A[p][c])) p = i;
        for (int j = 0; j < 6; ++j) std::swap(A[c][j], A[p][j]);
        for (int i = 0; i < 5; ++i) {
            if (i == c) continue;
            const double m = A[i][c] / A[c][c];
            for (int j = c; j < 6; ++j) A[i][j] -= m * A[c][j];
        }
    }
    PsiModes out;
    for (int i = 0; i < 5; ++i) out.c[i] = A[i][5] / A[i][i];
    return out;
}

}  // namespace soliton
