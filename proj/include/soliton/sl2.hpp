#pragma once

// 2x2 matrices and sl(2) elements in the basis
//   e1 = [[0,0],[1,0]],  e2 = [[0,1],[0,0]],  e3 = [[1,0],[0,-1]].

#include <array>
#include <cmath>
#include <complex>
#include <type_traits>

namespace soliton {

using Complex = std::complex<double>;

template <typename T>
struct Mat2 {
    T a11{}, a12{}, a21{}, a22{};

    static Mat2 identity() { return {T(1), T(0), T(0), T(1)}; }

    T det() const { return a11 * a22 - a12 * a21; }
    T trace() const { return a11 + a22; }

    /// Inverse of a unimodular matrix is the adjugate; general inverse divides by det.
    Mat2 inverse() const {
        const T d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
    Mat2 adjugate() const { return {a22, -a12, -a21, a11}; }

    Mat2& operator+=(const Mat2& o) {
        a11 += o.a11; a12 += o.a12; a21 += o.a21; a22 += o.a22;
        return *this;
    }
    Mat2& operator-=(const Mat2& o) {
        a11 -= o.a11; a12 -= o.a12; a21 -= o.a21; a22 -= o.a22;
        return *this;
    }
    Mat2& operator*=(T s) {
        a11 *= s; a12 *= s; a21 *= s; a22 *= s;
        return *this;
    }
    friend Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
    friend Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
    friend Mat2 operator*(Mat2 a, T s) { return a *= s; }
    friend Mat2 operator*(T s, Mat2 a) { return a *= s; }
    friend Mat2 operator*(const Mat2& a, const Mat2& b) {
        return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
                a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
    }
    friend Mat2 operator-(const Mat2& a) { return {-a.a11, -a.a12, -a.a21, -a.a22}; }
};

using RMat2 = Mat2<double>;
using CMat2 = Mat2<Complex>;

inline double abs2(double v) { return v * v; }
inline double abs2(const Complex& v) { return std::norm(v); }

template <typename T>
double frobenius(const Mat2<T>& m) {
    return std::sqrt(abs2(m.a11) + abs2(m.a12) + abs2(m.a21) + abs2(m.a22));
}

inline CMat2 to_complex(const RMat2& m) { return {m.a11, m.a12, m.a21, m.a22}; }

/// Largest |Im| over entries.
inline double max_imag(const CMat2& m) {
    return std::max({std::abs(m.a11.imag()), std::abs(m.a12.imag()), std::abs(m.a21.imag()),
                     std::abs(m.a22.imag())});
}
inline double max_abs(const CMat2& m) {
    return std::max({std::abs(m.a11), std::abs(m.a12), std::abs(m.a21), std::abs(m.a22)});
}
inline RMat2 real_part(const CMat2& m) {
    return {m.a11.real(), m.a12.real(), m.a21.real(), m.a22.real()};
}

/// Element X = x1 e1 + x2 e2 + x3 e3 of sl(2).
template <typename T>
struct BasicSl2 {
    T x1{}, x2{}, x3{};

    static BasicSl2 e1() { return {T(1), T(0), T(0)}; }
    static BasicSl2 e2() { return {T(0), T(1), T(0)}; }
    static BasicSl2 e3() { return {T(0), T(0), T(1)}; }

    Mat2<T> matrix() const { return {x3, x2, x1, -x3}; }

    /// Projects onto sl(2); the trace part of m is dropped.
    static BasicSl2 from_matrix(const Mat2<T>& m) {
        return {m.a21, m.a12, (m.a11 - m.a22) / T(2)};
    }

    std::array<T, 3> components() const { return {x1, x2, x3}; }

    BasicSl2& operator+=(const BasicSl2& o) {
        x1 += o.x1; x2 += o.x2; x3 += o.x3;
        return *this;
    }
    BasicSl2& operator-=(const BasicSl2& o) {
        x1 -= o.x1; x2 -= o.x2; x3 -= o.x3;
        return *this;
    }
    BasicSl2& operator*=(T s) {
        x1 *= s; x2 *= s; x3 *= s;
        return *this;
    }
    friend BasicSl2 operator+(BasicSl2 a, const BasicSl2& b) { return a += b; }
    friend BasicSl2 operator-(BasicSl2 a, const BasicSl2& b) { return a -= b; }
    friend BasicSl2 operator*(BasicSl2 a, T s) { return a *= s; }
    friend BasicSl2 operator*(T s, BasicSl2 a) { return a *= s; }
    friend BasicSl2 operator-(const BasicSl2& a) { return {-a.x1, -a.x2, -a.x3}; }
};

using Sl2Element = BasicSl2<double>;
using CSl2 = BasicSl2<Complex>;

/// [X,Y] from the structure constants [e2,e1]=e3, [e3,e1]=-2e1, [e3,e2]=2e2.
template <typename T>
BasicSl2<T> bracket(const BasicSl2<T>& X, const BasicSl2<T>& Y) {
    return {T(2) * (X.x1 * Y.x3 - X.x3 * Y.x1), T(2) * (X.x3 * Y.x2 - X.x2 * Y.x3),
            X.x2 * Y.x1 - X.x1 * Y.x2};
}

/// XY - YX on plain matrices; independent of the basis formula above.
template <typename T>
Mat2<T> commutator(const Mat2<T>& X, const Mat2<T>& Y) {
    return X * Y - Y * X;
}

template <typename T>
double norm(const BasicSl2<T>& X) {
    return std::sqrt(abs2(X.x1) + abs2(X.x2) + abs2(X.x3));
}

inline CSl2 to_complex(const Sl2Element& X) { return {X.x1, X.x2, X.x3}; }

/// Φ^{-1} X Φ for det Φ = 1 (adjugate used as the inverse).
template <typename T>
BasicSl2<T> conjugate_by(const Mat2<T>& phi, const BasicSl2<T>& X) {
    return BasicSl2<T>::from_matrix(phi.adjugate() * X.matrix() * phi);
}

}  // namespace soliton
