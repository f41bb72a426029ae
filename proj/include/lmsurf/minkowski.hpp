#pragma once

// Vectors and linear maps of Lorentz-Minkowski 3-space, metric diag(-1, 1, 1).

#include <array>
#include <cmath>

#include "split_complex.hpp"

namespace lmsurf {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using SplitVec3 = std::array<SplitComplex, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double minkowski_inner(const Vec3& x, const Vec3& y) { return -x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; }

// The vector c with <c, w> = det[x; y; w] for every w.
inline Vec3 lorentz_cross(const Vec3& x, const Vec3& y)
{
    return {-(x[1] * y[2] - x[2] * y[1]), x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
}

inline double det3(const Vec3& a, const Vec3& b, const Vec3& c)
{
    return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
}

inline double euclidean_norm(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

inline constexpr Mat3 identity3{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
inline constexpr Mat3 eta3{{{-1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};

inline Mat3 operator*(const Mat3& a, const Mat3& b)
{
    Mat3 out{};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            for (std::size_t k = 0; k < 3; ++k) {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    return out;
}

inline Vec3 operator*(const Mat3& m, const Vec3& v)
{
    Vec3 out{};
    for (std::size_t i = 0; i < 3; ++i) {
        out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    }
    return out;
}

// Real matrices act on D^3 componentwise (they commute with j).
inline SplitVec3 operator*(const Mat3& m, const SplitVec3& v)
{
    SplitVec3 out{};
    for (std::size_t i = 0; i < 3; ++i) {
        out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    }
    return out;
}

inline Mat3 transpose(const Mat3& m)
{
    Mat3 out{};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            out[i][j] = m[j][i];
        }
    }
    return out;
}

inline double determinant(const Mat3& m) { return det3(m[0], m[1], m[2]); }

// max |M^T eta M - eta|
inline double metric_defect(const Mat3& m)
{
    const Mat3 g = transpose(m) * eta3 * m;
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            worst = std::max(worst, std::abs(g[i][j] - eta3[i][j]));
        }
    }
    return worst;
}

inline Vec3 real_part(const SplitVec3& v) { return {v[0].re(), v[1].re(), v[2].re()}; }
inline Vec3 imag_part(const SplitVec3& v) { return {v[0].im(), v[1].im(), v[2].im()}; }

// -phi1^2 + phi2^2 + phi3^2 as a double number.
inline SplitComplex isotropy_defect(const SplitVec3& phi) { return -phi[0] * phi[0] + phi[1] * phi[1] + phi[2] * phi[2]; }

} // namespace lmsurf
