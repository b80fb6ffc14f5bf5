#pragma once

#include <array>
#include <cmath>
#include <cstddef>

// Small fixed-size 2D tensor algebra used throughout the solver.
// The spatial dimension is carried as kDim so the call sites stay
// dimension-agnostic even though only d = 2 is instantiated.

namespace porofem {

inline constexpr int kDim = 2;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    double &operator[](int i) { return i == 0 ? x : y; }
    double operator[](int i) const { return i == 0 ? x : y; }

    Vec2 &operator+=(const Vec2 &o) { x += o.x; y += o.y; return *this; }
    Vec2 &operator-=(const Vec2 &o) { x -= o.x; y -= o.y; return *this; }
    Vec2 &operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2 &b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2 &b) { return a -= b; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline Vec2 operator-(const Vec2 &a) { return {-a.x, -a.y}; }

inline double dot(const Vec2 &a, const Vec2 &b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2 &a, const Vec2 &b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2 &a) { return std::sqrt(dot(a, a)); }
// Counter-clockwise quarter turn.
inline Vec2 perp(const Vec2 &a) { return {-a.y, a.x}; }

struct Mat2 {
    // m[i][j], row i, column j.
    std::array<std::array<double, 2>, 2> m{{{0.0, 0.0}, {0.0, 0.0}}};

    static Mat2 identity() { return {{{{1.0, 0.0}, {0.0, 1.0}}}}; }
    static Mat2 zero() { return {}; }
    static Mat2 diag(double a, double b) { return {{{{a, 0.0}, {0.0, b}}}}; }
    // Outer product a b^T.
    static Mat2 outer(const Vec2 &a, const Vec2 &b) {
        return {{{{a.x * b.x, a.x * b.y}, {a.y * b.x, a.y * b.y}}}};
    }
    static Mat2 rotation(double theta) {
        const double c = std::cos(theta), s = std::sin(theta);
        return {{{{c, -s}, {s, c}}}};
    }

    std::array<double, 2> &operator[](int i) { return m[i]; }
    const std::array<double, 2> &operator[](int i) const { return m[i]; }

    double operator()(int i, int j) const { return m[i][j]; }
    double &operator()(int i, int j) { return m[i][j]; }

    Mat2 &operator+=(const Mat2 &o) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m[i][j] += o.m[i][j];
        return *this;
    }
    Mat2 &operator-=(const Mat2 &o) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m[i][j] -= o.m[i][j];
        return *this;
    }
    Mat2 &operator*=(double s) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m[i][j] *= s;
        return *this;
    }
};

inline Mat2 operator+(Mat2 a, const Mat2 &b) { return a += b; }
inline Mat2 operator-(Mat2 a, const Mat2 &b) { return a -= b; }
inline Mat2 operator*(double s, Mat2 a) { return a *= s; }
inline Mat2 operator*(Mat2 a, double s) { return a *= s; }
inline Mat2 operator-(const Mat2 &a) { return Mat2{} - a; }

inline Mat2 operator*(const Mat2 &a, const Mat2 &b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return r;
}

inline Vec2 operator*(const Mat2 &a, const Vec2 &v) {
    return {a[0][0] * v.x + a[0][1] * v.y, a[1][0] * v.x + a[1][1] * v.y};
}

inline Mat2 transpose(const Mat2 &a) {
    return {{{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}}};
}

inline double trace(const Mat2 &a) { return a[0][0] + a[1][1]; }
inline double det(const Mat2 &a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

inline Mat2 sym(const Mat2 &a) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = 0.5 * (a[i][j] + a[j][i]);
    return r;
}

// Frobenius inner product A : B.
inline double ddot(const Mat2 &a, const Mat2 &b) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s += a[i][j] * b[i][j];
    return s;
}

inline double frobenius_norm(const Mat2 &a) { return std::sqrt(ddot(a, a)); }

// Inverse without singularity guard; callers that need the guard check det first.
inline Mat2 inverse(const Mat2 &a) {
    const double d = det(a);
    return {{{{a[1][1] / d, -a[0][1] / d}, {-a[1][0] / d, a[0][0] / d}}}};
}

// Constant fourth-order tensor C[i][j][k][l] acting on 2x2 matrices,
// (C : H)_ij = sum_kl C_ijkl H_kl.  Used for the frozen mechanics tangent
// of the L-schemes.
struct Tensor4 {
    std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2> c{};

    Mat2 apply(const Mat2 &h) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double s = 0.0;
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) s += c[i][j][k][l] * h[k][l];
                r[i][j] = s;
            }
        return r;
    }

    Tensor4 &operator+=(const Tensor4 &o) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) c[i][j][k][l] += o.c[i][j][k][l];
        return *this;
    }

    // C : H = two_mu * sym(H) + vol * tr(H) I, the isotropic small-strain tangent.
    static Tensor4 isotropic(double two_mu, double vol) {
        Tensor4 t;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) {
                        double v = 0.0;
                        if (i == k && j == l) v += 0.5 * two_mu;
                        if (i == l && j == k) v += 0.5 * two_mu;
                        if (i == j && k == l) v += vol;
                        t.c[i][j][k][l] = v;
                    }
        return t;
    }

    // Materialize a linear map H -> L(H) by applying it to the 4 basis matrices.
    template <class F>
    static Tensor4 from_linear_map(F &&map) {
        Tensor4 t;
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
                Mat2 e;
                e[k][l] = 1.0;
                const Mat2 img = map(e);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) t.c[i][j][k][l] = img[i][j];
            }
        return t;
    }
};

}  // namespace porofem
