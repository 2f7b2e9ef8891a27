#pragma once

#include <array>
#include <cmath>

namespace myo {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  return {a[0] / n, a[1] / n, a[2] / n};
}

/// Dense 3x3 matrix, row major.
struct Mat3 {
  std::array<double, 9> a{};

  double& operator()(int i, int j) { return a[3 * i + j]; }
  double operator()(int i, int j) const { return a[3 * i + j]; }

  static Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }
  static Mat3 zero() { return Mat3{}; }
};

inline Mat3 operator+(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}
inline Mat3 operator-(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}
inline Mat3 operator*(double s, const Mat3& x) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = s * x.a[i];
  return r;
}
inline Mat3 operator*(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      double v = x(i, k);
      for (int j = 0; j < 3; ++j) r(i, j) += v * y(k, j);
    }
  return r;
}
inline Vec3 operator*(const Mat3& x, const Vec3& v) {
  Vec3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i] += x(i, j) * v[j];
  return r;
}

inline Mat3 transpose(const Mat3& x) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = x(j, i);
  return r;
}
inline double trace(const Mat3& x) { return x(0, 0) + x(1, 1) + x(2, 2); }
inline double det(const Mat3& x) {
  return x(0, 0) * (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) -
         x(0, 1) * (x(1, 0) * x(2, 2) - x(1, 2) * x(2, 0)) +
         x(0, 2) * (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0));
}
inline Mat3 inverse(const Mat3& x) {
  double d = det(x);
  Mat3 r;
  r(0, 0) = (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) / d;
  r(0, 1) = (x(0, 2) * x(2, 1) - x(0, 1) * x(2, 2)) / d;
  r(0, 2) = (x(0, 1) * x(1, 2) - x(0, 2) * x(1, 1)) / d;
  r(1, 0) = (x(1, 2) * x(2, 0) - x(1, 0) * x(2, 2)) / d;
  r(1, 1) = (x(0, 0) * x(2, 2) - x(0, 2) * x(2, 0)) / d;
  r(1, 2) = (x(0, 2) * x(1, 0) - x(0, 0) * x(1, 2)) / d;
  r(2, 0) = (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0)) / d;
  r(2, 1) = (x(0, 1) * x(2, 0) - x(0, 0) * x(2, 1)) / d;
  r(2, 2) = (x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0)) / d;
  return r;
}
inline Mat3 outer(const Vec3& u, const Vec3& v) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = u[i] * v[j];
  return r;
}
inline Mat3 sym(const Mat3& x) { return 0.5 * (x + transpose(x)); }
inline double ddot(const Mat3& x, const Mat3& y) {
  double s = 0.0;
  for (int i = 0; i < 9; ++i) s += x.a[i] * y.a[i];
  return s;
}
inline double frobenius(const Mat3& x) { return std::sqrt(ddot(x, x)); }

/// Fourth order tensor A(i,j,k,l) = dP_ij/dF_kl, dense 81 doubles.
struct Tensor4 {
  std::array<double, 81> a{};

  double& operator()(int i, int j, int k, int l) { return a[27 * i + 9 * j + 3 * k + l]; }
  double operator()(int i, int j, int k, int l) const { return a[27 * i + 9 * j + 3 * k + l]; }

  /// Contraction over the last two indices: (A : G)_ij = A(i,j,k,l) G(k,l).
  Mat3 contract(const Mat3& g) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        const double* p = a.data() + 27 * i + 9 * j;
        for (int t = 0; t < 9; ++t) s += p[t] * g.a[t];
        r(i, j) = s;
      }
    return r;
  }
};

}  // namespace myo
