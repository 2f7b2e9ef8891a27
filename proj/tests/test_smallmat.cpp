#include "myosolve/smallmat.hpp"

#include <cmath>

#include "doctest.h"

using namespace myo;

TEST_CASE("vec3 algebra") {
  const Vec3 a{1.0, 2.0, 3.0}, b{-2.0, 0.5, 4.0};
  CHECK(dot(a, b) == doctest::Approx(11.0));
  const Vec3 c = cross(a, b);
  CHECK(dot(c, a) == doctest::Approx(0.0));
  CHECK(dot(c, b) == doctest::Approx(0.0));
  CHECK(norm(Vec3{3.0, 4.0, 0.0}) == doctest::Approx(5.0));
  CHECK(norm(normalized(b)) == doctest::Approx(1.0));
}

TEST_CASE("mat3 inverse and determinant") {
  Mat3 a = Mat3::zero();
  a(0, 0) = 2.0;
  a(0, 1) = 1.0;
  a(1, 1) = 3.0;
  a(1, 2) = -1.0;
  a(2, 0) = 0.5;
  a(2, 2) = 4.0;
  CHECK(det(a) == doctest::Approx(2.0 * (3.0 * 4.0) + 1.0 * (-1.0 * 0.5 - 4.0 * 0.0) +
                                  0.0));  // expansion along the first row
  const Mat3 id = a * inverse(a);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(id(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
}

TEST_CASE("mat3 products and invariants") {
  Mat3 a = Mat3::identity();
  a(0, 1) = 2.0;
  a(2, 0) = -1.0;
  const Mat3 at = transpose(a);
  CHECK(at(1, 0) == 2.0);
  CHECK(at(0, 2) == -1.0);
  CHECK(trace(a) == doctest::Approx(3.0));

  const Vec3 x{1.0, -1.0, 2.0};
  const Vec3 y = a * x;
  CHECK(y[0] == doctest::Approx(1.0 - 2.0));
  CHECK(y[2] == doctest::Approx(-1.0 + 2.0));

  const Mat3 o = outer(Vec3{1.0, 0.0, 2.0}, Vec3{0.0, 3.0, 0.0});
  CHECK(o(0, 1) == 3.0);
  CHECK(o(2, 1) == 6.0);
  CHECK(o(1, 1) == 0.0);

  CHECK(ddot(a, a) == doctest::Approx(frobenius(a) * frobenius(a)));
}

TEST_CASE("tensor4 contraction matches direct sums") {
  Tensor4 t{};
  Mat3 g = Mat3::zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      g(i, j) = 0.1 * (i + 1) - 0.2 * j;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) t(i, j, k, l) = i + 2 * j - k + 0.5 * l;
    }
  const Mat3 r = t.contract(g);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) s += t(i, j, k, l) * g(k, l);
      CHECK(r(i, j) == doctest::Approx(s));
    }
}
