#pragma once

#include <cmath>

namespace semeq {

/// Point in the 2-D semantic space.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

/// Dense 2x2 matrix, row-major.
struct Mat2 {
  double a00 = 0.0, a01 = 0.0;
  double a10 = 0.0, a11 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 diag(double d0, double d1) { return {d0, 0.0, 0.0, d1}; }

  Vec2 operator*(const Vec2& v) const {
    return {a00 * v.x + a01 * v.y, a10 * v.x + a11 * v.y};
  }
  Mat2 operator*(const Mat2& m) const {
    return {a00 * m.a00 + a01 * m.a10, a00 * m.a01 + a01 * m.a11,
            a10 * m.a00 + a11 * m.a10, a10 * m.a01 + a11 * m.a11};
  }
  Mat2 operator+(const Mat2& m) const {
    return {a00 + m.a00, a01 + m.a01, a10 + m.a10, a11 + m.a11};
  }
  Mat2 operator-(const Mat2& m) const {
    return {a00 - m.a00, a01 - m.a01, a10 - m.a10, a11 - m.a11};
  }
  Mat2 operator*(double s) const { return {a00 * s, a01 * s, a10 * s, a11 * s}; }
  bool operator==(const Mat2& m) const {
    return a00 == m.a00 && a01 == m.a01 && a10 == m.a10 && a11 == m.a11;
  }

  Mat2 transpose() const { return {a00, a10, a01, a11}; }
  double trace() const { return a00 + a11; }
  double det() const { return a00 * a11 - a01 * a10; }
  double frobenius() const {
    return std::sqrt(a00 * a00 + a01 * a01 + a10 * a10 + a11 * a11);
  }
  bool finite() const {
    return std::isfinite(a00) && std::isfinite(a01) && std::isfinite(a10) &&
           std::isfinite(a11);
  }
  /// Inverse; caller guarantees det != 0.
  Mat2 inverse() const {
    const double d = det();
    return {a11 / d, -a01 / d, -a10 / d, a00 / d};
  }
  /// Smaller eigenvalue of the symmetric part.
  double min_eigenvalue_sym() const {
    const double b = 0.5 * (a01 + a10);
    const double mean = 0.5 * (a00 + a11);
    const double r = std::sqrt(0.25 * (a00 - a11) * (a00 - a11) + b * b);
    return mean - r;
  }
};

}  // namespace semeq
