#pragma once

// Small value types for the flat 2-torus [0, 2π)².

#include <array>
#include <cmath>
#include <compare>
#include <numbers>

namespace svlab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : y; }
  constexpr double& operator[](int i) { return i == 0 ? x : y; }

  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }

/// 2×2 real matrix. For a vector field f, the Jacobian is stored as
/// J(i, j) = ∂_j f_i, so that J * v is the directional derivative ∇_v f.
struct Mat2 {
  std::array<std::array<double, 2>, 2> m{};

  constexpr double operator()(int i, int j) const { return m[i][j]; }
  constexpr double& operator()(int i, int j) { return m[i][j]; }

  constexpr Vec2 operator*(Vec2 v) const {
    return {m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y};
  }
  constexpr double trace() const { return m[0][0] + m[1][1]; }
  constexpr double frobenius2() const {
    return m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1];
  }
  /// Largest eigenvalue of the symmetric part.
  double max_symmetric_eigenvalue() const {
    const double a = m[0][0];
    const double c = m[1][1];
    const double b = 0.5 * (m[0][1] + m[1][0]);
    const double half_diff = 0.5 * (a - c);
    return 0.5 * (a + c) + std::sqrt(half_diff * half_diff + b * b);
  }
};

/// Integer lattice vector k ∈ ℤ².
struct Wavevector {
  int k1 = 0;
  int k2 = 0;

  constexpr int operator[](int i) const { return i == 0 ? k1 : k2; }
  constexpr bool is_zero() const { return k1 == 0 && k2 == 0; }
  constexpr int norm_inf() const {
    const int a = k1 < 0 ? -k1 : k1;
    const int b = k2 < 0 ? -k2 : k2;
    return a > b ? a : b;
  }
  constexpr int norm2() const { return k1 * k1 + k2 * k2; }
  /// k⊥ = (k₂, −k₁).
  constexpr Wavevector perp() const { return {k2, -k1}; }
  constexpr Wavevector operator-() const { return {-k1, -k2}; }
  /// Canonical representative of {k, −k}: k₁ > 0, or k₁ = 0 and k₂ > 0.
  constexpr bool in_half_space() const { return k1 > 0 || (k1 == 0 && k2 > 0); }

  friend constexpr auto operator<=>(Wavevector, Wavevector) = default;
};

constexpr double dot(Wavevector k, Vec2 x) { return k.k1 * x.x + k.k2 * x.y; }
constexpr Vec2 to_vec(Wavevector k) { return {double(k.k1), double(k.k2)}; }

/// Reduce an angle to [0, 2π).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

inline Vec2 wrap(Vec2 p) { return {wrap_angle(p.x), wrap_angle(p.y)}; }

}  // namespace svlab
