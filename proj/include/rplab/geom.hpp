// rp-lab: small fixed-dimension vector helpers (d <= 3) and ball geometry.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace rplab {

// All positions live in R^d with d <= 3; unused trailing coordinates are 0 so
// that a single POD type serves every dimension without heap traffic.
using Vec = std::array<double, 3>;

inline constexpr Vec vec0() { return {0.0, 0.0, 0.0}; }

inline Vec vec(double x, double y = 0.0, double z = 0.0) { return {x, y, z}; }

inline Vec add(const Vec& a, const Vec& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Vec sub(const Vec& a, const Vec& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Vec scale(const Vec& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

inline double dot(const Vec& a, const Vec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm2(const Vec& a) { return dot(a, a); }

inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline double dist2(const Vec& a, const Vec& b) { return norm2(sub(a, b)); }

inline double dist(const Vec& a, const Vec& b) { return std::sqrt(dist2(a, b)); }

inline Vec unit(const Vec& a) {
  const double n = norm(a);
  if (n == 0.0) throw std::invalid_argument("unit(): zero vector");
  return scale(a, 1.0 / n);
}

// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return M_PI;
    case 3: return 4.0 * M_PI / 3.0;
    default: throw std::invalid_argument("unit_ball_volume: d must be 1..3");
  }
}

// Volume of the intersection of two balls of common radius r whose centers are
// distance s apart (the symmetric lens). Zero for s >= 2r.
inline double lens_volume(int d, double r, double s) {
  if (s >= 2.0 * r) return 0.0;
  if (s <= 0.0) return unit_ball_volume(d) * std::pow(r, d);
  switch (d) {
    case 1:
      return 2.0 * r - s;
    case 2:
      return 2.0 * r * r * std::acos(s / (2.0 * r)) -
             0.5 * s * std::sqrt(4.0 * r * r - s * s);
    case 3:
      return M_PI / 12.0 * (4.0 * r + s) * (2.0 * r - s) * (2.0 * r - s);
    default:
      throw std::invalid_argument("lens_volume: d must be 1..3");
  }
}

}  // namespace rplab
