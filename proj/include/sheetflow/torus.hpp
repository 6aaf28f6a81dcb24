// sheetflow: points on the flat unit 2-torus and periodic displacements.
#ifndef SHEETFLOW_TORUS_HPP
#define SHEETFLOW_TORUS_HPP

#include "sheetflow/common.hpp"

namespace sheetflow {

// Reduce a real number to [0,1).
inline double wrap01(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r -= 1.0;  // guard against floor rounding
  return r;
}

// Reduce to [-1/2, 1/2).
inline double wrap_half(double x) {
  double r = x - std::round(x);
  if (r >= 0.5) r -= 1.0;
  if (r < -0.5) r += 1.0;
  return r;
}

// A point of T^2 = R^2/Z^2 (unit square fundamental domain, unit area).
struct TorusPoint {
  double x = 0.0, y = 0.0;  // always in [0,1)
  TorusPoint() = default;
  TorusPoint(double x_, double y_) : x(wrap01(x_)), y(wrap01(y_)) {}
  static TorusPoint from_vec(const Vec2& v) { return TorusPoint(v.x, v.y); }
  TorusPoint shifted(const Vec2& d) const { return TorusPoint(x + d.x, y + d.y); }
};

// Periodic displacement p - q with components in [-1/2, 1/2).
inline Vec2 displacement(const TorusPoint& p, const TorusPoint& q) {
  return {wrap_half(p.x - q.x), wrap_half(p.y - q.y)};
}

inline double torus_distance(const TorusPoint& p, const TorusPoint& q) {
  return displacement(p, q).norm();
}

}  // namespace sheetflow

#endif  // SHEETFLOW_TORUS_HPP
