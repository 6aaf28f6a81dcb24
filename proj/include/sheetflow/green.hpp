// sheetflow: periodic Green's function of the Laplacian on the unit torus,
//   Delta G = delta_0 - 1,  zero mean,  G(d) = (1/2pi) log|d| + smooth.
//
// Primary evaluator: the x-resummed ("theta-product") form
//   G = -B2({y})/2 + (1/4pi) sum_{m>=0} [ log F_{u+m} + log F_{1-u+m} ],
//   F_a = (1-e^{-2pi a})^2 + 4 e^{-2pi a} sin^2(pi x),  u = |wrap_half(y)|,
// which converges geometrically (ratio e^{-2pi}) uniformly in position and is
// cancellation-free through the logarithmic singularity.
//
// Cross-check evaluator (independent code path): classical Ewald split with
// exponential-integral real-space sum and Gaussian-filtered spectral sum.
#ifndef SHEETFLOW_GREEN_HPP
#define SHEETFLOW_GREEN_HPP

#include "sheetflow/torus.hpp"

namespace sheetflow {

struct GreenTable {
  int mode_cutoff = 128;   // bound for spectral sums (Ewald reciprocal, checks)
  double ewald_eta = 6.0;  // Ewald splitting parameter
  int resummed_terms = 8;  // m-terms in the resummed product (e^{-2pi m} decay)

  // Smooth-remainder value on the diagonal: lim_{d->0} [G(d) - (1/2pi)log|d|].
  double remainder_diagonal() const {
    double s = 0.0;
    for (int m = 1; m <= resummed_terms; ++m) s += std::log(-std::expm1(-TWO_PI * m));
    return -1.0 / 12.0 + (std::log(4.0 * PI * PI) + 4.0 * s) / (4.0 * PI);
  }
};

namespace detail {

// F_a = (1-E)^2 + 4 E sin^2(pi x), E = e^{-2 pi a}; all terms nonnegative.
inline double green_factor(double a, double sin2px) {
  const double E = std::exp(-TWO_PI * a);
  const double A = -std::expm1(-TWO_PI * a);
  return A * A + 4.0 * E * sin2px;
}

}  // namespace detail

// G evaluated at a reduced displacement d (components in [-1/2,1/2)).
inline double green_disp(const Vec2& d, const GreenTable& tab) {
  const double u = std::abs(d.y);
  const double sp = std::sin(PI * d.x);
  const double sin2px = sp * sp;
  const double B2 = u * u - u + 1.0 / 6.0;  // B2({y}) with B2(1-u)=B2(u)
  double acc = 0.0;
  for (int m = 0; m <= tab.resummed_terms; ++m) {
    acc += std::log(detail::green_factor(u + m, sin2px));
    acc += std::log(detail::green_factor(1.0 - u + m, sin2px));
  }
  return -0.5 * B2 + acc / (4.0 * PI);
}

// Gradient of G with respect to the first argument, at reduced displacement d.
inline Vec2 grad_green_disp(const Vec2& d, const GreenTable& tab) {
  const double u = std::abs(d.y);
  const double sy = (d.y >= 0.0) ? 1.0 : -1.0;
  const double sp = std::sin(PI * d.x);
  const double sin2px = sp * sp;
  const double s2px = std::sin(TWO_PI * d.x);
  const double c2px = std::cos(TWO_PI * d.x);
  double gx = 0.0, gu = 0.5 - u;
  for (int m = 0; m <= tab.resummed_terms; ++m) {
    {
      const double a = u + m;
      const double E = std::exp(-TWO_PI * a);
      const double F = detail::green_factor(a, sin2px);
      gx += E * s2px / F;
      gu += E * (c2px - E) / F;
    }
    {
      const double a = 1.0 - u + m;
      const double E = std::exp(-TWO_PI * a);
      const double F = detail::green_factor(a, sin2px);
      gx += E * s2px / F;
      gu -= E * (c2px - E) / F;
    }
  }
  return {gx, sy * gu};
}

// Symmetric 2x2 matrix (Hessian values).
struct SymMat2 {
  double xx = 0, xy = 0, yy = 0;
  Vec2 apply(const Vec2& v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
};

// Hessian of G with respect to the first argument, at reduced displacement d.
// Uses F_a = 1 - 2 E cos(2 pi x) + E^2 (E = e^{-2 pi a}); term-by-term the
// trace contributions cancel exactly, so gxx + gyy = -1 off the diagonal.
inline SymMat2 hess_green_disp(const Vec2& d, const GreenTable& tab) {
  const double u = std::abs(d.y);
  const double sy = (d.y >= 0.0) ? 1.0 : -1.0;
  const double sp = std::sin(PI * d.x);
  const double sin2px = sp * sp;
  const double s2 = std::sin(TWO_PI * d.x);
  const double c2 = std::cos(TWO_PI * d.x);
  double gxx = 0.0, gxu = 0.0, guu = -1.0;
  for (int m = 0; m <= tab.resummed_terms; ++m) {
    for (int branch = 0; branch < 2; ++branch) {
      const double a = branch == 0 ? u + m : 1.0 - u + m;
      const double sgn = branch == 0 ? 1.0 : -1.0;
      const double E = std::exp(-TWO_PI * a);
      const double F = detail::green_factor(a, sin2px);
      const double F2 = F * F;
      gxx += TWO_PI * E * (c2 * F - 2.0 * E * s2 * s2) / F2;
      gxu -= sgn * TWO_PI * E * s2 * (1.0 - E * E) / F2;
      guu += TWO_PI * E * ((2.0 * E - c2) * F - 2.0 * E * (c2 - E) * (c2 - E)) / F2;
    }
  }
  return {gxx, sy * gxu, guu};
}

// G minus its log singularity: G(d) - (1/2pi) log|d|, stable for small |d|
// (d must be nonzero; for the limit use GreenTable::remainder_diagonal).
inline double green_remainder_disp(const Vec2& d, const GreenTable& tab) {
  const double u = std::abs(d.y);
  const double sp = std::sin(PI * d.x);
  const double sin2px = sp * sp;
  const double B2 = u * u - u + 1.0 / 6.0;
  const double r2 = d.squaredNorm();
  double acc = std::log(detail::green_factor(u, sin2px) / r2);
  for (int m = 1; m <= tab.resummed_terms; ++m)
    acc += std::log(detail::green_factor(u + m, sin2px));
  for (int m = 0; m <= tab.resummed_terms; ++m)
    acc += std::log(detail::green_factor(1.0 - u + m, sin2px));
  return -0.5 * B2 + acc / (4.0 * PI);
}

// --- Independent Ewald-split cross-check -----------------------------------

inline double ewald_green_disp(const Vec2& d, const GreenTable& tab) {
  const double eta = tab.ewald_eta;
  const double eta2 = eta * eta;
  double real_sum = 0.0;
  const int nr = 2;
  for (int nx = -nr; nx <= nr; ++nx)
    for (int ny = -nr; ny <= nr; ++ny) {
      const double rx = d.x + nx, ry = d.y + ny;
      const double z = eta2 * (rx * rx + ry * ry);
      if (z > 42.0) continue;  // E1(z) below double precision relevance
      real_sum += -std::expint(-z);  // E1(z)
    }
  double recip_sum = 0.0;
  const int kr = std::min(tab.mode_cutoff, int(std::ceil(2.2 * eta)) + 1);
  for (int kx = -kr; kx <= kr; ++kx)
    for (int ky = -kr; ky <= kr; ++ky) {
      if (kx == 0 && ky == 0) continue;
      const double k2 = double(kx) * kx + double(ky) * ky;
      recip_sum += std::exp(-PI * PI * k2 / eta2) *
                   std::cos(TWO_PI * (kx * d.x + ky * d.y)) / k2;
    }
  return -real_sum / (4.0 * PI) - recip_sum / (4.0 * PI * PI) + 1.0 / (4.0 * eta2);
}

// Plain truncated double Fourier series (slowly convergent; sanity use only).
inline double fourier_green_disp(const Vec2& d, int cutoff) {
  double s = 0.0;
  for (int kx = -cutoff; kx <= cutoff; ++kx)
    for (int ky = -cutoff; ky <= cutoff; ++ky) {
      if (kx == 0 && ky == 0) continue;
      const double k2 = double(kx) * kx + double(ky) * ky;
      s += std::cos(TWO_PI * (kx * d.x + ky * d.y)) / k2;
    }
  return -s / (4.0 * PI * PI);
}

// --- Point-pair API ---------------------------------------------------------

inline double green(const TorusPoint& p, const TorusPoint& q, const GreenTable& tab) {
  const Vec2 d = displacement(p, q);
  if (d.norm() < 1e-13)
    throw domain_error_sf("green: coincident points (singular kernel)");
  return green_disp(d, tab);
}

inline Vec2 grad_green(const TorusPoint& p, const TorusPoint& q, const GreenTable& tab) {
  const Vec2 d = displacement(p, q);
  if (d.norm() < 1e-13)
    throw domain_error_sf("grad_green: coincident points (singular kernel)");
  return grad_green_disp(d, tab);
}

}  // namespace sheetflow

#endif  // SHEETFLOW_GREEN_HPP
