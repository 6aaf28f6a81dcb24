// sheetflow: independent analytic and brute-force oracles.
//
// These deliberately avoid the library's boundary-integral machinery: every
// value here comes from separation of variables or plain finite differencing,
// so agreement with the main code is meaningful evidence of correctness.
#ifndef SHEETFLOW_ORACLE_HPP
#define SHEETFLOW_ORACLE_HPP

#include <functional>

#include "sheetflow/curve.hpp"

namespace sheetflow {

// Dirichlet-to-Neumann block of a flat strip of height h (both boundaries),
// for the Fourier mode k in the periodic direction.  Acting on boundary
// Dirichlet coefficients (bottom, top), returns outward-normal-derivative
// coefficients on (bottom, top).
inline Eigen::Matrix2d strip_dtn_block(int k, double h) {
  if (!(h > 0.0 && h < 1.0))
    throw domain_error_sf("strip_dtn_block: height must lie in (0,1)");
  if (k < 0) throw domain_error_sf("strip_dtn_block: mode must be >= 0");
  Eigen::Matrix2d A;
  if (k == 0) {
    A << 1.0, -1.0, -1.0, 1.0;
    return A / h;
  }
  const double w = TWO_PI * k;
  const double a = w / std::tanh(w * h);
  const double b = -w / std::sinh(w * h);
  A << a, b, b, a;
  return A;
}

// Finite-difference shape gradient of a curve functional H along the given
// tangent directions, with one Richardson extrapolation step and an error
// estimate from the extrapolation tableau.
struct ShapeGradientFD {
  VectorXd grad;      // extrapolated directional derivatives
  VectorXd error_est; // |extrapolated - finest centered difference|
};

inline ShapeGradientFD shape_gradient_fd(
    const std::function<double(const SheetCurve&)>& H, const SheetCurve& g,
    const std::vector<TangentVS>& directions, double eps) {
  if (!(eps > 0.0)) throw domain_error_sf("shape_gradient_fd: eps must be positive");
  ShapeGradientFD out;
  const int n = int(directions.size());
  out.grad = VectorXd::Zero(n);
  out.error_est = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    auto centered = [&](double e) {
      return (H(deform(g, directions[i], e)) - H(deform(g, directions[i], -e))) /
             (2.0 * e);
    };
    const double d1 = centered(eps);
    const double d2 = centered(eps / 2.0);
    const double extrap = (4.0 * d2 - d1) / 3.0;
    out.grad[i] = extrap;
    out.error_est[i] = std::abs(extrap - d2);
  }
  return out;
}

// Closed-form reference for the linearized dynamics of a flat loop pair
// (heights h+ and 1-h+) carrying circulation classes theta±, for one Fourier
// mode k in the periodic direction. Complex amplitudes z = (eta0, eta1, f0,
// f1) of the e^{i kappa x} perturbation (sheet displacements and potential
// jumps on the bottom/top sheet) evolve as dz/dt = L z with
//   eta' = D M^{-1} f,                        D = diag(-1, +1),
//   f'   = kappa^2 (th+^2 A+^{-1} + th-^2 A-^{-1}) D eta
//          - 2 i kappa (th+ A+^{-1} + th- A-^{-1}) M^{-1} f,
// where A± are the strip DtN blocks and M = A+^{-1} + A-^{-1}. In the
// deep-strip limit this reduces to the classical Kelvin-Helmholtz dispersion
// lambda = -i kappa (th+ + th-)/2 ± kappa |th+ - th-| / 2.
struct FourierReferenceFlow {
  Eigen::Matrix2d M;            // modal metric matrix on jump coefficients
  double metric_cos_bottom = 0; // vs_metric of the unit cos-mode on the bottom sheet
  double P = 0;                 // potential energy of the flat state
  Eigen::Matrix4cd L;           // modal evolution matrix
  Eigen::Vector4cd eigenvalues; // growth/oscillation rates lambda (omega = i lambda)
};

inline FourierReferenceFlow fourier_reference_flow(int k, double hplus,
                                                   double theta_plus,
                                                   double theta_minus) {
  if (k < 1) throw domain_error_sf("fourier_reference_flow: mode must be >= 1");
  const double hminus = 1.0 - hplus;
  const Eigen::Matrix2d Api = strip_dtn_block(k, hplus).inverse();
  const Eigen::Matrix2d Ami = strip_dtn_block(k, hminus).inverse();
  FourierReferenceFlow out;
  out.M = Api + Ami;
  // cos-mode density (1,0): the arclength integral of cos^2 contributes 1/2
  out.metric_cos_bottom = 0.5 * out.M(0, 0);
  out.P = 0.5 * (theta_plus * theta_plus * hplus +
                 theta_minus * theta_minus * hminus);

  const double kappa = TWO_PI * k;
  const Eigen::Matrix2d Minv = out.M.inverse();
  Eigen::Matrix2d Dm;
  Dm << -1.0, 0.0, 0.0, 1.0;
  const Eigen::Matrix2d Feta =
      kappa * kappa *
      (theta_plus * theta_plus * Api + theta_minus * theta_minus * Ami) * Dm;
  const Eigen::Matrix2d Ff = 2.0 * kappa * (theta_plus * Api + theta_minus * Ami) * Minv;
  out.L.setZero();
  out.L.block<2, 2>(0, 2) = (Dm * Minv).cast<dcomplex>();
  out.L.block<2, 2>(2, 0) = Feta.cast<dcomplex>();
  out.L.block<2, 2>(2, 2) = dcomplex(0.0, -1.0) * Ff.cast<dcomplex>();
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(out.L);
  out.eigenvalues = es.eigenvalues();
  return out;
}

}  // namespace sheetflow

#endif  // SHEETFLOW_ORACLE_HPP
