// sheetflow: the weak Riemannian metric on the space of sheet curves.
//
// The metric pairs normal-velocity forms xi through the sum of the two
// Neumann-to-Dirichlet operators; its value equals the minimal kinetic energy
// among per-side gradient fields whose normal trace realizes xi (the
// horizontal lift). The cometric acts on potential jumps via the double
// layer.
#ifndef SHEETFLOW_METRIC_HPP
#define SHEETFLOW_METRIC_HPP

#include "sheetflow/hodge.hpp"
#include "sheetflow/quadrature.hpp"

namespace sheetflow {

namespace detail {

// Normal-velocity density xi/ds at the markers.
inline VectorXd density_of(const SheetCurve& g, const TangentVS& xi) {
  if (xi.xi.size() != g.total())
    throw domain_error_sf("metric: tangent vector size mismatch");
  return xi.xi.cwiseQuotient(g.weights());
}

}  // namespace detail

// <(NtD+ + NtD-) xi, xi>: the squared VS-metric norm of xi.
inline double vs_metric(const SheetCurve& g, const TangentVS& xi,
                        const LayerOperators& ops) {
  xi.require_zero_mean();
  const VectorXd d = detail::density_of(g, xi);
  const VectorXd gsum = ops.ntd_matrix(+1) * d + ops.ntd_matrix(-1) * d;
  return ops.w.dot(d.cwiseProduct(gsum));
}

// Horizontal lift: per-side Neumann harmonic extensions f± with
// grad f± . nu = xi/ds on the curve, packaged as a discontinuous field.
inline DiscontinuousField horizontal_lift(const SheetCurve& g, const TangentVS& xi,
                                          const LayerOperators& ops) {
  xi.require_zero_mean();
  const VectorXd d = detail::density_of(g, xi);
  DiscontinuousField u(ops.curve);
  // own-outward normal-derivative densities: +d on D+, -d on D-
  const VectorXd gp = ops.ntd_matrix(+1) * d;
  const VectorXd gm = -(ops.ntd_matrix(-1) * d);
  u.hplus = detail::make_extension(ops, +1, gp, d);
  u.hminus = detail::make_extension(ops, -1, gm, VectorXd(-d));
  return u;
}

// Brute-force L2 energy of a discontinuous field by two-domain quadrature.
inline double field_energy(const DiscontinuousField& u,
                           const QuadratureSpec& spec = {}) {
  TwoDomainQuadrature quad(u.gamma, spec);
  return quad.integrate([&](const TorusPoint& p, int side) {
    return u.eval(p, side).squaredNorm();
  });
}

struct SubmersionReport {
  double metric = 0.0;           // NtD pairing
  double lift_energy_bnd = 0.0;  // boundary-identity energy of the lift
  double lift_energy_quad = 0.0; // interior-quadrature energy of the lift
  double isotropy_ip = 0.0;      // quadrature <lift, w> for a tangential field w
  double isotropy_scale = 0.0;   // ||lift|| * ||w|| in L2
  bool pass = false;
};

// Verifies that the horizontal lift realizes the metric (Dirichlet energy
// equals the NtD pairing) and is L2-orthogonal to the isotropy directions
// (divergence-free fields tangent to the curve), by interior quadrature.
inline SubmersionReport submersion_check(const SheetCurve& g, const TangentVS& xi,
                                         const LayerOperators& ops,
                                         const QuadratureSpec& spec = {},
                                         double tol_rel = 1e-3) {
  SubmersionReport rep;
  rep.metric = vs_metric(g, xi, ops);
  DiscontinuousField lift = horizontal_lift(g, xi, ops);

  // Green-identity energy: sum of boundary pairings g * psi on each side
  rep.lift_energy_bnd = ops.w.dot(lift.hplus->g.cwiseProduct(lift.hplus->psi)) +
                        ops.w.dot(lift.hminus->g.cwiseProduct(lift.hminus->psi));

  TwoDomainQuadrature quad(g, spec);
  rep.lift_energy_quad = quad.integrate([&](const TorusPoint& p, int side) {
    return lift.eval(p, side).squaredNorm();
  });

  // a tangential isotropy field: a curl-carrying smooth DSVect field minus the
  // horizontal lift of its own anchor (zero normal trace by construction).
  // Per-side gradient fields are useless here: they equal the lift of their
  // own anchor exactly, so the difference must contain vorticity.
  DiscontinuousField v(ops.curve);
  StreamField s;
  s.modes = {{1, 0, 0.6, 0.0}, {0, 1, 0.0, 0.4}, {1, 1, 0.3, 0.0}};
  v.set_shared_stream(s);
  DiscontinuousField lift_v = horizontal_lift(g, anchor(v), ops);
  auto wtan = [&](const TorusPoint& p, int side) {
    return v.eval(p, side) - lift_v.eval(p, side);
  };
  rep.isotropy_ip = quad.integrate([&](const TorusPoint& p, int side) {
    return lift.eval(p, side).dot(wtan(p, side));
  });
  const double nw = quad.integrate([&](const TorusPoint& p, int side) {
    return wtan(p, side).squaredNorm();
  });
  rep.isotropy_scale = std::sqrt(std::max(0.0, rep.lift_energy_quad * nw));

  const double scale = std::max(rep.metric, 1e-14);
  rep.pass = std::abs(rep.lift_energy_bnd - rep.metric) <= 1e-10 * scale &&
             std::abs(rep.lift_energy_quad - rep.metric) <= tol_rel * scale &&
             std::abs(rep.isotropy_ip) <= tol_rel * std::max(rep.isotropy_scale, 1e-14);
  return rep;
}

struct CometricResult {
  TangentVS xi;   // normal-velocity form dual to the potential jump
  double K = 0.0; // kinetic energy (1/2) <f, xi>
};

// Metric dual of a potential jump f (defined modulo a constant): the common
// normal-derivative form of the double-layer potential with Dirichlet jump f.
inline CometricResult cometric(const SheetCurve& g, const CoVectorVS& f,
                               const LayerOperators& ops) {
  if (f.f.size() != g.total())
    throw domain_error_sf("cometric: covector size mismatch");
  VectorXd jmp = f.f;
  jmp.array() -= ops.w.dot(jmp) / ops.w.sum();  // gauge: remove the constant
  DoubleLayer dl = double_layer(g, jmp, ops);
  CometricResult out;
  out.xi = dl.xi;
  out.K = 0.5 * jmp.dot(out.xi.xi);
  return out;
}

}  // namespace sheetflow

#endif  // SHEETFLOW_METRIC_HPP
