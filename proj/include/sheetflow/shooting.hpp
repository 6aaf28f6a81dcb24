// Shape distance by geodesic shooting.
//
// Given two nearby curves of the same topology and equal enclosed volume,
// finds the initial momentum whose pure geodesic flow carries the first
// curve onto the second in unit time, by damped Gauss-Newton over Fourier
// momentum coefficients. The squared distance is the path energy of the
// resulting geodesic. The method is restricted to small separations: the
// underlying metric is weak and the boundary-value problem is ill-posed
// for distant shapes, so the admissible radius is an implementation
// constant, not a derived quantity.
#ifndef SHEETFLOW_SHOOTING_HPP
#define SHEETFLOW_SHOOTING_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "sheetflow/dynamics.hpp"

namespace sheetflow {

struct ShootingOptions {
  int modes = 4;           // Fourier modes per loop parametrizing the momentum
  int steps = 8;           // time steps of the unit-time geodesic integration
  int max_iterations = 30; // Gauss-Newton iteration budget
  // Terminal mismatch target. The reachable floor scales like the square of
  // the initial separation (shape content the momentum modes only influence
  // at second order), so demanding much less than radius^2 stalls the solver.
  double mismatch_tol = 1e-5;
  double volume_tol = 1e-8;     // enclosed-volume agreement required up front
  double radius = 0.05;         // largest admissible marker-to-target distance
  double fd_eps = 1e-7;         // forward-difference scale for the Jacobian
};

struct ShootingResult {
  double distance = 0.0;        // geodesic length sqrt(path energy)
  double energy = 0.0;          // path energy  int <xi,xi> dt
  CoVectorVS momentum;          // initial momentum of the geodesic
  std::vector<SheetState> path; // geodesic samples, t = 0 .. 1 inclusive
  double mismatch = 0.0;        // terminal max signed distance to the target
  int iterations = 0;
};

// Non-convergence within the iteration budget; carries the best iterate.
struct shooting_error : domain_error_sf {
  ShootingResult best;
  shooting_error(const std::string& msg, ShootingResult b)
      : domain_error_sf(msg), best(std::move(b)) {}
};

namespace detail {

// Momentum values at the markers from per-loop Fourier coefficients
// (cos/sin pairs for modes 1..m; the constant mode is gauge).
inline VectorXd shooting_momentum(const SheetCurve& g, const VectorXd& c,
                                  int modes) {
  const int Nl = g.markers_per_loop();
  VectorXd f = VectorXd::Zero(g.total());
  for (int li = 0; li < int(g.loops.size()); ++li)
    for (int k = 1; k <= modes; ++k) {
      const double cc = c[li * 2 * modes + 2 * (k - 1)];
      const double cs = c[li * 2 * modes + 2 * (k - 1) + 1];
      for (int j = 0; j < Nl; ++j) {
        const double ph = TWO_PI * k * double(j) / Nl;
        f[li * Nl + j] += cc * std::cos(ph) + cs * std::sin(ph);
      }
    }
  return f;
}

struct ShotTrajectory {
  std::vector<SheetState> path;
  double energy = 0.0;
};

// Integrate the pure geodesic flow over unit time, recording the states and
// the trapezoid path energy  int 2 K dt.
inline ShotTrajectory shoot(const SheetCurve& g0, const VectorXd& f0,
                            const ShootingOptions& opt, const GreenTable& tab) {
  StepOptions so;
  so.filter = false;
  so.resample_ratio = 1e300;  // keep marker count fixed along the shot
  ShotTrajectory out;
  SheetState s{g0, CoVectorVS{f0}, 0.0, 0.0, 0.0};
  const double dt = 1.0 / opt.steps;
  std::vector<double> twoK(std::size_t(opt.steps) + 1);
  for (int it = 0;; ++it) {
    twoK[std::size_t(it)] =
        2.0 * flow_field(s, build_operators(s.gamma, tab)).K;
    out.path.push_back(s);
    if (it == opt.steps) break;
    s = step(s, dt, tab, so);
  }
  for (int it = 0; it < opt.steps; ++it)
    out.energy += 0.5 * dt * (twoK[std::size_t(it)] + twoK[std::size_t(it) + 1]);
  return out;
}

// Signed distances from the terminal markers to the target curve.
inline VectorXd shooting_residual(const SheetCurve& terminal,
                                  const SheetCurve& target) {
  VectorXd r(terminal.total());
  for (int i = 0; i < terminal.total(); ++i)
    r[i] = target.project(terminal.marker(i)).t;
  return r;
}

}  // namespace detail

inline ShootingResult shape_distance_shooting(const SheetCurve& g0,
                                              const SheetCurve& g1,
                                              const GreenTable& tab,
                                              const ShootingOptions& opt = {}) {
  if (g0.topology != g1.topology || g0.loops.size() != g1.loops.size())
    throw domain_error_sf("shape_distance_shooting: topology mismatch");
  if (std::abs(g0.area_plus() - g1.area_plus()) > opt.volume_tol)
    throw domain_error_sf(
        "shape_distance_shooting: enclosed volumes differ beyond tolerance");
  double sep = 0.0;
  for (int i = 0; i < g0.total(); ++i)
    sep = std::max(sep, std::abs(g1.project(g0.marker(i)).t));
  if (sep > opt.radius)
    throw domain_error_sf(
        "shape_distance_shooting: curves exceed the shooting radius");

  const int dim = int(g0.loops.size()) * 2 * opt.modes;
  VectorXd c = VectorXd::Zero(dim);

  auto evaluate = [&](const VectorXd& coeff) {
    detail::ShotTrajectory tr =
        detail::shoot(g0, detail::shooting_momentum(g0, coeff, opt.modes), opt, tab);
    VectorXd r = detail::shooting_residual(tr.path.back().gamma, g1);
    return std::make_pair(std::move(tr), std::move(r));
  };

  auto [traj, r] = evaluate(c);
  double lambda = 1e-6;
  int iters = 0;
  auto pack = [&](const detail::ShotTrajectory& tr, const VectorXd& res,
                  const VectorXd& coeff, int it) {
    ShootingResult out;
    out.energy = tr.energy;
    out.distance = std::sqrt(std::max(tr.energy, 0.0));
    out.momentum = CoVectorVS{detail::shooting_momentum(g0, coeff, opt.modes)};
    out.path = tr.path;
    out.mismatch = res.size() ? res.lpNorm<Eigen::Infinity>() : 0.0;
    out.iterations = it;
    return out;
  };

  while (r.lpNorm<Eigen::Infinity>() > opt.mismatch_tol) {
    if (iters >= opt.max_iterations)
      throw shooting_error(
          "shape_distance_shooting: no convergence within iteration budget",
          pack(traj, r, c, iters));
    // forward-difference Jacobian of the terminal residual
    const double h = opt.fd_eps;
    Eigen::MatrixXd J(r.size(), dim);
    for (int d = 0; d < dim; ++d) {
      VectorXd cp = c;
      cp[d] += h;
      J.col(d) = (evaluate(cp).second - r) / h;
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const VectorXd Jtr = J.transpose() * r;
    bool accepted = false;
    for (int trial = 0; trial < 12 && !accepted; ++trial) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += lambda * (1.0 + JtJ.diagonal().maxCoeff());
      const VectorXd cn = c - A.ldlt().solve(Jtr);
      auto [tn, rn] = evaluate(cn);
      if (rn.norm() < r.norm()) {
        c = cn;
        traj = std::move(tn);
        r = std::move(rn);
        lambda = std::max(lambda / 4.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 8.0;
      }
    }
    ++iters;
    if (!accepted)
      throw shooting_error("shape_distance_shooting: damping stalled",
                           pack(traj, r, c, iters));
  }
  return pack(traj, r, c, iters);
}

}  // namespace sheetflow

#endif  // SHEETFLOW_SHOOTING_HPP
