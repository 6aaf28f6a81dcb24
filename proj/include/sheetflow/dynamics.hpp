// sheetflow: time evolution of vortex sheets.
//
// State: the curve Gamma, the potential-jump momentum f (modulo constants),
// and the per-side circulation classes theta± (constants of motion). The
// velocity on each side is
//   u± = grad(phi±) + theta± (e_x + grad(psi±)),
// where phi± is the double-layer potential with Dirichlet jump f (continuous
// normal derivative = sheet velocity) and psi± the Neumann correction making
// the circulation part tangent to the curve.
//
// Momentum transport at normally-moving markers follows from the unsteady
// Bernoulli relation: the full potential jump F at a marker obeys
// dF/dt = -1/2 jump|u|^2 (the transport term vanishes because the normal
// trace of u is continuous); subtracting the geometric change of the
// circulation-potential jump leaves
//   df/dt = -1/2 jump|u|^2 - (d/dt of circulation-potential jump),
// mean-removed. The second term is the magnetic force of the reduced
// Hamiltonian system and is computed by centered differences over deformed
// curves; it vanishes when theta± = 0 (pure geodesic flow).
#ifndef SHEETFLOW_DYNAMICS_HPP
#define SHEETFLOW_DYNAMICS_HPP

#include <limits>

#include "sheetflow/metric.hpp"

namespace sheetflow {

struct SheetState {
  SheetCurve gamma;
  CoVectorVS f;           // potential jump at the markers, modulo a constant
  double theta_plus = 0;  // circulation class of D+ (LoopPair only)
  double theta_minus = 0;
  double t = 0;
};

inline void validate_state(const SheetState& st) {
  if (st.f.f.size() != st.gamma.total())
    throw domain_error_sf("SheetState: momentum size mismatch");
  if (st.gamma.topology != Topology::LoopPair &&
      (st.theta_plus != 0.0 || st.theta_minus != 0.0))
    throw domain_error_sf(
        "SheetState: circulation classes require LoopPair topology");
}

namespace detail {

// Neumann correction psi with d(theta x + psi)/dn_own = 0, scaled by theta:
// the stored extension is phi = theta psi, so the side field is
// theta e_x + grad(phi).
inline std::optional<HarmonicExtension> circulation_ext(const LayerOperators& ops,
                                                        int side, double theta) {
  if (theta == 0.0) return std::nullopt;
  const SheetCurve& g = ops.curve;
  if (g.topology != Topology::LoopPair)
    throw domain_error_sf("harmonic_circulation: LoopPair topology required");
  const int N = g.total();
  VectorXd dens(N);
  for (int i = 0; i < N; ++i)
    dens[i] = -theta * double(side) * g.normal(i).x;
  // flux of e_x through a closed curve vanishes; remove the numerical mean
  dens.array() -= ops.w.dot(dens) / ops.w.sum();
  const VectorXd tr = ops.ntd_matrix(side) * dens;
  return make_extension(ops, side, tr, dens);
}

inline CirculationPart circulation_part(const LayerOperators& ops,
                                        double theta_plus, double theta_minus) {
  CirculationPart c;
  c.theta_plus = theta_plus;
  c.theta_minus = theta_minus;
  c.phi_plus = circulation_ext(ops, +1, theta_plus);
  c.phi_minus = circulation_ext(ops, -1, theta_minus);
  return c;
}

}  // namespace detail

// Harmonic circulation component on one side: period theta around the
// non-contractible direction, zero normal component at the curve.
inline DiscontinuousField harmonic_circulation(const SheetCurve& g, int side,
                                               double theta,
                                               const LayerOperators& ops) {
  if (g.topology != Topology::LoopPair)
    throw domain_error_sf("harmonic_circulation: LoopPair topology required");
  DiscontinuousField u(ops.curve);
  CirculationPart c;
  (side > 0 ? c.theta_plus : c.theta_minus) = theta;
  auto ext = detail::circulation_ext(ops, side, theta);
  (side > 0 ? c.phi_plus : c.phi_minus) = ext;
  u.circ = c;
  return u;
}

// Potential energy P = 1/2 sum_sides ||theta (e_x + grad psi)||^2_{L2}.
// Green identity reduces each side to  theta^2 area - <trace, density>_w,
// so no interior quadrature is needed.
inline double potential_P(const SheetCurve& g, double theta_plus,
                          double theta_minus, const LayerOperators& ops) {
  if (theta_plus == 0.0 && theta_minus == 0.0) return 0.0;
  if (g.topology != Topology::LoopPair)
    throw domain_error_sf("potential_P: LoopPair topology required");
  double P = 0.0;
  for (int side : {+1, -1}) {
    const double theta = side > 0 ? theta_plus : theta_minus;
    if (theta == 0.0) continue;
    const auto ext = detail::circulation_ext(ops, side, theta);
    const double area = side > 0 ? g.area_plus() : 1.0 - g.area_plus();
    P += 0.5 * (theta * theta * area - ops.w.dot(ext->g.cwiseProduct(ext->psi)));
  }
  return P;
}

// Assembled flow field of a state plus its reduced kinetic data.
struct FlowField {
  DiscontinuousField u;  // total velocity, both sides
  TangentVS xi;          // normal velocity form (= Gamma-dot)
  double K = 0.0;        // kinetic energy of the potential part
};

inline FlowField flow_field(const SheetState& st, const LayerOperators& ops) {
  validate_state(st);
  VectorXd jmp = st.f.f;
  jmp.array() -= ops.w.dot(jmp) / ops.w.sum();
  DoubleLayer dl = double_layer(st.gamma, jmp, ops);
  FlowField out;
  out.u = DiscontinuousField(ops.curve);
  out.u.hplus = dl.plus;
  out.u.hminus = dl.minus;
  if (st.theta_plus != 0.0 || st.theta_minus != 0.0)
    out.u.circ = detail::circulation_part(ops, st.theta_plus, st.theta_minus);
  out.xi = dl.xi;
  out.K = 0.5 * jmp.dot(dl.xi.xi);
  return out;
}

// Total energy H = K + P of a state.
inline double hamiltonian(const SheetState& st, const LayerOperators& ops) {
  FlowField F = flow_field(st, ops);
  return F.K + potential_P(st.gamma, st.theta_plus, st.theta_minus, ops);
}

// Covector of the directional derivative of the circulation component along
// xi: centered difference of the circulation-potential jump
//   theta+ (x + psi+) - theta- (x + psi-)
// traced at the markers of the deformed curves. Defined modulo a constant.
inline VectorXd circulation_covector(const SheetCurve& g, double theta_plus,
                                     double theta_minus, const TangentVS& xi,
                                     double eps, const GreenTable& tab) {
  if (g.topology != Topology::LoopPair)
    throw domain_error_sf("circulation_covector: LoopPair topology required");
  const int N = g.total();
  auto jump_at = [&](double e) {
    const SheetCurve gd = deform(g, xi, e, false);
    LayerOperators ops = build_operators(gd, tab);
    const auto cp = detail::circulation_ext(ops, +1, theta_plus);
    const auto cm = detail::circulation_ext(ops, -1, theta_minus);
    VectorXd J(N);
    for (int i = 0; i < N; ++i) {
      const int li = gd.loop_of(i), j = gd.local_of(i);
      const double x = gd.loops[li].px[j];  // continuous lift, consistent in e
      J[i] = (theta_plus - theta_minus) * x + (cp ? cp->g[i] : 0.0) -
             (cm ? cm->g[i] : 0.0);
    }
    return J;
  };
  return ((jump_at(eps) - jump_at(-eps)) / (2.0 * eps)).eval();
}

// Magnetic 2-form Omega(xi1, xi2) of the circulation classes, antisymmetric
// by construction; zero whenever theta± are zero.
inline double magnetic_form(const SheetCurve& g, double theta_plus,
                            double theta_minus, const TangentVS& xi1,
                            const TangentVS& xi2, double eps,
                            const GreenTable& tab) {
  if (theta_plus == 0.0 && theta_minus == 0.0) return 0.0;
  const VectorXd c1 = circulation_covector(g, theta_plus, theta_minus, xi1, eps, tab);
  const VectorXd c2 = circulation_covector(g, theta_plus, theta_minus, xi2, eps, tab);
  return c1.dot(xi2.xi) - c2.dot(xi1.xi);
}

struct StateRate {
  TangentVS xi;   // Gamma-dot
  VectorXd fdot;  // momentum rate at the markers, zero weighted mean
};

struct RhsOptions {
  double circ_eps = 1e-4;  // half-width of the magnetic-term difference
};

inline StateRate geodesic_rhs(const SheetState& st, const LayerOperators& ops,
                              const GreenTable& tab, const RhsOptions& opt = {}) {
  FlowField F = flow_field(st, ops);
  const int N = st.gamma.total();
  VectorXd fdot(N);
  for (int i = 0; i < N; ++i)
    fdot[i] = -0.5 * (F.u.trace(i, +1).squaredNorm() -
                      F.u.trace(i, -1).squaredNorm());
  if ((st.theta_plus != 0.0 || st.theta_minus != 0.0) &&
      F.xi.xi.lpNorm<Eigen::Infinity>() > 0.0)
    fdot -= circulation_covector(st.gamma, st.theta_plus, st.theta_minus, F.xi,
                                 opt.circ_eps, tab);
  fdot.array() -= ops.w.dot(fdot) / ops.w.sum();
  return {F.xi, std::move(fdot)};
}

// --- Time stepping -----------------------------------------------------------

enum class Scheme { RK4, ImplicitMidpoint };

struct StepOptions {
  Scheme scheme = Scheme::RK4;
  bool filter = true;            // Krasny-style spectral filter
  double filter_floor = 1e-12;   // relative coefficient floor
  double resample_ratio = 1.8;   // max/min marker speed triggering resampling
  double circ_eps = 1e-4;
  bool check_simple = true;      // self-intersection check on the result
};

namespace detail {

// Zero Fourier bins below floor * max|bin| (bin 0 always kept).
inline void krasny_filter_vec(VectorXd& v, double floor) {
  auto c = fourier_coeffs(v);
  double m = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) m = std::max(m, std::abs(c[k]));
  if (m == 0.0) return;
  for (std::size_t k = 1; k < c.size(); ++k)
    if (std::abs(c[k]) < floor * m) c[k] = 0.0;
  auto x = dft(c, true);
  for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = x[std::size_t(j)].real();
}

inline void krasny_filter_state(SheetCurve& g, VectorXd& f, double floor) {
  const int Nl = g.markers_per_loop();
  for (int li = 0; li < int(g.loops.size()); ++li) {
    Loop& l = g.loops[li];
    const int n = l.n();
    VectorXd px(n), py(n), fl = f.segment(li * Nl, Nl);
    // remove the winding drift so the samples are periodic
    for (int j = 0; j < n; ++j) {
      px[j] = l.px[j] - double(l.wx) * j / n;
      py[j] = l.py[j] - double(l.wy) * j / n;
    }
    krasny_filter_vec(px, floor);
    krasny_filter_vec(py, floor);
    krasny_filter_vec(fl, floor);
    for (int j = 0; j < n; ++j) {
      l.px[j] = px[j] + double(l.wx) * j / n;
      l.py[j] = py[j] + double(l.wy) * j / n;
    }
    f.segment(li * Nl, Nl) = fl;
  }
  g.finalize(false);
}

struct RawRate {
  VectorXd dx, dy, df;
};

inline RawRate raw_rate(const SheetCurve& g, const VectorXd& f, double thp,
                        double thm, const GreenTable& tab, double circ_eps) {
  LayerOperators ops = build_operators(g, tab);
  SheetState s{g, CoVectorVS{f}, thp, thm, 0.0};
  StateRate r = geodesic_rhs(s, ops, tab, {circ_eps});
  const int N = g.total();
  RawRate out{VectorXd(N), VectorXd(N), std::move(r.fdot)};
  for (int i = 0; i < N; ++i) {
    const Vec2 v = (r.xi.xi[i] / g.weight(i)) * g.normal(i);
    out.dx[i] = v.x;
    out.dy[i] = v.y;
  }
  return out;
}

inline SheetCurve advanced(const SheetCurve& g, const VectorXd& dx,
                           const VectorXd& dy, double a, bool check) {
  return displace_markers(g, (a * dx).eval(), (a * dy).eval(), check);
}

}  // namespace detail

inline SheetState step(const SheetState& st, double dt, const GreenTable& tab,
                       const StepOptions& opt = {}) {
  validate_state(st);
  if (dt == 0.0) throw domain_error_sf("step: dt must be nonzero");
  const SheetCurve& g0 = st.gamma;
  const VectorXd& f0 = st.f.f;
  const double thp = st.theta_plus, thm = st.theta_minus;

  SheetCurve g1;
  VectorXd f1;
  if (opt.scheme == Scheme::RK4) {
    auto k1 = detail::raw_rate(g0, f0, thp, thm, tab, opt.circ_eps);
    auto k2 = detail::raw_rate(detail::advanced(g0, k1.dx, k1.dy, dt / 2, false),
                               (f0 + (dt / 2) * k1.df).eval(), thp, thm, tab,
                               opt.circ_eps);
    auto k3 = detail::raw_rate(detail::advanced(g0, k2.dx, k2.dy, dt / 2, false),
                               (f0 + (dt / 2) * k2.df).eval(), thp, thm, tab,
                               opt.circ_eps);
    auto k4 = detail::raw_rate(detail::advanced(g0, k3.dx, k3.dy, dt, false),
                               (f0 + dt * k3.df).eval(), thp, thm, tab,
                               opt.circ_eps);
    const VectorXd dx = (dt / 6.0) * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
    const VectorXd dy = (dt / 6.0) * (k1.dy + 2 * k2.dy + 2 * k3.dy + k4.dy);
    f1 = f0 + (dt / 6.0) * (k1.df + 2 * k2.df + 2 * k3.df + k4.df);
    g1 = displace_markers(g0, dx, dy, opt.check_simple);
  } else {
    // implicit midpoint by fixed-point iteration on the half state
    VectorXd hx = VectorXd::Zero(g0.total()), hy = hx, hf = f0;
    detail::RawRate r = detail::raw_rate(g0, f0, thp, thm, tab, opt.circ_eps);
    for (int it = 0; it < 60; ++it) {
      const SheetCurve gh = displace_markers(
          g0, ((dt / 2) * r.dx).eval(), ((dt / 2) * r.dy).eval(), false);
      const VectorXd fh = f0 + (dt / 2) * r.df;
      detail::RawRate rn = detail::raw_rate(gh, fh, thp, thm, tab, opt.circ_eps);
      const double delta = (rn.dx - r.dx).lpNorm<Eigen::Infinity>() +
                           (rn.dy - r.dy).lpNorm<Eigen::Infinity>() +
                           (rn.df - r.df).lpNorm<Eigen::Infinity>();
      r = std::move(rn);
      if (delta * std::abs(dt) < 1e-14) break;
    }
    f1 = f0 + dt * r.df;
    g1 = displace_markers(g0, (dt * r.dx).eval(), (dt * r.dy).eval(),
                          opt.check_simple);
  }

  if (opt.filter) detail::krasny_filter_state(g1, f1, opt.filter_floor);

  // arclength-distortion resampling with spectral momentum transport
  double smin = 1e300, smax = 0.0;
  for (int i = 0; i < g1.total(); ++i) {
    smin = std::min(smin, g1.speed(i));
    smax = std::max(smax, g1.speed(i));
  }
  if (smax > opt.resample_ratio * smin) {
    const int Nl = g1.markers_per_loop();
    std::vector<std::vector<double>> params;
    SheetCurve g2 = resample(g1, Nl, &params);
    VectorXd f2(f1.size());
    for (int li = 0; li < int(g1.loops.size()); ++li) {
      const auto c = fourier_coeffs(VectorXd(f1.segment(li * Nl, Nl)));
      for (int j = 0; j < Nl; ++j)
        f2[li * Nl + j] = eval_trig(c, params[li][j]);
    }
    g1 = std::move(g2);
    f1 = std::move(f2);
  }

  SheetState out;
  out.gamma = std::move(g1);
  out.f = CoVectorVS{std::move(f1)};
  out.theta_plus = thp;  // invariants: stored, never evolved
  out.theta_minus = thm;
  out.t = st.t + dt;
  return out;
}

// --- Pressure recovery -------------------------------------------------------

struct PressureReport {
  VectorXd p_plus, p_minus;      // boundary values at the markers
  VectorXd probe_plus, probe_minus;  // values at offset probe points
  double continuity_residual = 0.0;  // max |p+ - p-| after gauging constants
};

// Bernoulli recovery p± = -d(Phi±)/dt - 1/2 |u±|^2 + c±, with the Eulerian
// potential derivative obtained from short internal integrator steps and the
// moving-marker chain rule. The per-side constants are fixed by the zero-mean
// gauge on p and the continuity requirement (mean of the jump removed); the
// residual reports how far the jump is from a constant.
inline PressureReport recover_pressure(const SheetState& sm, const SheetState& st,
                                       const SheetState& sp, double delta,
                                       const GreenTable& tab,
                                       double probe_offset = 0.05) {
  validate_state(st);
  LayerOperators ops0 = build_operators(st.gamma, tab);
  LayerOperators opsp = build_operators(sp.gamma, tab);
  LayerOperators opsm = build_operators(sm.gamma, tab);
  const FlowField F0 = flow_field(st, ops0);
  const FlowField Fp = flow_field(sp, opsp);
  const FlowField Fm = flow_field(sm, opsm);
  const SheetCurve& g = st.gamma;
  const int N = g.total();

  // full per-side potential trace at marker i (continuous lift of x)
  auto phi_trace = [&](const FlowField& F, const SheetCurve& gc, int i, int side) {
    const int li = gc.loop_of(i), j = gc.local_of(i);
    const auto& h = side > 0 ? F.u.hplus : F.u.hminus;
    double v = h ? h->g[i] : 0.0;
    if (F.u.circ) {
      const double th = side > 0 ? F.u.circ->theta_plus : F.u.circ->theta_minus;
      const auto& ph = side > 0 ? F.u.circ->phi_plus : F.u.circ->phi_minus;
      v += th * gc.loops[li].px[j] + (ph ? ph->g[i] : 0.0);
    }
    return v;
  };

  PressureReport rep;
  rep.p_plus.resize(N);
  rep.p_minus.resize(N);
  for (int i = 0; i < N; ++i) {
    const int li = g.loop_of(i), j = g.local_of(i);
    const Vec2 vel((sp.gamma.loops[li].px[j] - sm.gamma.loops[li].px[j]) / (2 * delta),
                   (sp.gamma.loops[li].py[j] - sm.gamma.loops[li].py[j]) / (2 * delta));
    for (int side : {+1, -1}) {
      const double dmove = (phi_trace(Fp, sp.gamma, i, side) -
                            phi_trace(Fm, sm.gamma, i, side)) / (2 * delta);
      const Vec2 u = F0.u.trace(i, side);
      const double dphidt = dmove - u.dot(vel);
      const double p = -dphidt - 0.5 * u.squaredNorm();
      (side > 0 ? rep.p_plus : rep.p_minus)[i] = p;
    }
  }
  // gauge: remove the weighted mean of the jump (one relative constant), then
  // a common constant so the average pressure is zero
  const double cjump = ops0.w.dot(rep.p_plus - rep.p_minus) / ops0.w.sum();
  rep.p_minus.array() += cjump;
  const double cmean =
      0.5 * ops0.w.dot(rep.p_plus + rep.p_minus) / ops0.w.sum();
  rep.p_plus.array() -= cmean;
  rep.p_minus.array() -= cmean;
  rep.continuity_residual = (rep.p_plus - rep.p_minus).lpNorm<Eigen::Infinity>();

  // interior probes offset from every 8th marker
  std::vector<int> idx;
  for (int i = 0; i < N; i += std::max(1, N / 8)) idx.push_back(i);
  rep.probe_plus.resize(Eigen::Index(idx.size()));
  rep.probe_minus.resize(Eigen::Index(idx.size()));
  auto phi_value = [&](const FlowField& F, const TorusPoint& p, int side,
                       double xlift) {
    const auto& h = side > 0 ? F.u.hplus : F.u.hminus;
    double v = h ? evaluate(*h, p).value : 0.0;
    if (F.u.circ) {
      const double th = side > 0 ? F.u.circ->theta_plus : F.u.circ->theta_minus;
      const auto& ph = side > 0 ? F.u.circ->phi_plus : F.u.circ->phi_minus;
      v += th * xlift + (ph ? evaluate(*ph, p).value : 0.0);
    }
    return v;
  };
  for (std::size_t q = 0; q < idx.size(); ++q) {
    const int i = idx[q];
    for (int side : {+1, -1}) {
      const Vec2 m(g.marker(i).x, g.marker(i).y);
      const Vec2 pv = m - double(side) * probe_offset * g.normal(i);
      const TorusPoint p(pv.x, pv.y);
      if (g.side_of(p) != side) {
        (side > 0 ? rep.probe_plus : rep.probe_minus)[Eigen::Index(q)] =
            std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const double dphidt = (phi_value(Fp, p, side, pv.x) -
                             phi_value(Fm, p, side, pv.x)) / (2 * delta);
      const Vec2 u = F0.u.eval(p, side);
      double pr = -dphidt - 0.5 * u.squaredNorm() - cmean;
      if (side < 0) pr += cjump;
      (side > 0 ? rep.probe_plus : rep.probe_minus)[Eigen::Index(q)] = pr;
    }
  }
  return rep;
}

// Convenience: generate the trajectory samples internally by short steps.
inline PressureReport recover_pressure(const SheetState& st, const GreenTable& tab,
                                       double delta = 5e-4,
                                       double probe_offset = 0.05) {
  validate_state(st);
  StepOptions sopt;
  sopt.filter = false;
  sopt.resample_ratio = 1e300;
  sopt.check_simple = false;
  const SheetState sp = step(st, delta, tab, sopt);
  const SheetState sm = step(st, -delta, tab, sopt);
  return recover_pressure(sm, st, sp, delta, tab, probe_offset);
}

// --- Weak-solution residual --------------------------------------------------

// |d/dt <u, w> - <u, grad_u w>| for each divergence-free test field w, with
// the time derivative by centered differences over the trajectory samples
// (each integrated on its own curve) and the inner products by two-domain
// quadrature. Node evaluations of u are shared across test fields.
inline std::vector<double> weak_residual(const DiscontinuousField& um,
                                         const DiscontinuousField& u0,
                                         const DiscontinuousField& up,
                                         const std::vector<StreamField>& W,
                                         double h,
                                         const QuadratureSpec& spec = {}) {
  struct Sample {
    std::vector<QNode> nodes;
    std::vector<Vec2> uval;
  };
  auto sample = [&](const DiscontinuousField& u) {
    Sample s;
    TwoDomainQuadrature quad(u.gamma, spec);
    s.nodes = quad.nodes();
    s.uval.reserve(s.nodes.size());
    for (const QNode& q : s.nodes) s.uval.push_back(u.eval(q.p, q.side));
    return s;
  };
  const Sample Sm = sample(um), S0 = sample(u0), Sp = sample(up);

  std::vector<double> out;
  out.reserve(W.size());
  for (const StreamField& w : W) {
    auto ip = [&](const Sample& s) {
      double acc = 0.0;
      for (std::size_t k = 0; k < s.nodes.size(); ++k)
        acc += s.nodes[k].w * s.uval[k].dot(w.velocity(s.nodes[k].p));
      return acc;
    };
    const double dIdt = (ip(Sp) - ip(Sm)) / (2.0 * h);
    double adv = 0.0;  // <u, (u . grad) w>
    for (std::size_t k = 0; k < S0.nodes.size(); ++k) {
      const Vec2 u = S0.uval[k];
      adv += S0.nodes[k].w * u.dot(w.jacobian(S0.nodes[k].p).apply(u));
    }
    out.push_back(std::abs(dIdt - adv));
  }
  return out;
}

// --- Kelvin / irrotationality checks -----------------------------------------

struct KelvinReport {
  double max_curl = 0.0;        // centered-difference curl at interior probes
  double period_plus = 0.0;     // x-cycle circulation in D+ (LoopPair)
  double period_minus = 0.0;    // x-cycle circulation in D- (or the only one)
};

inline KelvinReport kelvin_check(const SheetState& st, const LayerOperators& ops,
                                 double probe_offset = 0.05) {
  validate_state(st);
  const FlowField F = flow_field(st, ops);
  const SheetCurve& g = st.gamma;
  const int N = g.total();
  KelvinReport rep;

  auto curl_at = [&](const TorusPoint& p, int side, double h) {
    return (F.u.eval(TorusPoint(p.x + h, p.y), side).y -
            F.u.eval(TorusPoint(p.x - h, p.y), side).y) / (2 * h) -
           (F.u.eval(TorusPoint(p.x, p.y + h), side).x -
            F.u.eval(TorusPoint(p.x, p.y - h), side).x) / (2 * h);
  };
  for (int i = 0; i < N; i += std::max(1, N / 12)) {
    const Vec2 m(g.marker(i).x, g.marker(i).y);
    for (int side : {+1, -1}) {
      const Vec2 pv = m - double(side) * probe_offset * g.normal(i);
      const TorusPoint p(pv.x, pv.y);
      if (g.side_of(p) != side) continue;
      const double c1 = curl_at(p, side, 1e-3);
      const double c2 = curl_at(p, side, 5e-4);
      rep.max_curl = std::max(rep.max_curl, std::abs((4 * c2 - c1) / 3.0));
    }
  }

  // circulation periods around the x-cycle, one horizontal line per side
  auto period_on = [&](double y, int side) {
    const int M = 256;
    double acc = 0.0;
    for (int j = 0; j < M; ++j) {
      const TorusPoint p(double(j) / M, y);
      if (g.side_of(p) != side)
        return std::numeric_limits<double>::quiet_NaN();
      acc += F.u.eval(p, side).x / M;
    }
    return acc;
  };
  if (g.topology == Topology::LoopPair) {
    double ymean0 = 0.0, ymean1 = 0.0;
    const int Nl = g.markers_per_loop();
    for (int j = 0; j < Nl; ++j) {
      ymean0 += g.loops[0].py[j] / Nl;
      ymean1 += g.loops[1].py[j] / Nl;
    }
    rep.period_plus = period_on(0.5 * (ymean0 + ymean1), +1);
    const double gap = 1.0 - (ymean1 - ymean0);
    rep.period_minus = period_on(ymean1 + 0.5 * gap, -1);
  } else {
    // Contractible D+: the x-cycle lies in D-; probe far from the curve
    double best = 0.0, bestd = -1.0;
    for (int j = 0; j < 64; ++j) {
      const double y = (j + 0.5) / 64.0;
      const Projection pr = g.project(TorusPoint(0.0, y));
      if (pr.t > bestd) { bestd = pr.t; best = y; }
    }
    rep.period_plus = 0.0;
    rep.period_minus = period_on(best, -1);
  }
  return rep;
}

}  // namespace sheetflow

#endif  // SHEETFLOW_DYNAMICS_HPP
