// sheetflow: calculus of vector fields discontinuous across a sheet curve.
//
// Fields are represented constructively (spectral stream functions, layer
// densities, circulation coefficients), so each side is divergence-free by
// construction and boundary traces are cheap and spectrally accurate.
//
// On-curve Jacobians of the harmonic parts use a boundary identity: the
// Hessian of a harmonic function is symmetric and traceless, so it is fully
// determined by its action on the tangent, which is the arclength derivative
// of the boundary gradient trace.
#ifndef SHEETFLOW_HODGE_HPP
#define SHEETFLOW_HODGE_HPP

#include <functional>
#include <optional>

#include "sheetflow/potential.hpp"

namespace sheetflow {

struct Mat2 {
  double a = 0, b = 0, c = 0, d = 0;  // [[a, b], [c, d]]
  Vec2 apply(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
};

// Divergence-free field given by a finite trigonometric stream function:
//   psi = sum_m [ c_m cos(2 pi (kx x + ky y)) + s_m sin(...) ],  u = (-psi_y, psi_x).
struct StreamField {
  struct Mode {
    int kx = 0, ky = 0;
    double c = 0, s = 0;
  };
  std::vector<Mode> modes;
  Vec2 uniform;  // additive constant field (zero Jacobian)

  Vec2 velocity(const TorusPoint& p) const {
    Vec2 g = grad_psi(p);
    return Vec2(-g.y, g.x) + uniform;
  }
  Mat2 jacobian(const TorusPoint& p) const {
    double xx = 0, xy = 0, yy = 0;
    for (const Mode& m : modes) {
      const double ph = TWO_PI * (m.kx * p.x + m.ky * p.y);
      const double v = -m.c * std::cos(ph) - m.s * std::sin(ph);  // = -psi contribution
      const double f = TWO_PI * TWO_PI;
      xx += f * m.kx * m.kx * v;
      xy += f * m.kx * m.ky * v;
      yy += f * m.ky * m.ky * v;
    }
    return {-xy, -yy, xx, xy};
  }

 private:
  Vec2 grad_psi(const TorusPoint& p) const {
    Vec2 g;
    for (const Mode& m : modes) {
      const double ph = TWO_PI * (m.kx * p.x + m.ky * p.y);
      const double d = -m.c * std::sin(ph) + m.s * std::cos(ph);
      g.x += TWO_PI * m.kx * d;
      g.y += TWO_PI * m.ky * d;
    }
    return g;
  }
};

// Circulation (cohomology) component on one side of a loop pair:
//   theta * e_x + grad(phi),  phi harmonic with dphi/dn = -theta (e_x . n).
struct CirculationPart {
  double theta_plus = 0, theta_minus = 0;
  std::optional<HarmonicExtension> phi_plus, phi_minus;
};

// A vector field smooth and divergence-free on each side of gamma, stored as a
// sum of constructive parts plus an optional generic evaluator.
class DiscontinuousField {
 public:
  SheetCurve gamma;
  std::optional<StreamField> stream_plus, stream_minus;  // per-side stream parts
  std::optional<HarmonicExtension> hplus, hminus;        // potential part: grad h
  std::optional<CirculationPart> circ;
  std::function<Vec2(const TorusPoint&, int)> generic;   // extra part (no Jacobian)
  std::function<Vec2(int, int)> generic_trace;           // optional boundary limit

  DiscontinuousField() = default;
  explicit DiscontinuousField(const SheetCurve& g) : gamma(g) {}

  void set_shared_stream(const StreamField& s) {
    stream_plus = s;
    stream_minus = s;
  }

  bool has_generic() const { return bool(generic); }

  // Field value at an off-curve point of the given side.
  Vec2 eval(const TorusPoint& p, int side) const {
    Vec2 v;
    const auto& st = side > 0 ? stream_plus : stream_minus;
    if (st) v += st->velocity(p);
    const auto& hx = side > 0 ? hplus : hminus;
    if (hx) v += evaluate(*hx, p).grad;
    if (circ) {
      const double th = side > 0 ? circ->theta_plus : circ->theta_minus;
      v += Vec2(th, 0.0);
      const auto& ph = side > 0 ? circ->phi_plus : circ->phi_minus;
      if (ph) v += evaluate(*ph, p).grad;
    }
    if (generic) v += generic(p, side);
    return v;
  }

  // Boundary limit of the field at marker gi from the given side.
  Vec2 trace(int gi, int side) const {
    ensure_traces(side);
    const auto& tr = side > 0 ? cache_->trp : cache_->trm;
    Vec2 v = tr[gi];
    if (generic_trace)
      v += generic_trace(gi, side);
    else if (generic)
      v += generic(gamma.marker(gi), side);
    return v;
  }

  // Boundary limit of the field Jacobian at marker gi (constructive parts only).
  Mat2 trace_jacobian(int gi, int side) const {
    if (generic)
      throw domain_error_sf("trace_jacobian: generic field part has no Jacobian");
    ensure_traces(side);
    const auto& J = side > 0 ? cache_->jacp : cache_->jacm;
    Mat2 out = J[gi];
    const auto& st = side > 0 ? stream_plus : stream_minus;
    if (st) out = out + st->jacobian(gamma.marker(gi));
    return out;
  }

  // Max discrepancy of the normal trace across the curve (DSVect membership).
  double max_normal_jump() const {
    double m = 0.0;
    for (int i = 0; i < gamma.total(); ++i) {
      const Vec2 nu = gamma.normal(i);
      m = std::max(m, std::abs((trace(i, +1) - trace(i, -1)).dot(nu)));
    }
    return m;
  }

 private:
  struct Cache {
    bool done[2] = {false, false};
    std::vector<Vec2> trp, trm;   // harmonic+stream traces per marker
    std::vector<Mat2> jacp, jacm; // harmonic-part Jacobians per marker
  };
  mutable std::shared_ptr<Cache> cache_;

  // Gradient trace of the harmonic parts at all markers of one side, from the
  // stored boundary data (value trace g and normal density psi).
  void harmonic_grad_trace(int side, std::vector<Vec2>& out) const {
    const int N = gamma.total(), Nl = gamma.markers_per_loop();
    out.assign(N, Vec2());
    auto add_ext = [&](const HarmonicExtension& e) {
      for (int li = 0; li < int(gamma.loops.size()); ++li) {
        VectorXd gl = e.g.segment(li * Nl, Nl);
        const VectorXd gs = spectral_derivative(gl);
        for (int j = 0; j < Nl; ++j) {
          const int gi = li * Nl + j;
          const double L = gamma.speed(gi);
          const Vec2 n = double(side) * gamma.normal(gi);
          out[gi] += e.psi[gi] * n + (gs[j] / L) * gamma.tangent(gi);
        }
      }
    };
    const auto& hx = side > 0 ? hplus : hminus;
    if (hx) add_ext(*hx);
    if (circ) {
      const auto& ph = side > 0 ? circ->phi_plus : circ->phi_minus;
      if (ph) add_ext(*ph);
    }
  }

  void ensure_traces(int side) const {
    if (!cache_) cache_ = std::make_shared<Cache>();
    const int idx = side > 0 ? 0 : 1;
    if (cache_->done[idx]) return;
    const int N = gamma.total(), Nl = gamma.markers_per_loop();
    std::vector<Vec2> harm;
    harmonic_grad_trace(side, harm);

    std::vector<Vec2>& tr = side > 0 ? cache_->trp : cache_->trm;
    std::vector<Mat2>& jc = side > 0 ? cache_->jacp : cache_->jacm;
    tr.assign(N, Vec2());
    jc.assign(N, Mat2());

    // Jacobian of the harmonic parts: d/ds of the gradient trace gives H tau;
    // with H = [[a, b], [b, -a]] (symmetric traceless) this determines H.
    for (int li = 0; li < int(gamma.loops.size()); ++li) {
      VectorXd hx(Nl), hy(Nl);
      for (int j = 0; j < Nl; ++j) {
        hx[j] = harm[li * Nl + j].x;
        hy[j] = harm[li * Nl + j].y;
      }
      const VectorXd dhx = spectral_derivative(hx);
      const VectorXd dhy = spectral_derivative(hy);
      for (int j = 0; j < Nl; ++j) {
        const int gi = li * Nl + j;
        const double L = gamma.speed(gi);
        const Vec2 t = gamma.tangent(gi);
        const Vec2 Ht(dhx[j] / L, dhy[j] / L);
        const double a = Ht.x * t.x - Ht.y * t.y;
        const double b = Ht.x * t.y + Ht.y * t.x;
        jc[gi] = {a, b, b, -a};
      }
    }
    for (int gi = 0; gi < N; ++gi) {
      Vec2 v = harm[gi];
      const auto& st = side > 0 ? stream_plus : stream_minus;
      if (st) v += st->velocity(gamma.marker(gi));
      if (circ) v += Vec2(side > 0 ? circ->theta_plus : circ->theta_minus, 0.0);
      tr[gi] = v;
    }
    cache_->done[idx] = true;
  }
};

// Anchor map: the normal flux form (u . nu) ds at the markers (zero mean).
inline TangentVS anchor(const DiscontinuousField& u) {
  const int N = u.gamma.total();
  VectorXd xi(N);
  for (int i = 0; i < N; ++i)
    xi[i] = u.trace(i, +1).dot(u.gamma.normal(i)) * u.gamma.weight(i);
  return TangentVS::make(xi);
}

// --- Singular Hodge projection ----------------------------------------------

struct TwoSidedField {
  std::function<Vec2(const TorusPoint&, int)> eval;
  std::function<Vec2(int, int)> trace;  // optional boundary limit at marker
};

inline TwoSidedField as_two_sided(const DiscontinuousField& u) {
  TwoSidedField w;
  w.eval = [u](const TorusPoint& p, int side) { return u.eval(p, side); };
  w.trace = [u](int gi, int side) { return u.trace(gi, side); };
  return w;
}

struct HodgeProjection {
  DiscontinuousField v;                 // component with continuous normal trace
  HarmonicExtension grad_plus, grad_minus;  // w = v + grad(these)
};

// Decompose a per-side divergence-free field w into v + grad s with v having
// a continuous normal trace and s± a single layer potential (s+ = s- on the
// curve): f = jump of (w . nu), s = single layer of f, v = w - grad s.
inline HodgeProjection project_hodge(const TwoSidedField& w, const LayerOperators& ops) {
  const SheetCurve& g = ops.curve;
  const int N = g.total();

  // precondition: divergence-free on both sides. Probed away from the curve
  // with Richardson-extrapolated centered differences, so smooth fields with
  // large near-curve derivatives are not falsely rejected.
  {
    double maxdiv = 0.0;
    const double off = 0.04;
    auto div_at = [&](const TorusPoint& p, int side, double h) {
      return (w.eval(TorusPoint(p.x + h, p.y), side).x -
              w.eval(TorusPoint(p.x - h, p.y), side).x) / (2 * h) +
             (w.eval(TorusPoint(p.x, p.y + h), side).y -
              w.eval(TorusPoint(p.x, p.y - h), side).y) / (2 * h);
    };
    for (int i = 0; i < N; i += std::max(1, N / 8)) {
      const TorusPoint m = g.marker(i);
      const Vec2 nu = g.normal(i);
      for (int side : {+1, -1}) {
        const Vec2 p0 = Vec2(m.x, m.y) - double(side) * off * nu;
        const TorusPoint p(p0.x, p0.y);
        if (g.side_of(p) != side) continue;
        const double d1 = div_at(p, side, 1e-3);
        const double d2 = div_at(p, side, 5e-4);
        maxdiv = std::max(maxdiv, std::abs((4.0 * d2 - d1) / 3.0));
      }
    }
    if (maxdiv > 5e-2)
      throw domain_error_sf("project_hodge: input not divergence-free (max divergence " +
                            std::to_string(maxdiv) + ")");
  }

  auto wtrace = [&](int i, int side) {
    return w.trace ? w.trace(i, side) : w.eval(g.marker(i), side);
  };
  VectorXd f(N);
  for (int i = 0; i < N; ++i)
    f[i] = (wtrace(i, +1) - wtrace(i, -1)).dot(g.normal(i));
  // the normal jump of a per-side divergence-free field integrates to zero;
  // remove the tiny numerical mean so the layer solve is well-posed
  f.array() -= ops.w.dot(f) / ops.w.sum();
  SingleLayer sl = single_layer(g, f, ops);

  HodgeProjection out;
  out.grad_plus = sl.plus;
  out.grad_minus = sl.minus;
  out.v = DiscontinuousField(g);
  // v = w - grad s, stored as the generic part plus negated layer extensions
  out.v.hplus = HarmonicExtension(+1, sl.plus.curve, sl.plus.table, -sl.plus.g,
                                  -sl.plus.psi, -sl.plus.c0);
  out.v.hminus = HarmonicExtension(-1, sl.minus.curve, sl.minus.table, -sl.minus.g,
                                   -sl.minus.psi, -sl.minus.c0);
  out.v.generic = w.eval;
  out.v.generic_trace = w.trace;
  return out;
}

// --- Algebroid bracket compensation check -----------------------------------

using Section = std::function<DiscontinuousField(const SheetCurve&)>;

// Evaluates the three terms of the bracket of sections at the markers of
// gamma and returns the maximum normal jump of their sum (which cancels for a
// genuine algebroid bracket up to O(eps^2) finite-difference error).
inline double bracket_compensation(const Section& U, const Section& V,
                                   const SheetCurve& gamma, double eps) {
  DiscontinuousField U0 = U(gamma);
  DiscontinuousField V0 = V(gamma);
  const TangentVS xiU = anchor(U0);
  const TangentVS xiV = anchor(V0);
  const int N = gamma.total();

  // Gamma-derivative of a section along xi, traced at the (moving) markers:
  // d/dt [S(Gamma_t) at marker_t] - J_{S(Gamma)} . marker velocity.
  auto gamma_derivative = [&](const Section& S, const DiscontinuousField& S0,
                              const TangentVS& xi, std::vector<Vec2> out[2]) {
    const SheetCurve gp = deform(gamma, xi, eps);
    const SheetCurve gm = deform(gamma, xi, -eps);
    DiscontinuousField Sp = S(gp);
    DiscontinuousField Sm = S(gm);
    for (int side : {+1, -1}) {
      auto& o = out[side > 0 ? 0 : 1];
      o.assign(N, Vec2());
      for (int i = 0; i < N; ++i) {
        const Vec2 cdot = (xi.xi[i] / gamma.weight(i)) * gamma.normal(i);
        const Vec2 dmove = (Sp.trace(i, side) - Sm.trace(i, side)) / (2.0 * eps);
        o[i] = dmove - S0.trace_jacobian(i, side).apply(cdot);
      }
    }
  };

  std::vector<Vec2> dUV[2], dVU[2];
  gamma_derivative(V, V0, xiU, dUV);
  gamma_derivative(U, U0, xiV, dVU);

  double residual = 0.0;
  for (int i = 0; i < N; ++i) {
    const Vec2 nu = gamma.normal(i);
    Vec2 jump;
    for (int side : {+1, -1}) {
      const int idx = side > 0 ? 0 : 1;
      const Vec2 u = U0.trace(i, side), v = V0.trace(i, side);
      // regularized Lie bracket [u, v] = J_v u - J_u v on this side
      const Vec2 lie = V0.trace_jacobian(i, side).apply(u) -
                       U0.trace_jacobian(i, side).apply(v);
      const Vec2 total = lie + dUV[idx][i] - dVU[idx][i];
      jump += double(side) * total;
    }
    residual = std::max(residual, std::abs(jump.dot(nu)));
  }
  return residual;
}

// --- Tangent-space compatibility of a trajectory ----------------------------

using FieldFamily = std::function<DiscontinuousField(double)>;

// Residual of the tangent-space relation: the normal jump of the covariant
// time derivative of u must equal the Lie derivative of the sheet velocity
// form along the tangential jump of u. Returned in density units (per
// arclength), max over markers.
inline double tangent_compatibility(const FieldFamily& u_t, double t0, double h) {
  DiscontinuousField u0 = u_t(t0);
  DiscontinuousField up = u_t(t0 + h);
  DiscontinuousField um = u_t(t0 - h);
  const SheetCurve& g = u0.gamma;
  const int N = g.total(), Nl = g.markers_per_loop();

  // marker velocities and normal sheet velocity (density)
  std::vector<Vec2> vel(N);
  VectorXd rho(N);
  for (int i = 0; i < N; ++i) {
    const int li = g.loop_of(i), j = g.local_of(i);
    vel[i] = Vec2((up.gamma.loops[li].px[j] - um.gamma.loops[li].px[j]) / (2 * h),
                  (up.gamma.loops[li].py[j] - um.gamma.loops[li].py[j]) / (2 * h));
    rho[i] = vel[i].dot(g.normal(i));
  }

  // tangential jump of u and its pairing with rho
  VectorXd jpar(N);
  for (int i = 0; i < N; ++i)
    jpar[i] = (u0.trace(i, +1) - u0.trace(i, -1)).dot(g.tangent(i));

  // Lie derivative of the form rho ds along (jpar) d/darc: d/darc (rho jpar)
  VectorXd lhs_rhs(N);
  for (int li = 0; li < int(g.loops.size()); ++li) {
    VectorXd prod(Nl);
    for (int j = 0; j < Nl; ++j) prod[j] = rho[li * Nl + j] * jpar[li * Nl + j];
    const VectorXd dp = spectral_derivative(prod);
    for (int j = 0; j < Nl; ++j)
      lhs_rhs[li * Nl + j] = dp[j] / g.speed(li * Nl + j);
  }

  // normal jump of the covariant derivative of u (moving-marker chain rule)
  double residual = 0.0;
  for (int i = 0; i < N; ++i) {
    double jn = 0.0;
    for (int side : {+1, -1}) {
      const Vec2 dmove = (up.trace(i, side) - um.trace(i, side)) / (2.0 * h);
      const Vec2 v = dmove - u0.trace_jacobian(i, side).apply(vel[i]);
      jn += double(side) * v.dot(g.normal(i));
    }
    residual = std::max(residual, std::abs(jn - lhs_rhs[i]));
  }
  return residual;
}

}  // namespace sheetflow

#endif  // SHEETFLOW_HODGE_HPP
