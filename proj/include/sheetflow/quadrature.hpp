// sheetflow: high-order quadrature of functions smooth on each side of a
// sheet curve but discontinuous across it.
//
// The integral over T^2 is split by an exact smooth partition of unity built
// from the signed distance t(p) to Gamma:
//   * far part: uniform-grid trapezoid of chi_far * f, where chi_far is a
//     C-infinity bump in |t|/delta — the product is smooth and periodic, so
//     the trapezoid rule is spectrally accurate;
//   * collar part: boundary-fitted (s,t) quadrature of (1-chi_far) * f with
//     Jacobian |c'(s)| (1 -/+ t kappa(s)), trapezoid in s and panelized
//     Gauss-Legendre in t, on each side separately.
#ifndef SHEETFLOW_QUADRATURE_HPP
#define SHEETFLOW_QUADRATURE_HPP

#include "sheetflow/curve.hpp"

namespace sheetflow {

// Gauss-Legendre nodes/weights on [-1,1].
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double xi = std::cos(PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * xi * p1 - j * p2) / (j + 1);
      }
      const double dp = n * (xi * p0 - p1) / (xi * xi - 1.0);
      const double dx = p0 / dp;
      xi -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2 * j + 1) * xi * p1 - j * p2) / (j + 1);
    }
    const double dp = n * (xi * p0 - p1) / (xi * xi - 1.0);
    x[i] = xi;
    w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
}

// C-infinity step: 0 for r<=0, 1 for r>=1.
inline double smooth_step01(double r) {
  if (r <= 0.0) return 0.0;
  if (r >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / r), b = std::exp(-1.0 / (1.0 - r));
  return a / (a + b);
}

struct QuadratureSpec {
  int grid = 256;                 // background grid M x M
  double collar_width = 0.0;      // delta; 0 => auto from geometry
  double transition_start = 0.35; // chi_far == 0 for |t| <= r0*delta
  int gauss_per_panel = 14;
  int s_factor = 2;               // collar s-nodes per marker
};

struct QNode {
  TorusPoint p;
  int side;      // +1 for D+, -1 for D-
  double w;      // quadrature weight
  bool collar;   // true for boundary-fitted nodes
  int loop = 0;  // collar metadata
  double s = 0, t = 0;  // collar foot parameter and signed offset
};

class TwoDomainQuadrature {
 public:
  TwoDomainQuadrature(const SheetCurve& g, QuadratureSpec spec = {})
      : curve_(&g), spec_(spec) {
    double delta = spec.collar_width;
    if (delta <= 0.0) {
      double kmax = 0.0;
      for (int i = 0; i < g.total(); ++i) kmax = std::max(kmax, std::abs(g.curvature(i)));
      delta = std::min(0.06, 0.6 / std::max(kmax, 1e-9));
      if (g.topology == Topology::LoopPair) {
        const auto [h1, h2] = g.strip_heights();
        delta = std::min(delta, 0.35 * std::min(h1, h2));
      } else {
        // keep the two-sided collar clear of the opposite branch
        delta = std::min(delta, 0.25 * g.total_length() / PI);
      }
    }
    delta_ = delta;
    build();
  }

  double delta() const { return delta_; }
  const std::vector<QNode>& nodes() const { return nodes_; }

  template <class F>  // F: (const TorusPoint&, int side) -> double
  double integrate(F&& f) const {
    double acc = 0.0;
    for (const QNode& q : nodes_) acc += q.w * f(q.p, q.side);
    return acc;
  }

 private:
  const SheetCurve* curve_;
  QuadratureSpec spec_;
  double delta_ = 0.05;
  std::vector<QNode> nodes_;

  double chi_far(double abst) const {
    const double r0 = spec_.transition_start;
    return smooth_step01((abst / delta_ - r0) / (1.0 - r0));
  }

  void build() {
    const SheetCurve& g = *curve_;
    const int M = spec_.grid;
    // Far grid (offset to dodge exact curve hits).
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) {
        TorusPoint p((i + 0.5) / M, (j + 0.5) / M);
        Projection pr = g.project(p);
        const double abst = std::abs(pr.t);
        if (abst <= spec_.transition_start * delta_) continue;
        const double w = chi_far(abst) / (double(M) * M);
        if (w <= 0.0) continue;
        nodes_.push_back({p, pr.t < 0 ? +1 : -1, w, false});
      }
    // Collar.
    std::vector<double> gx, gw;
    gauss_legendre(spec_.gauss_per_panel, gx, gw);
    // Panel layout follows the window structure: on [0, r0 delta] the window is
    // identically 1 and the integrand is as smooth as f; the transition band
    // [r0 delta, delta], where the C-infinity bump has large high derivatives,
    // is subdivided so Gauss-Legendre resolves it to near machine accuracy.
    const double tb = spec_.transition_start * delta_;
    std::vector<std::pair<double, double>> panels = {{0.0, tb / 4.0}, {tb / 4.0, tb}};
    const int nt = 4;
    for (int k = 0; k < nt; ++k)
      panels.push_back({tb + (delta_ - tb) * k / nt, tb + (delta_ - tb) * (k + 1) / nt});
    for (int li = 0; li < int(g.loops.size()); ++li) {
      const Loop& l = g.loops[li];
      const int Ms = spec_.s_factor * l.n();
      for (int is = 0; is < Ms; ++is) {
        const double s = double(is) / Ms;
        const Vec2 c = l.position(s);
        const Vec2 dc = l.derivative(s);
        const double L = dc.norm();
        const Vec2 nu = dc.rot_cw() / L;
        const Vec2 d2c = l.second_derivative(s);
        const double kappa = (d2c.dot(nu)) / (L * L);
        for (auto [t0, t1] : panels)
          for (int iq = 0; iq < spec_.gauss_per_panel; ++iq) {
            const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gx[iq];
            const double wt = 0.5 * (t1 - t0) * gw[iq];
            const double cw = 1.0 - chi_far(t);
            if (cw <= 0.0) continue;
            // D- side: p = c + t nu, Jacobian L (1 - t kappa)
            nodes_.push_back({TorusPoint(c.x + t * nu.x, c.y + t * nu.y), -1,
                              cw * wt * L * (1.0 - t * kappa) / Ms, true, li, s, t});
            // D+ side: p = c - t nu, Jacobian L (1 + t kappa)
            nodes_.push_back({TorusPoint(c.x - t * nu.x, c.y - t * nu.y), +1,
                              cw * wt * L * (1.0 + t * kappa) / Ms, true, li, s, -t});
          }
      }
    }
  }
};

// --- Transport identity (moving-interface differentiation) ------------------
// residual = | d/dt int f_t mu - int dR/dt f_t mu - int_Gamma jump(f_t) v_n ds |
// with centered differences of half-width h. Curve families must preserve
// marker labelling across t.
inline double transport_identity_check(const CurveFamily& fam, double t0, double h,
                                       const QuadratureSpec& spec = {}) {
  const SheetCurve g0 = fam.curve(t0);
  const SheetCurve gp = fam.curve(t0 + h);
  const SheetCurve gm = fam.curve(t0 - h);

  auto total = [&](const SheetCurve& g, double t) {
    TwoDomainQuadrature q(g, spec);
    return q.integrate([&](const TorusPoint& p, int side) { return fam.f(p, side, t); });
  };
  const double dIdt = (total(gp, t0 + h) - total(gm, t0 - h)) / (2.0 * h);

  TwoDomainQuadrature q0(g0, spec);
  const double dRdt = q0.integrate([&](const TorusPoint& p, int side) {
    return (fam.f(p, side, t0 + h) - fam.f(p, side, t0 - h)) / (2.0 * h);
  });

  double boundary = 0.0;
  for (int gi = 0; gi < g0.total(); ++gi) {
    const int li = g0.loop_of(gi), j = g0.local_of(gi);
    const Vec2 vel((gp.loops[li].px[j] - gm.loops[li].px[j]) / (2.0 * h),
                   (gp.loops[li].py[j] - gm.loops[li].py[j]) / (2.0 * h));
    const double vn = vel.dot(g0.normal(gi));
    const TorusPoint p = g0.marker(gi);
    const double jump = fam.f(p, +1, t0) - fam.f(p, -1, t0);
    boundary += jump * vn * g0.weight(gi);
  }
  return std::abs(dIdt - dRdt - boundary);
}

}  // namespace sheetflow

#endif  // SHEETFLOW_QUADRATURE_HPP
