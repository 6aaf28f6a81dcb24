// sheetflow: discrete vortex-sheet curves on the torus, tangent/cotangent
// representations, deformation, resampling, and the transport identity check.
//
// Conventions:
//   * Each loop is parametrized so that D+ lies on the LEFT of the tangent;
//     the coorientation normal is nu = (tau_y, -tau_x) (rotate tangent by -90),
//     which makes nu the OUTWARD normal of D+ (pointing into D-).
//   * A TangentVS entry xi_j is the normal flux density (v . nu) ds at marker j;
//     positive xi moves the curve along nu, i.e. expands D+.
//   * Marker positions are stored as lifted real coordinates; position(s) =
//     winding * s + periodic part, sampled at s_j = j/N.
#ifndef SHEETFLOW_CURVE_HPP
#define SHEETFLOW_CURVE_HPP

#include <functional>
#include <memory>
#include <optional>
#include <sstream>

#include "sheetflow/green.hpp"
#include "sheetflow/torus.hpp"

namespace sheetflow {

enum class Topology { Contractible, LoopPair };

struct self_intersection_error : std::runtime_error {
  Vec2 where;
  explicit self_intersection_error(const Vec2& w)
      : std::runtime_error("curve self-intersection near (" + std::to_string(w.x) +
                           ", " + std::to_string(w.y) + ")"),
        where(w) {}
};

// One closed loop: lifted marker coordinates plus spectral caches.
struct Loop {
  VectorXd px, py;          // lifted positions at s_j = j/N
  double wx = 0, wy = 0;    // winding numbers (integers)
  // caches (filled by SheetCurve::finalize):
  std::vector<dcomplex> cx, cy;  // Fourier coeffs of periodic parts
  VectorXd tx, ty;          // unit tangent
  VectorXd nx, ny;          // coorientation normal (D+ outward)
  VectorXd speed;           // |c'(s_j)| (parameter derivative)
  VectorXd weight;          // arclength quadrature weight = speed/N
  VectorXd curv;            // signed curvature  (c'' . nu)/|c'|^2
  double length = 0;

  int n() const { return int(px.size()); }
  Vec2 lifted(int j) const { return {px[j], py[j]}; }
  TorusPoint point(int j) const { return TorusPoint(px[j], py[j]); }

  // Evaluate position and first two derivatives at parameter s in one pass
  // (complex-rotation recurrence over the Fourier bins; Nyquist kept only in
  // the position, as a pure cosine).
  void eval_all(double s, Vec2* pos, Vec2* d1, Vec2* d2) const {
    const std::size_t n = cx.size();
    dcomplex px_acc = cx[0], py_acc = cy[0];
    dcomplex dx1(0, 0), dy1(0, 0), dx2(0, 0), dy2(0, 0);
    const dcomplex rot(std::cos(TWO_PI * s), std::sin(TWO_PI * s));
    dcomplex e = rot;
    for (std::size_t k = 1; k <= n / 2; ++k, e *= rot) {
      if (2 * k == n) {
        if (pos) {
          const double cN = std::cos(TWO_PI * 0.5 * double(n) * s);
          px_acc += cx[k] * cN;
          py_acc += cy[k] * cN;
        }
        break;
      }
      const dcomplex ax = cx[k] * e, ay = cy[k] * e;
      px_acc += 2.0 * ax.real();
      py_acc += 2.0 * ay.real();
      const dcomplex iw(0.0, TWO_PI * double(k));
      if (d1 || d2) {
        const dcomplex bx = iw * ax, by = iw * ay;
        dx1 += 2.0 * bx.real();
        dy1 += 2.0 * by.real();
        if (d2) {
          dx2 += 2.0 * (iw * bx).real();
          dy2 += 2.0 * (iw * by).real();
        }
      }
    }
    if (pos) *pos = {wx * s + px_acc.real(), wy * s + py_acc.real()};
    if (d1) *d1 = {wx + dx1.real(), wy + dy1.real()};
    if (d2) *d2 = {dx2.real(), dy2.real()};
  }

  // Spectral evaluation at arbitrary parameter s (lifted coordinates).
  Vec2 position(double s) const {
    Vec2 p;
    eval_all(s, &p, nullptr, nullptr);
    return p;
  }
  Vec2 derivative(double s) const {
    Vec2 d;
    eval_all(s, nullptr, &d, nullptr);
    return d;
  }
  Vec2 second_derivative(double s) const {
    Vec2 d;
    eval_all(s, nullptr, nullptr, &d);
    return d;
  }
  Vec2 unit_tangent(double s) const {
    Vec2 d = derivative(s);
    return d / d.norm();
  }
  Vec2 unit_normal(double s) const { return unit_tangent(s).rot_cw(); }
};

// Nearest-point projection result.
struct Projection {
  int loop = 0;
  double s = 0;         // parameter of the foot point
  double t = 0;         // signed distance: positive on the D- side (along +nu)
  Vec2 foot;            // lifted foot-point coordinates (chart near p)
  Vec2 normal;          // unit normal at the foot
  double speed = 1;     // |c'(s)|
};

class SheetCurve {
 public:
  Topology topology = Topology::Contractible;
  std::vector<Loop> loops;

  int markers_per_loop() const { return loops.empty() ? 0 : loops[0].n(); }
  int total() const {
    int t = 0;
    for (auto& l : loops) t += l.n();
    return t;
  }
  int loop_of(int gi) const { return gi / markers_per_loop(); }
  int local_of(int gi) const { return gi % markers_per_loop(); }
  TorusPoint marker(int gi) const {
    return loops[loop_of(gi)].point(local_of(gi));
  }
  Vec2 normal(int gi) const {
    const Loop& l = loops[loop_of(gi)];
    int j = local_of(gi);
    return {l.nx[j], l.ny[j]};
  }
  Vec2 tangent(int gi) const {
    const Loop& l = loops[loop_of(gi)];
    int j = local_of(gi);
    return {l.tx[j], l.ty[j]};
  }
  double weight(int gi) const { return loops[loop_of(gi)].weight[local_of(gi)]; }
  double speed(int gi) const { return loops[loop_of(gi)].speed[local_of(gi)]; }
  double curvature(int gi) const { return loops[loop_of(gi)].curv[local_of(gi)]; }

  VectorXd weights() const {
    VectorXd w(total());
    for (int i = 0; i < total(); ++i) w[i] = weight(i);
    return w;
  }
  double total_length() const {
    double L = 0;
    for (auto& l : loops) L += l.length;
    return L;
  }

  // Area of D+ (contractible: enclosed area; LoopPair: strip area in (0,1)).
  double area_plus() const { return area_; }
  std::pair<double, double> strip_heights() const { return {area_, 1.0 - area_}; }

  // Recompute all caches from marker positions; validates simplicity if asked.
  void finalize(bool check_simple = true) {
    locator_.reset();
    for (auto& l : loops) {
      const int n = l.n();
      VectorXd perx(n), pery(n);
      for (int j = 0; j < n; ++j) {
        const double s = double(j) / n;
        perx[j] = l.px[j] - l.wx * s;
        pery[j] = l.py[j] - l.wy * s;
      }
      l.cx = fourier_coeffs(perx);
      l.cy = fourier_coeffs(pery);
      VectorXd dx = spectral_derivative(perx), dy = spectral_derivative(pery);
      VectorXd d2x = spectral_derivative(perx, 2), d2y = spectral_derivative(pery, 2);
      l.tx.resize(n); l.ty.resize(n); l.nx.resize(n); l.ny.resize(n);
      l.speed.resize(n); l.weight.resize(n); l.curv.resize(n);
      l.length = 0;
      for (int j = 0; j < n; ++j) {
        Vec2 d(l.wx + dx[j], l.wy + dy[j]);
        const double sp = d.norm();
        if (sp <= 0) throw domain_error_sf("degenerate parametrization");
        l.speed[j] = sp;
        l.weight[j] = sp / n;
        l.tx[j] = d.x / sp;
        l.ty[j] = d.y / sp;
        Vec2 nu = Vec2(d.x, d.y).rot_cw() / sp;
        l.nx[j] = nu.x;
        l.ny[j] = nu.y;
        l.curv[j] = (d2x[j] * nu.x + d2y[j] * nu.y) / (sp * sp);
        l.length += l.weight[j];
      }
    }
    compute_area();
    if (check_simple) check_simplicity();
  }

  // Signed distance / nearest point. Sign is positive on the D- side.
  Projection project(const TorusPoint& p) const {
    ensure_locator();
    Projection best = locator_->nearest(p);
    const Loop& l = loops[best.loop];
    // Lift p into the chart of the nearest marker.
    Vec2 c0 = l.position(best.s);
    Vec2 d0 = displacement(p, TorusPoint(c0.x, c0.y));
    Vec2 plift = c0 + d0;
    double s = best.s;
    for (int it = 0; it < 12; ++it) {
      Vec2 c, dc, d2c;
      l.eval_all(s, &c, &dc, &d2c);
      Vec2 e = plift - c;
      const double phi = e.dot(dc);
      const double dphi = -dc.squaredNorm() + e.dot(d2c);
      double step = -phi / dphi;
      if (!std::isfinite(step)) break;
      if (step > 0.5 / l.n()) step = 0.5 / l.n();
      if (step < -0.5 / l.n()) step = -0.5 / l.n();
      s += step;
      if (std::abs(step) < 1e-14) break;
    }
    Vec2 c, dc;
    l.eval_all(s, &c, &dc, nullptr);
    Vec2 nu = dc.rot_cw() / dc.norm();
    Vec2 e = plift - c;
    best.s = s - std::floor(s);
    best.t = e.dot(nu);
    best.foot = c;
    best.normal = nu;
    best.speed = dc.norm();
    return best;
  }

  // +1 for D+, -1 for D-.
  int side_of(const TorusPoint& p) const {
    return project(p).t < 0.0 ? +1 : -1;
  }

 private:
  double area_ = 0;

  // Dense presample of the curve with a uniform spatial hash, for fast
  // nearest-point queries (built lazily; curves are immutable after finalize).
  struct Locator {
    struct Sample { Vec2 pos; int loop; double s; };
    std::vector<Sample> samples;
    std::vector<std::vector<int>> buckets;
    int G = 32;
    double max_gap = 0;  // max distance between consecutive presamples

    Projection nearest(const TorusPoint& p) const {
      const int cx = int(std::floor(p.x * G)) % G;
      const int cy = int(std::floor(p.y * G)) % G;
      Projection best;
      double bestd = 1e300;
      // search growing Chebyshev rings of cells; any unsearched cell after
      // ring r only contains points at distance >= (r-1)/G from p
      for (int ring = 0; ring < G; ++ring) {
        for (int ox = -ring; ox <= ring; ++ox)
          for (int oy = -ring; oy <= ring; ++oy) {
            if (std::max(std::abs(ox), std::abs(oy)) != ring) continue;
            const int cc = ((cy + oy + G * 8) % G) * G + (cx + ox + G * 8) % G;
            for (int idx : buckets[cc]) {
              const Sample& sm = samples[idx];
              const double d =
                  torus_distance(p, TorusPoint(sm.pos.x, sm.pos.y));
              if (d < bestd) {
                bestd = d;
                best.loop = sm.loop;
                best.s = sm.s;
              }
            }
          }
        if (bestd < 1e200 && bestd <= (double(ring) - 1.0) / G) break;
      }
      return best;
    }
  };
  mutable std::shared_ptr<const Locator> locator_;

  void ensure_locator() const {
    if (locator_) return;
    auto loc = std::make_shared<Locator>();
    int ntot = 0;
    for (auto& l : loops) ntot += l.n();
    const int factor = 4;
    loc->G = std::max(8, std::min(128, int(std::sqrt(double(ntot * factor)))));
    loc->buckets.assign(loc->G * loc->G, {});
    for (int li = 0; li < int(loops.size()); ++li) {
      const Loop& l = loops[li];
      const int m = factor * l.n();
      Vec2 prev;
      for (int j = 0; j < m; ++j) {
        const double s = double(j) / m;
        Vec2 pos = l.position(s);
        loc->samples.push_back({pos, li, s});
        const int idx = int(loc->samples.size()) - 1;
        const int bx = int(std::floor(wrap01(pos.x) * loc->G)) % loc->G;
        const int by = int(std::floor(wrap01(pos.y) * loc->G)) % loc->G;
        loc->buckets[by * loc->G + bx].push_back(idx);
        if (j > 0) loc->max_gap = std::max(loc->max_gap, (pos - prev).norm());
        prev = pos;
      }
    }
    locator_ = std::move(loc);
  }

  void compute_area() {
    // area(D+) = - oint y dx over the cooriented boundary (D+ on the left).
    double a = 0;
    for (auto& l : loops) {
      const int n = l.n();
      VectorXd perx(n);
      for (int j = 0; j < n; ++j) perx[j] = l.px[j] - l.wx * double(j) / n;
      VectorXd dx = spectral_derivative(perx);
      for (int j = 0; j < n; ++j) a -= l.py[j] * (l.wx + dx[j]) / n;
    }
    if (topology == Topology::LoopPair) {
      a -= std::floor(a);
      if (a == 0.0) a = 1.0;
    }
    area_ = a;
  }

  static bool segments_cross(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                             const Vec2& b1, Vec2& where) {
    auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
      return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    };
    const double o1 = orient(a0, a1, b0), o2 = orient(a0, a1, b1);
    const double o3 = orient(b0, b1, a0), o4 = orient(b0, b1, a1);
    if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0))) {
      const double t = o1 / (o1 - o2);
      where = b0 + t * (b1 - b0);
      return true;
    }
    return false;
  }

  void check_simplicity() const {
    // Broad phase: hash segment midpoints into a uniform grid.
    struct Seg { Vec2 a, b; int loop, idx; };
    std::vector<Seg> segs;
    double maxlen = 0;
    for (int li = 0; li < int(loops.size()); ++li) {
      const Loop& l = loops[li];
      const int n = l.n();
      for (int j = 0; j < n; ++j) {
        Vec2 a = l.lifted(j);
        Vec2 b = (j + 1 < n) ? l.lifted(j + 1)
                             : l.lifted(0) + Vec2(l.wx, l.wy);
        segs.push_back({a, b, li, j});
        maxlen = std::max(maxlen, (b - a).norm());
      }
    }
    const int G = std::max(4, std::min(256, int(0.5 / std::max(maxlen, 1e-6))));
    std::vector<std::vector<int>> cells(G * G);
    auto cell_of = [&](const Vec2& m) {
      int cx = int(std::floor(wrap01(m.x) * G)) % G;
      int cy = int(std::floor(wrap01(m.y) * G)) % G;
      return cy * G + cx;
    };
    for (int i = 0; i < int(segs.size()); ++i)
      cells[cell_of(0.5 * (segs[i].a + segs[i].b))].push_back(i);
    for (int i = 0; i < int(segs.size()); ++i) {
      const Vec2 mi = 0.5 * (segs[i].a + segs[i].b);
      int cx = int(std::floor(wrap01(mi.x) * G)) % G;
      int cy = int(std::floor(wrap01(mi.y) * G)) % G;
      for (int ox = -1; ox <= 1; ++ox)
        for (int oy = -1; oy <= 1; ++oy) {
          const int cc = ((cy + oy + G) % G) * G + (cx + ox + G) % G;
          for (int k : cells[cc]) {
            if (k <= i) continue;
            const Seg &A = segs[i], &B = segs[k];
            if (A.loop == B.loop) {
              const int n = loops[A.loop].n();
              const int d = std::abs(A.idx - B.idx);
              if (d <= 1 || d == n - 1) continue;  // adjacent segments share a point
            }
            // Bring B into A's chart via min-image of the midpoint offset.
            const Vec2 mb = 0.5 * (B.a + B.b);
            const Vec2 off(wrap_half(mb.x - mi.x) - (mb.x - mi.x),
                           wrap_half(mb.y - mi.y) - (mb.y - mi.y));
            Vec2 w;
            if (segments_cross(A.a, A.b, B.a + off, B.b + off, w))
              throw self_intersection_error(Vec2(wrap01(w.x), wrap01(w.y)));
          }
        }
    }
  }
};

// --- Tangent and cotangent representations ---------------------------------

// Zero-mean normal flux density per marker.
struct TangentVS {
  VectorXd xi;
  static TangentVS make(VectorXd v) {
    v.array() -= v.mean();
    return TangentVS{std::move(v)};
  }
  void require_zero_mean(double tol = 1e-10) const {
    if (std::abs(xi.sum()) > tol * std::max(1.0, xi.cwiseAbs().maxCoeff()))
      throw constraint_error("TangentVS: zero-mean constraint violated");
  }
};

// Function on Gamma modulo one shared additive constant.
struct CoVectorVS {
  VectorXd f;
};

// --- Builders ---------------------------------------------------------------

inline SheetCurve make_circle(Vec2 center, double radius, int N) {
  SheetCurve c;
  c.topology = Topology::Contractible;
  Loop l;
  l.px.resize(N); l.py.resize(N);
  for (int j = 0; j < N; ++j) {
    const double th = TWO_PI * j / N;  // CCW => D+ (disk) on the left
    l.px[j] = center.x + radius * std::cos(th);
    l.py[j] = center.y + radius * std::sin(th);
  }
  c.loops.push_back(std::move(l));
  c.finalize();
  return c;
}

// Radial perturbation r(s) = radius*(1 + sum_k amp_k cos(2 pi k s + phase_k)).
inline SheetCurve make_perturbed_circle(Vec2 center, double radius, int N,
                                        const std::vector<std::tuple<int, double, double>>& modes) {
  SheetCurve c;
  c.topology = Topology::Contractible;
  Loop l;
  l.px.resize(N); l.py.resize(N);
  for (int j = 0; j < N; ++j) {
    const double s = double(j) / N;
    double r = 1.0;
    for (auto& [k, amp, ph] : modes) r += amp * std::cos(TWO_PI * k * s + ph);
    r *= radius;
    l.px[j] = center.x + r * std::cos(TWO_PI * s);
    l.py[j] = center.y + r * std::sin(TWO_PI * s);
  }
  c.loops.push_back(std::move(l));
  c.finalize();
  return c;
}

// Two horizontal loops y = h1(x) (bottom, +x direction) and y = h2(x)
// (top, -x direction); D+ = strip between them, nu outward of D+.
inline SheetCurve make_loop_pair(const std::function<double(double)>& h_bottom,
                                 const std::function<double(double)>& h_top, int N) {
  SheetCurve c;
  c.topology = Topology::LoopPair;
  Loop bot, top;
  bot.px.resize(N); bot.py.resize(N); bot.wx = 1;
  top.px.resize(N); top.py.resize(N); top.wx = -1;
  for (int j = 0; j < N; ++j) {
    const double s = double(j) / N;
    bot.px[j] = s;
    bot.py[j] = h_bottom(s);
    top.px[j] = -s;           // lifted; reduces to x = 1 - s
    top.py[j] = h_top(wrap01(-s));
  }
  c.loops.push_back(std::move(bot));
  c.loops.push_back(std::move(top));
  c.finalize();
  return c;
}

inline SheetCurve make_flat_pair(double y_bottom, double y_top, int N) {
  return make_loop_pair([=](double) { return y_bottom; },
                        [=](double) { return y_top; }, N);
}

// Generic builder from per-loop marker lists (torus coordinates, consecutive
// markers assumed closer than 1/2 so the lift is unambiguous).
inline SheetCurve build_curve(Topology topo,
                              const std::vector<std::vector<Vec2>>& marker_loops) {
  SheetCurve c;
  c.topology = topo;
  const std::size_t expect = (topo == Topology::Contractible) ? 1 : 2;
  if (marker_loops.size() != expect)
    throw domain_error_sf("build_curve: wrong number of loops for topology");
  for (auto& pts : marker_loops) {
    const int n = int(pts.size());
    if (n < 16) throw domain_error_sf("build_curve: need at least 16 markers");
    Loop l;
    l.px.resize(n); l.py.resize(n);
    double x = pts[0].x, y = pts[0].y;
    l.px[0] = x; l.py[0] = y;
    for (int j = 1; j < n; ++j) {
      x += wrap_half(pts[j].x - pts[j - 1].x);
      y += wrap_half(pts[j].y - pts[j - 1].y);
      l.px[j] = x; l.py[j] = y;
    }
    l.wx = std::round(x + wrap_half(pts[0].x - pts[n - 1].x) - l.px[0]);
    l.wy = std::round(y + wrap_half(pts[0].y - pts[n - 1].y) - l.py[0]);
    c.loops.push_back(std::move(l));
  }
  if (topo == Topology::LoopPair) {
    const Loop &a = c.loops[0], &b = c.loops[1];
    if (std::abs(a.wx) + std::abs(a.wy) == 0 || a.wx != -b.wx || a.wy != -b.wy)
      throw domain_error_sf("build_curve: LoopPair loops must wind oppositely in the same class");
  }
  c.finalize();
  return c;
}

// --- Operations -------------------------------------------------------------

inline SheetCurve deform(const SheetCurve& g, const TangentVS& xi, double dt,
                         bool check_simple = true) {
  xi.require_zero_mean(1e-8);
  if (xi.xi.size() != g.total())
    throw constraint_error("deform: size mismatch");
  SheetCurve out = g;
  int gi = 0;
  for (auto& l : out.loops)
    for (int j = 0; j < l.n(); ++j, ++gi) {
      const double vn = xi.xi[gi] / g.weight(gi);
      l.px[j] += vn * dt * l.nx[j];
      l.py[j] += vn * dt * l.ny[j];
    }
  try {
    out.finalize(check_simple);
  } catch (const self_intersection_error&) {
    throw;  // caller still holds the pre-collision curve g
  }
  return out;
}

// Move markers by a full displacement field (used by integrators; normal-only
// motion is the dynamics convention, this helper applies given displacements).
inline SheetCurve displace_markers(const SheetCurve& g, const VectorXd& dx,
                                   const VectorXd& dy, bool check_simple = false) {
  SheetCurve out = g;
  int gi = 0;
  for (auto& l : out.loops)
    for (int j = 0; j < l.n(); ++j, ++gi) {
      l.px[j] += dx[gi];
      l.py[j] += dy[gi];
    }
  out.finalize(check_simple);
  return out;
}

// Redistributes markers to uniform arclength. If params_out is given it
// receives, per loop, the old-curve parameter of each new marker (so marker
// values can be transported by trigonometric interpolation).
inline SheetCurve resample(const SheetCurve& g, int Nnew,
                           std::vector<std::vector<double>>* params_out = nullptr) {
  if (Nnew < 16) throw domain_error_sf("resample: N' below quadrature minimum (16)");
  if (params_out) params_out->clear();
  SheetCurve out;
  out.topology = g.topology;
  for (const Loop& l : g.loops) {
    const int n = l.n();
    // arclength function: ell(s) = L*s-like monotone map; spectral antiderivative
    VectorXd sp(n);
    for (int j = 0; j < n; ++j) sp[j] = l.speed[j];
    auto c = fourier_coeffs(sp);
    const double L = c[0].real();
    auto ell = [&](double s) {
      double v = L * s;
      for (std::size_t k = 1; k < c.size(); ++k) {
        const int f = signed_freq(k, c.size());
        if (2 * k == c.size() || f <= 0) continue;
        const dcomplex ik(0.0, TWO_PI * f);
        const dcomplex e0(1.0, 0.0);
        const dcomplex es(std::cos(TWO_PI * f * s), std::sin(TWO_PI * f * s));
        v += 2.0 * ((c[k] / ik) * (es - e0)).real();
      }
      return v;
    };
    auto speed_at = [&](double s) { return eval_trig(c, s); };
    Loop nl;
    nl.wx = l.wx; nl.wy = l.wy;
    nl.px.resize(Nnew); nl.py.resize(Nnew);
    std::vector<double> sparams(Nnew);
    double s = 0;
    for (int i = 0; i < Nnew; ++i) {
      const double target = L * double(i) / Nnew;
      for (int it = 0; it < 50; ++it) {
        const double r = ell(s) - target;
        const double step = r / speed_at(s);
        s -= step;
        if (std::abs(step) < 1e-15) break;
      }
      Vec2 p = l.position(s);
      nl.px[i] = p.x;
      nl.py[i] = p.y;
      sparams[i] = s;
      s += double(1) / Nnew;  // predictor for next root
    }
    out.loops.push_back(std::move(nl));
    if (params_out) params_out->push_back(std::move(sparams));
  }
  out.finalize(false);
  return out;
}

// Transport identity residual for a closed-form family (Lebesgue integral of a
// discontinuous function under a moving interface):
//   | d/dt int f_t mu  -  int dR/dt f_t mu  -  int_Gamma jump(f_t) xi_Gamma |.
// Integrals are evaluated by the caller-supplied quadrature functional to keep
// this header independent of the quadrature engine.
struct CurveFamily {
  std::function<SheetCurve(double t)> curve;
  std::function<double(const TorusPoint&, int side, double t)> f;
};

}  // namespace sheetflow

#endif  // SHEETFLOW_CURVE_HPP
