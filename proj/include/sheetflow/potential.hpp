// sheetflow: boundary-integral engine on a sheet curve.
//
// Layer operators (single layer S, double layer K, adjoint K') are assembled
// by a Nystrom method: the logarithmic singularity of the Green function is
// split off analytically and integrated with spectral log-quadrature weights
// (trapezoid-exact for trigonometric densities); the smooth remainder uses the
// plain trapezoid rule, which is spectrally accurate on closed curves.
//
// Dirichlet-to-Neumann maps for the two complementary domains are obtained
// from the Green representation formula: for u harmonic in D with outward
// normal n and trace g,
//     (1/2) g - avg_D(u) = K_D g - S (du/dn)    on Gamma,
// (the avg term comes from the -1 background of the periodic Green function),
// which is solved as a bordered first-kind system for the normal derivative,
// then projected so that symmetry (in the arclength inner product) and the
// constant kernel hold exactly.
#ifndef SHEETFLOW_POTENTIAL_HPP
#define SHEETFLOW_POTENTIAL_HPP

#include <map>
#include <memory>
#include <mutex>

#include <Eigen/LU>

#include "sheetflow/curve.hpp"
#include "sheetflow/green.hpp"

namespace sheetflow {

namespace detail {

// Quadrature weights rho_d (d = i - j mod N) for the periodic log kernel:
//   integral_0^1 ln(4 sin^2(pi (s_i - t))) f(t) dt ~ sum_j rho_{i-j} f(j/N),
// exact for trigonometric polynomials of degree < N/2. Requires even N.
inline std::vector<double> kress_log_weights(int N) {
  if (N < 2 || N % 2 != 0)
    throw domain_error_sf("kress_log_weights: marker count must be even");
  std::vector<double> rho(N);
  for (int d = 0; d < N; ++d) {
    double s = 0.0;
    for (int m = 1; m < N / 2; ++m) s += std::cos(TWO_PI * m * d / double(N)) / m;
    const double nyq = std::cos(PI * d) / double(N);
    rho[d] = -(2.0 / N) * (s + nyq);
  }
  return rho;
}

}  // namespace detail

// Assembled boundary-integral operators for a fixed curve. All matrices act on
// marker-value vectors; S and K map densities / traces to on-curve values.
class LayerOperators {
 public:
  SheetCurve curve;            // private copy; operators stay valid on their own
  const GreenTable* table = nullptr;
  MatrixXd S;                  // single layer: values of int G psi ds
  MatrixXd K;                  // double layer: values of int g dG/dnu_q ds
  MatrixXd Kp;                 // adjoint double layer (arclength adjoint of K)
  VectorXd w;                  // arclength quadrature weights
  bool underresolved = false;  // heuristic resolution warning

  // Lazily built and cached derived operators (deterministic; guarded).
  const MatrixXd& dtn_matrix(int side) const {
    const int idx = side > 0 ? 0 : 1;
    std::lock_guard<std::mutex> lk(*mtx_);
    if (dtn_[idx]) return *dtn_[idx];
    const int N = int(w.size());
    MatrixXd B(N + 1, N + 1);
    B.topLeftCorner(N, N) = S;
    B.block(0, N, N, 1).setConstant(-1.0);
    B.block(N, 0, 1, N) = w.transpose();
    B(N, N) = 0.0;
    MatrixXd R(N + 1, N);
    R.topRows(N) = double(side) * K;
    R.topRows(N).diagonal().array() -= 0.5;
    R.row(N).setZero();
    const MatrixXd X = B.partialPivLu().solve(R);
    dtn_[idx] = std::make_shared<MatrixXd>(structural_cleanup(X.topRows(N)));
    return *dtn_[idx];
  }

  const MatrixXd& ntd_matrix(int side) const {
    const MatrixXd& A = dtn_matrix(side);
    const int idx = side > 0 ? 0 : 1;
    std::lock_guard<std::mutex> lk(*mtx_);
    if (ntd_[idx]) return *ntd_[idx];
    const int N = int(w.size());
    MatrixXd B(N + 1, N + 1);
    B.topLeftCorner(N, N) = A;
    B.block(0, N, N, 1) = w;
    B.block(N, 0, 1, N) = w.transpose();
    B(N, N) = 0.0;
    MatrixXd R(N + 1, N);
    R.topRows(N) = MatrixXd::Identity(N, N);
    R.row(N).setZero();
    const MatrixXd X = B.partialPivLu().solve(R);
    ntd_[idx] = std::make_shared<MatrixXd>(structural_cleanup(X.topRows(N)));
    return *ntd_[idx];
  }

  // LU of the bordered (DtN+ + DtN-) system used by the layer constructions.
  const Eigen::PartialPivLU<MatrixXd>& sum_dtn_lu() const {
    const MatrixXd& Ap = dtn_matrix(+1);
    const MatrixXd& Am = dtn_matrix(-1);
    std::lock_guard<std::mutex> lk(*mtx_);
    if (sum_lu_) return *sum_lu_;
    const int N = int(w.size());
    MatrixXd B(N + 1, N + 1);
    B.topLeftCorner(N, N) = Ap + Am;
    B.block(0, N, N, 1) = w;
    B.block(N, 0, 1, N) = w.transpose();
    B(N, N) = 0.0;
    sum_lu_ = std::make_shared<Eigen::PartialPivLU<MatrixXd>>(B);
    return *sum_lu_;
  }

  LayerOperators() : mtx_(std::make_shared<std::mutex>()) {}

 private:
  // Exact enforcement of the structural properties: self-adjointness in the
  // arclength inner product and annihilation of constants on both sides.
  MatrixXd structural_cleanup(const MatrixXd& A) const {
    const int N = int(w.size());
    const VectorXd m = w / w.sum();
    const MatrixXd WA = w.asDiagonal() * A;
    const MatrixXd sym = 0.5 * (WA + WA.transpose());
    const MatrixXd Q = MatrixXd::Identity(N, N) - VectorXd::Ones(N) * m.transpose();
    return w.cwiseInverse().asDiagonal() * (Q.transpose() * sym * Q).eval();
  }

  mutable std::shared_ptr<MatrixXd> dtn_[2], ntd_[2];
  mutable std::shared_ptr<Eigen::PartialPivLU<MatrixXd>> sum_lu_;
  mutable std::shared_ptr<std::mutex> mtx_;
};

inline LayerOperators build_operators(const SheetCurve& g, const GreenTable& tab) {
  const int N = g.total();
  if (N < 16) throw domain_error_sf("build_operators: need at least 16 markers");
  const int Nl = g.markers_per_loop();
  const std::vector<double> rho = detail::kress_log_weights(Nl);

  LayerOperators ops;
  ops.curve = g;
  ops.table = &tab;
  ops.w = g.weights();
  ops.S = MatrixXd::Zero(N, N);
  ops.K = MatrixXd::Zero(N, N);

  const double rem_diag = tab.remainder_diagonal();
  for (int i = 0; i < N; ++i) {
    const TorusPoint xi = g.marker(i);
    const int li = g.loop_of(i), il = g.local_of(i);
    for (int j = 0; j < N; ++j) {
      const int lj = g.loop_of(j), jl = g.local_of(j);
      const double Lj = g.speed(j);
      if (lj != li) {
        const Vec2 d = displacement(xi, g.marker(j));
        ops.S(i, j) = ops.w[j] * green_disp(d, tab);
        ops.K(i, j) = ops.w[j] * (-grad_green_disp(d, tab).dot(g.normal(j)));
        continue;
      }
      if (j == i) {
        ops.S(i, i) = Lj * (rho[0] / (4.0 * PI) +
                            (rem_diag + std::log(Lj / TWO_PI) / TWO_PI) / Nl);
        ops.K(i, i) = -ops.w[i] * g.curvature(i) / (4.0 * PI);
        continue;
      }
      const Vec2 d = displacement(xi, g.marker(j));
      const double sd = std::sin(PI * double(il - jl) / Nl);
      const double M = green_remainder_disp(d, tab) +
                       std::log(d.squaredNorm() / (4.0 * sd * sd)) / (4.0 * PI);
      const int dd = ((il - jl) % Nl + Nl) % Nl;
      ops.S(i, j) = Lj * (rho[dd] / (4.0 * PI) + M / Nl);
      ops.K(i, j) = ops.w[j] * (-grad_green_disp(d, tab).dot(g.normal(j)));
    }
  }
  ops.Kp = ops.w.cwiseInverse().asDiagonal() * ops.K.transpose() * ops.w.asDiagonal();

  // Resolution heuristic: marker spacing against curvature radius and, for a
  // loop pair, against the narrower strip.
  double hmax = 0.0, kmax = 0.0;
  for (int i = 0; i < N; ++i) {
    hmax = std::max(hmax, ops.w[i]);
    kmax = std::max(kmax, std::abs(g.curvature(i)));
  }
  ops.underresolved = hmax * kmax > 0.25;
  if (g.topology == Topology::LoopPair) {
    const auto [h1, h2] = g.strip_heights();
    if (hmax > 0.5 * std::min(h1, h2)) ops.underresolved = true;
  }
  return ops;
}

// Dirichlet-to-Neumann map of D(side): takes marker trace values to the
// own-outward normal-derivative density. Symmetric PSD; kernel = constants.
struct DtNOperator {
  int side = +1;
  MatrixXd A;
  VectorXd w;  // arclength weights (the inner product in which A is symmetric)
  VectorXd apply(const VectorXd& g) const { return A * g; }
};

inline DtNOperator dtn(const SheetCurve&, int side, const LayerOperators& ops) {
  return {side, ops.dtn_matrix(side), ops.w};
}

// Neumann-to-Dirichlet map on zero-(arclength-)mean densities; pseudoinverse
// of the DtN map, returning the zero-mean trace.
struct NtDOperator {
  int side = +1;
  MatrixXd B;
  VectorXd w;
  VectorXd apply(const VectorXd& psi) const {
    const double mean = w.dot(psi);
    if (std::abs(mean) > 1e-8 * (w.sum() * psi.cwiseAbs().maxCoeff() + 1e-300))
      throw constraint_error("ntd: input density must have zero arclength mean");
    return B * psi;
  }
};

inline NtDOperator ntd(const SheetCurve&, int side, const LayerOperators& ops) {
  return {side, ops.ntd_matrix(side), ops.w};
}

// Harmonic function on one side of the curve, represented by its boundary
// trace g and own-outward normal-derivative density psi via the Green
// representation  u(p) = c0 + int_Gamma [ g dG/dn_q - G psi ] ds_q.
class HarmonicExtension {
 public:
  int side = +1;
  SheetCurve curve;
  const GreenTable* table = nullptr;
  VectorXd g, psi;
  double c0 = 0.0;

  HarmonicExtension() = default;
  HarmonicExtension(int side_, const SheetCurve& curve_, const GreenTable* tab,
                    VectorXd g_, VectorXd psi_, double c0_)
      : side(side_), curve(curve_), table(tab), g(std::move(g_)),
        psi(std::move(psi_)), c0(c0_),
        cache_(std::make_shared<Cache>()) {
    const int Nl = curve.markers_per_loop();
    for (int li = 0; li < int(curve.loops.size()); ++li) {
      cg_.push_back(fourier_coeffs(g.segment(li * Nl, Nl)));
      cpsi_.push_back(fourier_coeffs(psi.segment(li * Nl, Nl)));
    }
  }

  struct Upsampled {
    std::vector<Vec2> pos, nu;
    std::vector<double> gv, pv, wt;
  };

  const Upsampled& resolved(int q) const {
    std::lock_guard<std::mutex> lk(cache_->mtx);
    auto it = cache_->byfactor.find(q);
    if (it != cache_->byfactor.end()) return *it->second;
    auto up = std::make_shared<Upsampled>();
    const int Nl = curve.markers_per_loop();
    for (int li = 0; li < int(curve.loops.size()); ++li) {
      const Loop& l = curve.loops[li];
      const int Q = q * Nl;
      for (int j = 0; j < Q; ++j) {
        const double s = double(j) / Q;
        Vec2 p, d1;
        l.eval_all(s, &p, &d1, nullptr);
        const double L = d1.norm();
        up->pos.push_back(p);
        up->nu.push_back(d1.rot_cw() / L);
        up->wt.push_back(L / Q);
        up->gv.push_back(eval_trig(cg_[li], s));
        up->pv.push_back(eval_trig(cpsi_[li], s));
      }
    }
    cache_->byfactor[q] = up;
    return *up;
  }

  // Trace data interpolated at (loop, s), for the near-boundary expansion.
  double trace_g(int li, double s, int order = 0) const {
    return order == 0 ? eval_trig(cg_[li], s) : eval_trig_deriv(cg_[li], s, order);
  }
  double trace_psi(int li, double s, int order = 0) const {
    return order == 0 ? eval_trig(cpsi_[li], s) : eval_trig_deriv(cpsi_[li], s, order);
  }

 private:
  std::vector<std::vector<dcomplex>> cg_, cpsi_;
  struct Cache {
    std::mutex mtx;
    std::map<int, std::shared_ptr<const Upsampled>> byfactor;
  };
  std::shared_ptr<Cache> cache_;
};

struct PointValue {
  double value = 0.0;
  Vec2 grad;
};

inline PointValue evaluate(const HarmonicExtension& ext, const TorusPoint& p) {
  const Projection pr = ext.curve.project(p);
  const int own = pr.t < 0.0 ? +1 : -1;
  if (own != ext.side)
    throw domain_error_sf("evaluate: point lies on the wrong side of the curve");
  const double dist = std::abs(pr.t);
  const int Nl = ext.curve.markers_per_loop();
  const double sigma = double(ext.side);
  const int qcap = 48;

  if (dist * Nl * qcap >= 5.0) {
    // Trapezoid over (possibly upsampled) boundary nodes: error ~ e^{-2 pi d Q}
    // with Q d >= 5 by the choice of the upsampling factor q.
    const int q = std::max(1, int(std::ceil(5.0 / (dist * Nl))));
    const auto& up = ext.resolved(q);
    PointValue out;
    out.value = ext.c0;
    for (std::size_t k = 0; k < up.pos.size(); ++k) {
      const Vec2 d = displacement(p, TorusPoint(up.pos[k].x, up.pos[k].y));
      const Vec2 n = sigma * up.nu[k];
      const double Gd = green_disp(d, *ext.table);
      const Vec2 gg = grad_green_disp(d, *ext.table);
      const SymMat2 H = hess_green_disp(d, *ext.table);
      out.value += up.wt[k] * (up.gv[k] * (-gg.dot(n)) - Gd * up.pv[k]);
      out.grad -= up.wt[k] * (up.gv[k] * H.apply(n) + up.pv[k] * gg);
    }
    return out;
  }

  // Near-boundary expansion in boundary-fitted coordinates (s, eta), eta the
  // own-outward offset: u = g + eta psi + (eta^2/2) u_nn with
  // u_nn = kappa_n psi - d^2 g / d(arclength)^2 from the Laplace equation.
  const Loop& l = ext.curve.loops[pr.loop];
  Vec2 c, d1, d2;
  l.eval_all(pr.s, &c, &d1, &d2);
  const double L = d1.norm();
  const Vec2 tau = d1 / L;
  const Vec2 nu = tau.rot_cw();
  const double kappa = d2.dot(nu) / (L * L);
  const double Lp = d1.dot(d2) / L;
  const double eta = sigma * pr.t;
  const double kn = sigma * kappa;
  const double g0 = ext.trace_g(pr.loop, pr.s, 0);
  const double g1 = ext.trace_g(pr.loop, pr.s, 1);
  const double g2 = ext.trace_g(pr.loop, pr.s, 2);
  const double p0 = ext.trace_psi(pr.loop, pr.s, 0);
  const double p1 = ext.trace_psi(pr.loop, pr.s, 1);
  const double g_arc2 = g2 / (L * L) - g1 * Lp / (L * L * L);
  const double unn = kn * p0 - g_arc2;
  PointValue out;
  out.value = g0 + eta * p0 + 0.5 * eta * eta * unn;
  const double un = p0 + eta * unn;
  const double ut = (g1 + eta * p1) / (L * (1.0 - eta * kn));
  out.grad = un * (sigma * nu) + ut * tau;
  return out;
}

namespace detail {

// Additive constant of the Green representation from the boundary trace
// identity  (1/2) g - c = side * K g - S psi.
inline double extension_constant(const LayerOperators& ops, int side,
                                 const VectorXd& g, const VectorXd& psi) {
  const VectorXd cvec = 0.5 * g - double(side) * (ops.K * g) + ops.S * psi;
  return ops.w.dot(cvec) / ops.w.sum();
}

inline HarmonicExtension make_extension(const LayerOperators& ops, int side,
                                        const VectorXd& g, const VectorXd& psi) {
  return HarmonicExtension(side, ops.curve, ops.table, g, psi,
                           extension_constant(ops, side, g, psi));
}

// Solve (DtN+ + DtN-) g = f with the zero-arclength-mean gauge on g.
inline VectorXd solve_sum_dtn(const LayerOperators& ops, const VectorXd& f) {
  const int N = int(ops.w.size());
  VectorXd rhs(N + 1);
  rhs.head(N) = f;
  rhs[N] = 0.0;
  const VectorXd x = ops.sum_dtn_lu().solve(rhs);
  return x.head(N);
}

}  // namespace detail

// Single layer potential: given a zero-mean normal-derivative jump density f,
// the harmonic functions s± with common trace g and (grad s+ - grad s-, nu) = f.
struct SingleLayer {
  VectorXd g;  // common boundary trace, zero arclength mean
  HarmonicExtension plus, minus;
};

inline SingleLayer single_layer(const SheetCurve&, const VectorXd& f,
                                const LayerOperators& ops) {
  if (std::abs(ops.w.dot(f)) >
      1e-8 * (ops.w.sum() * (f.size() ? f.cwiseAbs().maxCoeff() : 0.0) + 1e-300))
    throw constraint_error("single_layer: density must have zero arclength mean");
  SingleLayer out;
  out.g = detail::solve_sum_dtn(ops, f);
  const VectorXd psi_p = ops.dtn_matrix(+1) * out.g;
  const VectorXd psi_m = ops.dtn_matrix(-1) * out.g;
  out.plus = detail::make_extension(ops, +1, out.g, psi_p);
  out.minus = detail::make_extension(ops, -1, out.g, psi_m);
  return out;
}

// Double layer potential: given a trace jump g = h+ - h-, the harmonic
// functions h± with continuous normal derivative; xi is that common normal
// derivative as a zero-mean tangent vector (density times arclength weight).
struct DoubleLayer {
  TangentVS xi;
  VectorXd trace_plus, trace_minus;
  HarmonicExtension plus, minus;
};

inline DoubleLayer double_layer(const SheetCurve&, const VectorXd& g,
                                const LayerOperators& ops) {
  const MatrixXd& Ap = ops.dtn_matrix(+1);
  const MatrixXd& Am = ops.dtn_matrix(-1);
  DoubleLayer out;
  out.trace_minus = detail::solve_sum_dtn(ops, -(Ap * g));
  out.trace_plus = out.trace_minus + g;
  const VectorXd psi_p = Ap * out.trace_plus;   // = -Am * trace_minus
  const VectorXd psi_m = Am * out.trace_minus;
  VectorXd xi = psi_p.cwiseProduct(ops.w);
  out.xi = TangentVS::make(xi);
  out.plus = detail::make_extension(ops, +1, out.trace_plus, psi_p);
  out.minus = detail::make_extension(ops, -1, out.trace_minus, psi_m);
  return out;
}

}  // namespace sheetflow

#endif  // SHEETFLOW_POTENTIAL_HPP
