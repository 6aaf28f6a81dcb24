// sheetflow: basic scalar/vector helpers and periodic spectral utilities.
#ifndef SHEETFLOW_COMMON_HPP
#define SHEETFLOW_COMMON_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sheetflow {

using dcomplex = std::complex<double>;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double PI = 3.14159265358979323846264338327950288;
inline constexpr double TWO_PI = 2.0 * PI;

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}
  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double a) const { return {a * x, a * y}; }
  Vec2 operator/(double a) const { return {x / a, y / a}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  double squaredNorm() const { return x * x + y * y; }
  // Rotation by -90 degrees: tangent -> right normal.
  Vec2 rot_cw() const { return {y, -x}; }
  // Rotation by +90 degrees.
  Vec2 rot_ccw() const { return {-y, x}; }
};
inline Vec2 operator*(double a, const Vec2& v) { return {a * v.x, a * v.y}; }

struct domain_error_sf : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct constraint_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Discrete Fourier transform, unnormalized: X_k = sum_j x_j e^{-2 pi i jk/N}.
// Radix-2 iterative FFT for powers of two, O(N^2) fallback otherwise.
// ---------------------------------------------------------------------------
namespace detail {
inline bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

inline void fft_pow2(std::vector<dcomplex>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? TWO_PI : -TWO_PI) / double(len);
    const dcomplex wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      dcomplex w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        dcomplex u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}
}  // namespace detail

inline std::vector<dcomplex> dft(const std::vector<dcomplex>& x, bool inverse = false) {
  const std::size_t n = x.size();
  std::vector<dcomplex> out = x;
  if (detail::is_pow2(n)) {
    detail::fft_pow2(out, inverse);
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      dcomplex s(0.0, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        double ang = (inverse ? TWO_PI : -TWO_PI) * double(j * k % n) / double(n);
        s += x[j] * dcomplex(std::cos(ang), std::sin(ang));
      }
      out[k] = s;
    }
  }
  return out;
}

// Fourier coefficients c_k (k = 0..N-1, frequency k>N/2 means k-N) of real
// samples v_j = f(j/N):  c_k = (1/N) sum_j v_j e^{-2 pi i jk/N}.
inline std::vector<dcomplex> fourier_coeffs(const VectorXd& v) {
  const std::size_t n = std::size_t(v.size());
  std::vector<dcomplex> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = dcomplex(v[Eigen::Index(j)], 0.0);
  auto X = dft(x, false);
  for (auto& c : X) c /= double(n);
  return X;
}

// Signed frequency of bin k in an N-point transform (Nyquist -> +N/2).
inline int signed_freq(std::size_t k, std::size_t n) {
  return (k <= n / 2) ? int(k) : int(k) - int(n);
}

// Evaluate the trigonometric interpolant of real data at parameter s in [0,1).
// Nyquist bin (even N) is treated as a pure cosine.
inline double eval_trig(const std::vector<dcomplex>& c, double s) {
  const std::size_t n = c.size();
  double acc = c[0].real();
  for (std::size_t k = 1; k < n; ++k) {
    const int f = signed_freq(k, n);
    if (2 * k == n) {  // Nyquist: data real => c real; interpolant cos(pi N s)
      acc += c[k].real() * std::cos(TWO_PI * (double(n) / 2.0) * s);
    } else if (f > 0) {
      // pair with conjugate bin handled when f<0 skipped
      const dcomplex e(std::cos(TWO_PI * f * s), std::sin(TWO_PI * f * s));
      acc += 2.0 * (c[k] * e).real();
    }
  }
  return acc;
}

// Derivative of the interpolant at s (d/ds, parameter period 1).
inline double eval_trig_deriv(const std::vector<dcomplex>& c, double s, int order = 1) {
  const std::size_t n = c.size();
  double acc = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const int f = signed_freq(k, n);
    if (2 * k == n) continue;  // Nyquist dropped from derivatives (odd part 0)
    if (f > 0) {
      dcomplex e(std::cos(TWO_PI * f * s), std::sin(TWO_PI * f * s));
      dcomplex d = std::pow(dcomplex(0.0, TWO_PI * f), order) * c[k] * e;
      acc += 2.0 * d.real();
    }
  }
  return acc;
}

// Spectral derivative sampled back on the uniform grid.
inline VectorXd spectral_derivative(const VectorXd& v, int order = 1) {
  const std::size_t n = std::size_t(v.size());
  auto c = fourier_coeffs(v);
  std::vector<dcomplex> d(n);
  for (std::size_t k = 0; k < n; ++k) {
    const int f = signed_freq(k, n);
    if (2 * k == n) { d[k] = 0.0; continue; }
    d[k] = std::pow(dcomplex(0.0, TWO_PI * f), order) * c[k];
  }
  auto x = dft(d, true);
  VectorXd out = VectorXd::Zero(Eigen::Index(n));
  for (std::size_t j = 0; j < n; ++j) out[Eigen::Index(j)] = x[j].real();
  return out;
}

// Trigonometric resampling of real periodic samples onto m uniform points.
inline VectorXd spectral_resample(const VectorXd& v, std::size_t m) {
  auto c = fourier_coeffs(v);
  VectorXd out = VectorXd::Zero(Eigen::Index(m));
  for (std::size_t j = 0; j < m; ++j) out[Eigen::Index(j)] = eval_trig(c, double(j) / double(m));
  return out;
}

// Mean value (parameter average) of samples.
inline double mean_of(const VectorXd& v) { return v.mean(); }

}  // namespace sheetflow

#endif  // SHEETFLOW_COMMON_HPP
