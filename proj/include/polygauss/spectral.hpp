#pragma once

// Trace moments M_j = Tr(k^j), elementary symmetric functions e_k of the
// eigenvalues, the e_k sign sweep, gamma-root location, the equivalence-shift
// delta scan and a seeded Mercer violation search.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "polygauss/wick.hpp"

namespace polygauss {

struct MomentOptions {
  unsigned max_j = 8;
  WickOptions wick{};
};

/// Quadratic form of the j-fold chain k(x_1,x_2) k(x_2,x_3) ... k(x_j,x_1)
/// in the jn variables (x_1, ..., x_j).
template <class T>
ComplexSymMatrix<T> chain_form(const GaussianTriple<T>& g, unsigned j) {
  using Cx = complex_t<T>;
  const std::size_t n = g.n();
  const Matrix<Cx> K = exponent_form(g).matrix();
  Matrix<Cx> Q(j * n, j * n);
  for (unsigned i = 0; i < j; ++i) {
    const std::size_t a = i * n;
    const std::size_t b = ((i + 1) % j) * n;
    const std::size_t off[2] = {a, b};
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t p = 0; p < n; ++p)
          for (std::size_t q = 0; q < n; ++q) Q(off[r] + p, off[c] + q) += K(r * n + p, c * n + q);
  }
  return ComplexSymMatrix<T>(Q);
}

/// prod_i P(x_i, x_{i+1 mod j}) in the jn chain variables.
template <class T>
MultiPoly<complex_t<T>> chain_poly(const MultiPoly<complex_t<T>>& p, std::size_t n, unsigned j) {
  using Poly = MultiPoly<complex_t<T>>;
  Poly out = Poly::constant(j * n, complex_t<T>(1));
  std::vector<std::size_t> map(2 * n);
  for (unsigned i = 0; i < j; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      map[k] = i * n + k;
      map[n + k] = ((i + 1) % j) * n + k;
    }
    out = out * p.remap(map, j * n);
  }
  return out;
}

/// M_j = Tr(k^j).  Imaginary residues above 1e-9 |M_j| are a consistency
/// failure (the kernel is self-adjoint).
template <class T>
T moment(const PolyGaussianKernel<T>& k, unsigned j, const MomentOptions& opts = {}) {
  using std::abs;
  if (j == 0) throw input_error("moment: j must be positive");
  if (j > opts.max_j) throw input_error("moment: j exceeds the configured maximum");
  const unsigned deg = *k.poly().degree();
  if (j * deg > opts.wick.degree_cap) throw input_error("moment: j * deg(P) exceeds the engine degree cap");
  const auto Q = chain_form(k.triple(), j);
  if (!positive_definite(RealSymMatrix<T>(Q.real_part())))
    throw numerical_error("moment: chain quadratic form has no positive definite real part");
  const auto res = poly_gaussian_integral(chain_poly<T>(k.poly(), k.n(), j),
                                          QuadraticExponent<T>::centred(Q), opts.wick);
  auto v = res.value();
  for (unsigned i = 0; i < j; ++i) v *= complex_t<T>(k.norm());
  if (abs(im(v)) > T(1e-9) * magnitude(v) + std::numeric_limits<T>::min())
    throw numerical_error("moment: trace moment has a non-negligible imaginary part");
  return re(v);
}

template <class T>
T trace(const PolyGaussianKernel<T>& k, const MomentOptions& opts = {}) {
  return moment(k, 1, opts);
}

template <class T>
std::vector<T> moments(const PolyGaussianKernel<T>& k, unsigned kmax, const MomentOptions& opts = {}) {
  std::vector<T> out;
  for (unsigned j = 1; j <= kmax; ++j) out.push_back(moment(k, j, opts));
  return out;
}

/// e_0 .. e_K from M_1 .. M_K by k e_k = sum_{j=1..k} (-1)^{j-1} e_{k-j} M_j.
template <class T>
std::vector<T> elementary_symmetric(std::span<const T> m) {
  if (m.empty()) throw input_error("elementary_symmetric: no moments");
  std::vector<T> e(m.size() + 1, T(0));
  e[0] = T(1);
  for (std::size_t k = 1; k <= m.size(); ++k) {
    T s(0);
    for (std::size_t j = 1; j <= k; ++j) {
      const T term = e[k - j] * m[j - 1];
      s += (j % 2 == 1) ? term : T(-term);
    }
    e[k] = s / T(k);
  }
  return e;
}

template <class T>
std::vector<T> elementary_symmetric(const std::vector<T>& m) {
  return elementary_symmetric(std::span<const T>(m));
}

/// e_k as det(H_k) / k! with H_k the lower Hessenberg moment matrix
/// (M_{i-j+1} on and below the diagonal, i on the superdiagonal of row i).
template <class T>
T elementary_symmetric_det(std::span<const T> m, std::size_t k) {
  if (k == 0) return T(1);
  if (k > m.size()) throw input_error("elementary_symmetric_det: not enough moments");
  Matrix<T> h(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) h(i, j) = m[i - j];
    if (i + 1 < k) h(i, i + 1) = T(i + 1);
  }
  T d = determinant(h);
  for (std::size_t i = 2; i <= k; ++i) d /= T(i);
  return d;
}

template <class T>
struct SpectralReport {
  unsigned kmax = 0;
  std::vector<T> moments;  // M_1 .. M_kmax
  std::vector<T> eks;      // e_1 .. e_kmax
  std::optional<unsigned> first_negative;
  T sign_tolerance = T(1e-9);

  /// A negative e_k certifies the operator is not positive semidefinite.
  /// The converse does not hold: without one the sweep only reports
  /// consistency up to kmax.
  bool certified_not_psd() const { return first_negative.has_value(); }

  T threshold(unsigned k) const {
    using std::abs;
    using std::pow;
    const T base = std::max(T(1), T(abs(eks.front())));
    return -sign_tolerance * T(pow(base, T(k)));
  }
};

template <class T>
SpectralReport<T> sweep_from_moments(std::vector<T> m, T sign_tolerance = T(1e-9)) {
  SpectralReport<T> r;
  r.kmax = static_cast<unsigned>(m.size());
  r.sign_tolerance = sign_tolerance;
  const auto e = elementary_symmetric(std::span<const T>(m));
  r.eks.assign(e.begin() + 1, e.end());
  r.moments = std::move(m);
  for (unsigned k = 1; k <= r.kmax; ++k) {
    if (r.eks[k - 1] < r.threshold(k)) {
      r.first_negative = k;
      break;
    }
  }
  return r;
}

template <class T>
SpectralReport<T> positivity_sweep(const PolyGaussianKernel<T>& k, unsigned kmax, const MomentOptions& opts = {},
                                   T sign_tolerance = T(1e-9)) {
  if (kmax == 0) throw input_error("positivity_sweep: kmax must be positive");
  return sweep_from_moments(moments(k, kmax, opts), sign_tolerance);
}

/// gamma -> kernel.
template <class T>
using KernelFamily = std::function<PolyGaussianKernel<T>(const T&)>;

struct ZRootOptions {
  double gamma_lo = 0.0;
  double gamma_hi = 20.0;
  unsigned samples = 64;
  double tol = 1e-6;
  MomentOptions moments{};
};

template <class T>
struct ZRootResult {
  unsigned k = 0;
  T delta = T(0);
  bool delta_infinite = false;  // delta_infinite: root taken at a large finite delta
  T gamma_root = T(0);
  T lo = T(0), hi = T(0);
  std::optional<T> extrapolated;  // Richardson estimate of the delta -> infinity limit
};

template <class T>
T e_k_of(const PolyGaussianKernel<T>& k, unsigned order, const MomentOptions& opts) {
  const auto m = moments(k, order, opts);
  return elementary_symmetric(std::span<const T>(m)).back();
}

/// Smallest sign change of gamma -> e_k(gamma) on the sample grid, refined by
/// bisection.  Multiple crossings are not assumed away; the first is taken.
template <class T>
ZRootResult<T> z_root(const KernelFamily<T>& family, unsigned k, const ZRootOptions& opts = {}) {
  if (opts.samples < 2 || !(opts.gamma_lo < opts.gamma_hi)) throw input_error("z_root: bad scan range");
  auto f = [&](const T& g) { return e_k_of(family(g), k, opts.moments); };
  const T lo0(opts.gamma_lo), hi0(opts.gamma_hi);
  const T step = (hi0 - lo0) / T(opts.samples - 1);
  T prev_g = lo0;
  T prev_f = f(prev_g);
  for (unsigned s = 1; s < opts.samples; ++s) {
    const T g = lo0 + step * T(s);
    const T fg = f(g);
    if (prev_f == T(0) || (prev_f < T(0)) != (fg < T(0))) {
      ZRootResult<T> r;
      r.k = k;
      r.lo = prev_g;
      r.hi = g;
      if (prev_f == T(0)) {
        r.gamma_root = r.hi = prev_g;
        return r;
      }
      // bisect keeping f(lo) and f(hi) of opposite sign, so (lo, hi) is the reported bracket
      const bool lo_negative = prev_f < T(0);
      while (r.hi - r.lo > T(opts.tol)) {
        const T mid = r.lo + (r.hi - r.lo) / T(2);
        if (mid <= r.lo || mid >= r.hi) break;
        ((f(mid) < T(0)) == lo_negative ? r.lo : r.hi) = mid;
      }
      r.gamma_root = r.lo + (r.hi - r.lo) / T(2);
      return r;
    }
    prev_g = g;
    prev_f = fg;
  }
  throw no_bracket_error("z_root: e_k does not change sign on the scan range");
}

/// The equivalent kernel with A + delta I, C + delta I, renormalised so the
/// trace is unchanged.  A - C and B are untouched, so the Gaussian parts are
/// equivalent in the preorder sense.
template <class T>
PolyGaussianKernel<T> equiv_shift(const PolyGaussianKernel<T>& k, const T& delta, const MomentOptions& opts = {}) {
  const auto& g = k.triple();
  const auto shift = RealSymMatrix<T>::scalar(g.n(), delta);
  GaussianTriple<T> shifted(g.A + shift, g.B, g.C + shift);
  if (!shifted.kernel_valid()) throw input_error("equiv_shift: shifted triple is not kernel-valid");
  if (!equiv(g, shifted)) throw numerical_error("equiv_shift: shifted triple is not equivalent");
  const auto raw = k.with_triple(std::move(shifted));
  const T t0 = trace(k, opts);
  const T t1 = trace(raw, opts);
  if (t1 == T(0) || t0 == T(0)) throw input_error("equiv_shift: kernel has zero trace");
  const T ratio = t0 / t1;
  if (!(ratio > T(0))) throw input_error("equiv_shift: trace changes sign under the shift");
  return raw.with_norm(k.norm() * ratio);
}

struct DeltaScanOptions {
  ZRootOptions z{};
  double infinity_proxy = 1e4;
  double infinity_check = 1e5;
};

template <class T>
struct DeltaScanResult {
  std::vector<ZRootResult<T>> rows;
  std::size_t best = 0;        // index of the smallest root
  bool monotone = true;        // roots non-increasing along increasing delta
};

/// Z_k(delta) for each delta (+inf allowed).  Any gamma above the smallest
/// root gives a kernel that is not positive semidefinite.
template <class T>
DeltaScanResult<T> delta_scan(const KernelFamily<T>& family, unsigned k, std::vector<double> deltas,
                              const DeltaScanOptions& opts = {}) {
  using std::isinf;
  if (deltas.empty()) throw input_error("delta_scan: no deltas");
  std::sort(deltas.begin(), deltas.end());
  const auto at = [&](double d) {
    const T dd(d);
    KernelFamily<T> shifted = [&family, dd, &opts](const T& g) {
      return equiv_shift(family(g), dd, opts.z.moments);
    };
    if (d == 0.0) shifted = family;
    auto r = z_root(shifted, k, opts.z);
    r.delta = dd;
    return r;
  };
  DeltaScanResult<T> out;
  for (double d : deltas) {
    if (isinf(d)) {
      if (d < 0) throw input_error("delta_scan: delta must exceed -1");
      auto r = at(opts.infinity_proxy);
      const auto check = at(opts.infinity_check);
      const T ratio = T(opts.infinity_check / opts.infinity_proxy);
      r.extrapolated = (ratio * check.gamma_root - r.gamma_root) / (ratio - T(1));
      r.delta_infinite = true;
      out.rows.push_back(std::move(r));
    } else {
      if (!(d > -1.0)) throw input_error("delta_scan: delta must exceed -1");
      out.rows.push_back(at(d));
    }
  }
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    if (out.rows[i].gamma_root < out.rows[out.best].gamma_root) out.best = i;
    if (i > 0 && out.rows[i].gamma_root > out.rows[i - 1].gamma_root) out.monotone = false;
  }
  return out;
}

struct MercerOptions {
  unsigned trials = 200;
  unsigned points_per_trial = 8;
  std::uint64_t seed = 0;
  // Cloud radii in units of 1 / (2 sqrt(lambda_max(C))), cycled over trials.
  std::vector<double> scales{0.5, 1.0, 2.0, 4.0, 8.0, 12.0};
  // Tried first, before random clouds.
  std::vector<std::vector<std::vector<double>>> seed_point_sets{};
};

struct MercerCertificate {
  std::vector<std::vector<double>> points;
  std::vector<std::complex<double>> coeffs;
  double value = 0;  // sum_ij c_i c_j^* k(x_i, x_j) < 0
  double scale = 0;  // sum_ij |c_i| |c_j| |k(x_i, x_j)|
  unsigned trial = 0;
};

/// sum_{ij} c_i c_j^* k(x_i, x_j) and its absolute scale.
inline std::pair<double, double> mercer_form(const PolyGaussianKernel<double>& k,
                                             const std::vector<std::vector<double>>& points,
                                             const std::vector<std::complex<double>>& coeffs) {
  std::complex<double> sum = 0;
  double scale = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < points.size(); ++j) {
      const auto kij = k(std::span<const double>(points[i]), std::span<const double>(points[j]));
      const auto term = coeffs[i] * std::conj(coeffs[j]) * kij;
      sum += term;
      scale += std::abs(coeffs[i]) * std::abs(coeffs[j]) * std::abs(kij);
    }
  }
  return {sum.real(), scale};
}

/// Re-verification of a certificate by direct summation.
inline bool mercer_certificate_valid(const PolyGaussianKernel<double>& k, const MercerCertificate& cert) {
  if (cert.points.empty() || cert.points.size() != cert.coeffs.size()) return false;
  const auto [value, scale] = mercer_form(k, cert.points, cert.coeffs);
  return std::isfinite(value) && value < -1e-9 * scale;
}

namespace detail {

/// Exponent of kappa_G at (x, y) in the form -d^T A d - i d^T B s - s^T C s.
inline std::complex<double> gaussian_exponent(const GaussianTriple<double>& g, const std::vector<double>& x,
                                              const std::vector<double>& y) {
  const std::size_t n = g.n();
  std::complex<double> e = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double di = x[i] - y[i], dj = x[j] - y[j];
      const double si = x[i] + y[i], sj = x[j] + y[j];
      e += std::complex<double>(-di * g.A(i, j) * dj - si * g.C(i, j) * sj, -di * g.B(i, j) * sj);
    }
  }
  return e;
}

inline std::optional<MercerCertificate> mercer_try(const PolyGaussianKernel<double>& k,
                                                   const std::vector<std::vector<double>>& pts, unsigned trial) {
  const std::size_t N = pts.size();
  const auto& g = k.triple();
  // Congruence by D = diag(exp(-Re E_ii / 2)) keeps the inertia and removes
  // the (x + y) decay, so far-apart points stay representable.
  std::vector<double> half_diag(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double e = gaussian_exponent(g, pts[i], pts[i]).real();
    if (e < -700) return std::nullopt;
    half_diag[i] = e / 2;
  }
  Eigen::MatrixXcd H(N, N);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      const auto e = gaussian_exponent(g, pts[i], pts[j]);
      if (e.real() < -700) return std::nullopt;
      const double scaled = e.real() - half_diag[i] - half_diag[j];
      if (scaled > 600) return std::nullopt;
      const auto p = k.poly().evaluate(std::span<const double>(pts[i]), std::span<const double>(pts[j]));
      H(i, j) = k.norm() * p * std::exp(std::complex<double>(scaled, e.imag()));
    }
  }
  H = (H + H.adjoint()).eval() * 0.5;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  if (es.info() != Eigen::Success) return std::nullopt;
  const double lmin = es.eigenvalues()(0);
  const double trace_scale = H.diagonal().cwiseAbs().sum();
  if (!(lmin < -1e-9 * trace_scale)) return std::nullopt;
  // w^H H w = v^H K v with v = D w; the Mercer form uses c = conj(v).
  MercerCertificate cert;
  cert.points = pts;
  cert.trial = trial;
  for (std::size_t i = 0; i < N; ++i)
    cert.coeffs.push_back(std::conj(es.eigenvectors()(static_cast<Eigen::Index>(i), 0)) * std::exp(-half_diag[i]));
  const auto [value, scale] = mercer_form(k, cert.points, cert.coeffs);
  cert.value = value;
  cert.scale = scale;
  if (!(std::isfinite(value) && value < -1e-9 * scale)) return std::nullopt;
  return cert;
}

}  // namespace detail

/// Seeded search for points and coefficients with a negative Mercer form.
/// No certificate is not evidence of positivity.
inline std::optional<MercerCertificate> mercer_search(const PolyGaussianKernel<double>& k, const MercerOptions& opts = {}) {
  if (opts.points_per_trial == 0 || opts.scales.empty()) throw input_error("mercer_search: empty trial shape");
  unsigned trial = 0;
  for (const auto& pts : opts.seed_point_sets) {
    for (const auto& p : pts)
      if (p.size() != k.n()) throw input_error("mercer_search: seed point has the wrong dimension");
    if (auto c = detail::mercer_try(k, pts, trial++)) return c;
  }
  const std::size_t n = k.n();
  const double unit = 1.0 / (2.0 * std::sqrt(max_eigenvalue(k.triple().C)));
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (unsigned t = 0; t < opts.trials; ++t, ++trial) {
    const double sigma = unit * opts.scales[t % opts.scales.size()];
    std::vector<std::vector<double>> pts(opts.points_per_trial, std::vector<double>(n));
    for (auto& p : pts)
      for (auto& v : p) v = sigma * normal(rng);
    if (auto c = detail::mercer_try(k, pts, trial)) return c;
  }
  return std::nullopt;
}

}  // namespace polygauss
