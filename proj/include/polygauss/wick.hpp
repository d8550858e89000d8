#pragma once

// Closed-form integration of polynomial x Gaussian integrands
//   int_{R^m} f(z, u) exp(-z^T Q z + b(u)^T z + c(u)) dz
// where Q is complex symmetric with Re Q > 0, and b, c are polynomials in
// external variables u.  The square is completed symbolically
// (z = mu(u) + w, mu = Q^{-1} b / 2) and centred moments of w come from the
// Isserlis recursion with covariance Sigma = Q^{-1} / 2.
//
// Kernels are always handled in (x, y) coordinates; transforms that need
// other coordinates (Wigner pairs, partial traces) pull the kernel back
// along an explicit linear map, so there is no separate Jacobian to track.

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "polygauss/kernel.hpp"

namespace polygauss {

struct WickOptions {
  unsigned degree_cap = 16;  // total degree of the prefactor in the integration variables
};

template <class T>
struct QuadraticExponent {
  using complex = complex_t<T>;
  using Poly = MultiPoly<complex>;

  ComplexSymMatrix<T> Q;
  std::vector<Poly> linear;  // one entry per integration variable, in the external variables
  Poly constant;             // in the external variables

  QuadraticExponent(ComplexSymMatrix<T> q, std::vector<Poly> lin, Poly c)
      : Q(std::move(q)), linear(std::move(lin)), constant(std::move(c)) {
    if (linear.size() != Q.dim()) throw input_error("QuadraticExponent: need one linear entry per variable");
    for (const auto& l : linear)
      if (l.nvars() != constant.nvars()) throw input_error("QuadraticExponent: external variable counts disagree");
  }

  /// exp(-z^T Q z) with no linear or constant part and no external variables.
  static QuadraticExponent centred(ComplexSymMatrix<T> q, std::size_t external = 0) {
    const std::size_t m = q.dim();
    return QuadraticExponent(std::move(q), std::vector<Poly>(m, Poly(external)), Poly(external));
  }

  static QuadraticExponent real_centred(const RealSymMatrix<T>& q) {
    return centred(ComplexSymMatrix<T>(q.matrix().template cast<complex>()));
  }

  std::size_t m() const { return Q.dim(); }
  std::size_t external() const { return constant.nvars(); }
};

/// scalar * poly(u) * exp(exponent(u)).
template <class T>
struct GaussianMomentResult {
  using complex = complex_t<T>;
  using Poly = MultiPoly<complex>;

  complex scalar;  // pi^{m/2} / sqrt(det Q)
  Poly poly;
  Poly exponent;  // b^T Q^{-1} b / 4 + c, quadratic when b is affine

  std::size_t external() const { return poly.nvars(); }

  complex evaluate(std::span<const T> u) const {
    using std::exp;
    return scalar * poly.evaluate(u) * exp(exponent.evaluate(u));
  }

  /// The value when there are no external variables.
  complex value() const {
    if (external() != 0) throw input_error("GaussianMomentResult::value: result depends on external variables");
    return evaluate(std::span<const T>{});
  }
};

namespace detail {

/// E[w^beta] for w ~ exp(-w^T Q w), memoised on the exponent vector.
template <class T>
class CentredMoments {
 public:
  using complex = complex_t<T>;

  explicit CentredMoments(Matrix<complex> sigma) : sigma_(std::move(sigma)) {}

  complex operator()(const Exponent& beta) {
    const unsigned d = total_degree(beta);
    if (d == 0) return complex(1);
    if (d % 2 == 1) return complex(0);
    if (auto it = memo_.find(beta); it != memo_.end()) return it->second;
    const std::size_t i = static_cast<std::size_t>(
        std::find_if(beta.begin(), beta.end(), [](unsigned v) { return v > 0; }) - beta.begin());
    Exponent rest = beta;
    --rest[i];
    complex sum(0);
    for (std::size_t t = 0; t < rest.size(); ++t) {
      if (rest[t] == 0 || sigma_(i, t) == complex(0)) continue;
      const unsigned mult = rest[t];
      --rest[t];
      sum += sigma_(i, t) * complex(real_t<complex>(mult)) * (*this)(rest);
      ++rest[t];
    }
    memo_.emplace(beta, sum);
    return sum;
  }

 private:
  Matrix<complex> sigma_;
  std::map<Exponent, complex> memo_;
};

template <class T>
void require_re_positive(const ComplexSymMatrix<T>& q, const char* what) {
  if (!positive_definite(RealSymMatrix<T>(q.real_part())))
    throw input_error(std::string(what) + ": real part of the quadratic form is not positive definite");
}

template <class C>
unsigned internal_degree(const MultiPoly<C>& p, std::size_t m) {
  unsigned d = 0;
  for (const auto& [e, c] : p.terms()) d = std::max(d, std::accumulate(e.begin(), e.begin() + m, 0u));
  return d;
}

}  // namespace detail

/// int prefactor(z, u) exp(-z^T Q z + b(u)^T z + c(u)) dz.  The prefactor's
/// variables are the m integration variables followed by the external ones.
template <class T>
GaussianMomentResult<T> poly_gaussian_integral(const MultiPoly<complex_t<T>>& prefactor,
                                               const QuadraticExponent<T>& q, const WickOptions& opts = {}) {
  using Cx = complex_t<T>;
  using Poly = MultiPoly<Cx>;
  const std::size_t m = q.m();
  const std::size_t e = q.external();
  if (prefactor.nvars() != m + e) throw input_error("poly_gaussian_integral: prefactor must have m + external variables");
  detail::require_re_positive(q.Q, "poly_gaussian_integral");
  if (detail::internal_degree(prefactor, m) > opts.degree_cap)
    throw input_error("poly_gaussian_integral: prefactor degree exceeds the configured cap");

  const Matrix<Cx> q_inv = inverse(q.Q.matrix());
  using std::sqrt;
  T root_pi_m(1);
  for (std::size_t i = 0; i < m; ++i) root_pi_m *= sqrt(pi_v<T>());
  const Cx scalar = Cx(root_pi_m) / complex_sqrt_det(q.Q);

  // mu(u) = Q^{-1} b(u) / 2, exponent = c + b^T mu / 2
  std::vector<Poly> mu(m, Poly(e));
  bool centred = true;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (q.linear[j].is_zero()) continue;
      Poly term = q.linear[j];
      term *= q_inv(i, j) * Cx(T(0.5));
      mu[i] += term;
    }
    centred = centred && mu[i].is_zero();
  }
  Poly exponent = q.constant;
  for (std::size_t i = 0; i < m; ++i) {
    if (mu[i].is_zero()) continue;
    Poly term = q.linear[i] * mu[i];
    term *= Cx(T(0.5));
    exponent += term;
  }

  Poly shifted = prefactor;
  if (!centred) {
    std::vector<Poly> images;
    images.reserve(m + e);
    std::vector<std::size_t> lift(e);
    std::iota(lift.begin(), lift.end(), m);
    for (std::size_t i = 0; i < m; ++i)
      images.push_back(Poly::variable(m + e, i) + mu[i].remap(lift, m + e));
    for (std::size_t k = 0; k < e; ++k) images.push_back(Poly::variable(m + e, m + k));
    shifted = prefactor.substitute(images);
  }

  Matrix<Cx> sigma = q_inv;
  sigma *= Cx(T(0.5));
  detail::CentredMoments<T> moments(std::move(sigma));
  Poly poly(e);
  Exponent beta(m), gamma(e);
  for (const auto& [ex, c] : shifted.terms()) {
    std::copy(ex.begin(), ex.begin() + m, beta.begin());
    std::copy(ex.begin() + m, ex.end(), gamma.begin());
    const Cx w = moments(beta);
    if (w == Cx(0)) continue;
    poly.add_term(gamma, c * w);
  }
  poly.prune();
  return {scalar, std::move(poly), std::move(exponent)};
}

template <class T>
GaussianMomentResult<T> gaussian_integral(const QuadraticExponent<T>& q) {
  using Cx = complex_t<T>;
  return poly_gaussian_integral(MultiPoly<Cx>::constant(q.m() + q.external(), Cx(1)), q);
}

namespace detail {

template <class T>
struct Pullback {
  GaussianMomentResult<T> result;
  ComplexSymMatrix<T> remaining;  // exp(-u^T K' u) left over in the external variables
};

/// int p(L w) exp(-(L w)^T K (L w) - 2 t^T X u) dt with w = (t, u), t the
/// first m coordinates.  K' is the Schur complement of the t-block.
template <class T>
Pullback<T> integrate_pullback(const MultiPoly<complex_t<T>>& p, const Matrix<complex_t<T>>& K, const Matrix<T>& L,
                               std::size_t m, const Matrix<complex_t<T>>& X, const WickOptions& opts) {
  using Cx = complex_t<T>;
  using Poly = MultiPoly<Cx>;
  const std::size_t total = L.cols();
  const std::size_t e = total - m;
  const Matrix<Cx> Lc = L.template cast<Cx>();
  const Matrix<Cx> H = Lc.transpose() * K * Lc;
  const Matrix<Cx> htt = H.block(0, 0, m, m);
  const Matrix<Cx> htu = H.block(0, m, m, e) + X;
  const Matrix<Cx> huu = H.block(m, m, e, e);

  std::vector<Poly> linear(m, Poly(e));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < e; ++k)
      if (htu(i, k) != Cx(0)) linear[i] += Poly::variable(e, k, Cx(T(-2)) * htu(i, k));
  Poly constant(e);
  for (std::size_t k = 0; k < e; ++k) {
    for (std::size_t l = k; l < e; ++l) {
      if (huu(k, l) == Cx(0)) continue;
      Exponent ex(e, 0);
      ++ex[k];
      ++ex[l];
      constant.add_term(ex, (k == l ? Cx(T(-1)) : Cx(T(-2))) * huu(k, l));
    }
  }

  std::vector<Poly> images;
  images.reserve(L.rows());
  for (std::size_t r = 0; r < L.rows(); ++r) {
    Poly img(total);
    for (std::size_t c = 0; c < total; ++c)
      if (L(r, c) != T(0)) img += Poly::variable(total, c, Cx(L(r, c)));
    images.push_back(std::move(img));
  }
  const Poly prefactor = p.substitute(images);

  QuadraticExponent<T> q(ComplexSymMatrix<T>(htt), std::move(linear), std::move(constant));
  auto result = poly_gaussian_integral(prefactor, q, opts);
  const Matrix<Cx> remaining = huu - htu.transpose() * inverse(htt) * htu;
  return {std::move(result), ComplexSymMatrix<T>(remaining)};
}

template <class T>
PolyGaussianKernel<T> kernel_from_pullback(const Pullback<T>& pb, const T& norm) {
  using Cx = complex_t<T>;
  const T mag = magnitude(pb.result.scalar);
  MultiPoly<Cx> poly = pb.result.poly;
  poly *= pb.result.scalar / Cx(mag);
  return PolyGaussianKernel<T>(std::move(poly), triple_from_exponent_form(pb.remaining), norm * mag);
}

}  // namespace detail

/// Integrates out the listed coordinates (1-based).  diagonal = true sets
/// y_i = x_i first (partial trace); otherwise x_i and y_i are integrated
/// independently (marginalisation).
template <class T>
PolyGaussianKernel<T> integrate_out(const PolyGaussianKernel<T>& k, std::vector<std::size_t> coords, bool diagonal,
                                    const WickOptions& opts = {}) {
  using Cx = complex_t<T>;
  const std::size_t n = k.n();
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  if (coords.empty() || coords.size() >= n) throw input_error("integrate_out: need a nonempty proper subset");
  if (coords.front() < 1 || coords.back() > n) throw input_error("integrate_out: coordinate out of range");
  std::vector<bool> traced(n, false);
  for (auto c : coords) traced[c - 1] = true;

  const std::size_t d = coords.size();
  const std::size_t kept = n - d;
  const std::size_t m = diagonal ? d : 2 * d;
  Matrix<T> L(2 * n, m + 2 * kept);
  std::size_t ti = 0, ki = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (traced[i]) {
      L(i, ti) = T(1);
      L(n + i, diagonal ? ti : d + ti) = T(1);
      ++ti;
    } else {
      L(i, m + ki) = T(1);
      L(n + i, m + kept + ki) = T(1);
      ++ki;
    }
  }
  const auto pb = detail::integrate_pullback<T>(k.poly(), exponent_form(k.triple()).matrix(), L, m,
                                                Matrix<Cx>(m, 2 * kept), opts);
  return detail::kernel_from_pullback(pb, k.norm());
}

template <class T>
struct WignerForm {
  RealSymMatrix<T> G;
  MultiPoly<complex_t<T>> Q;  // in (x, p)
  complex_t<T> scale;         // W(x,p) = scale * Q(x,p) * exp(-v^T G v)

  complex_t<T> operator()(std::span<const T> x, std::span<const T> p) const {
    const std::size_t n = G.dim() / 2;
    std::vector<T> v(x.begin(), x.end());
    v.insert(v.end(), p.begin(), p.end());
    if (v.size() != 2 * n) throw input_error("WignerForm: dimension mismatch");
    const auto gv = G.matrix() * v;
    T quad(0);
    for (std::size_t i = 0; i < v.size(); ++i) quad += v[i] * gv[i];
    using std::exp;
    return scale * Q.evaluate(std::span<const T>(v)) * complex_t<T>(exp(-quad));
  }
};

/// W(x,p) = (2 pi)^-n int exp(-i p.y) k(x + y/2, x - y/2) dy.
template <class T>
WignerForm<T> wigner_transform(const PolyGaussianKernel<T>& k, const WickOptions& opts = {}) {
  using Cx = complex_t<T>;
  const std::size_t n = k.n();
  // w = (y, x, p)
  Matrix<T> L(2 * n, 3 * n);
  Matrix<Cx> X(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    L(i, n + i) = T(1);
    L(i, i) = T(0.5);
    L(n + i, n + i) = T(1);
    L(n + i, i) = T(-0.5);
    X(i, n + i) = make_complex(T(0), T(0.5));
  }
  const auto pb = detail::integrate_pullback<T>(k.poly(), exponent_form(k.triple()).matrix(), L, n, X, opts);
  const Matrix<T> im_rem = pb.remaining.imag_part();
  const Matrix<T> re_rem = pb.remaining.real_part();
  if (frobenius_norm(im_rem) > T(1e-9) * frobenius_norm(re_rem))
    throw numerical_error("wigner_transform: phase-space form is not real");
  T two_pi_n(1);
  for (std::size_t i = 0; i < n; ++i) two_pi_n *= T(2) * pi_v<T>();
  return {RealSymMatrix<T>(re_rem), pb.result.poly, pb.result.scalar * Cx(k.norm() / two_pi_n)};
}

/// k(x, y) = int W((x+y)/2, p) exp(i p.(x-y)) dp, returned as a kernel.
template <class T>
PolyGaussianKernel<T> inverse_wigner_transform(const WignerForm<T>& w, const WickOptions& opts = {}) {
  using Cx = complex_t<T>;
  const std::size_t n = w.G.dim() / 2;
  // w = (p, x, y); (X, p) = L w
  Matrix<T> L(2 * n, 3 * n);
  Matrix<Cx> X(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    L(i, n + i) = T(0.5);
    L(i, 2 * n + i) = T(0.5);
    L(n + i, i) = T(1);
    X(i, i) = make_complex(T(0), T(-0.5));
    X(i, n + i) = make_complex(T(0), T(0.5));
  }
  auto pb = detail::integrate_pullback<T>(w.Q, w.G.matrix().template cast<Cx>(), L, n, X, opts);
  pb.result.scalar *= w.scale;
  return detail::kernel_from_pullback(pb, T(1));
}

}  // namespace polygauss
