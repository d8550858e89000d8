#pragma once

// Named kernels used by the CLI, the tests and the demos.

#include <string>

#include "polygauss/entangle.hpp"

namespace polygauss::fixtures {

/// gamma (x+y)^2 - (x-y)^2 + 1
template <class T>
MultiPoly<complex_t<T>> kappa_gamma_poly(const T& gamma) {
  using Cx = complex_t<T>;
  MultiPoly<Cx> p(2);
  p.add_term({2, 0}, Cx(gamma - T(1)));
  p.add_term({0, 2}, Cx(gamma - T(1)));
  p.add_term({1, 1}, Cx(T(2) * (gamma + T(1))));
  p.add_term({0, 0}, Cx(1));
  return p;
}

/// The shifted family with Gaussian exponent -(3/2 + delta)(x-y)^2 - (1 + delta)(x+y)^2,
/// normalised to unit trace: norm = 4 (1+delta)^{3/2} / (sqrt(pi) (2 + 2 delta + gamma)).
template <class T>
PolyGaussianKernel<T> kappa_gamma_delta(const T& gamma, const T& delta) {
  using std::sqrt;
  if (!(delta > T(-1))) throw input_error("kappa_gamma_delta: delta must exceed -1");
  if (!(gamma >= T(0))) throw input_error("kappa_gamma_delta: gamma must be nonnegative");
  const T one_d = T(1) + delta;
  const T norm = T(4) * one_d * sqrt(one_d) / (sqrt(pi_v<T>()) * (T(2) + T(2) * delta + gamma));
  return PolyGaussianKernel<T>(kappa_gamma_poly(gamma),
                               GaussianTriple<T>::scalar(T(3) / T(2) + delta, T(0), one_d), norm);
}

template <class T>
KernelFamily<T> kappa_gamma_family(const T& delta) {
  return [delta](const T& gamma) { return kappa_gamma_delta(gamma, delta); };
}

/// Physicists' Hermite polynomial H_n(beta * v) in variable `index` of `nvars`.
template <class T>
MultiPoly<complex_t<T>> hermite(unsigned n, const T& beta, std::size_t nvars, std::size_t index) {
  using Cx = complex_t<T>;
  using Poly = MultiPoly<Cx>;
  const Poly t = Poly::variable(nvars, index, Cx(beta));
  Poly prev = Poly::constant(nvars, Cx(1));
  if (n == 0) return prev;
  Poly cur = t * Cx(T(2));
  for (unsigned k = 1; k < n; ++k) {
    Poly next = t * cur * Cx(T(2)) - prev * Cx(T(2 * k));
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/// Oscillator initial states H_n(beta x) H_n(beta y) exp(-beta^2 R^2 - beta^2 r^2 / 4)
/// with R = (x+y)/2, r = x-y, i.e. A = C = beta^2 / 4, B = 0, and unit trace.
template <class T>
PolyGaussianKernel<T> caldeira(unsigned n, const T& beta) {
  using std::sqrt;
  if (n > 2) throw input_error("caldeira: supported levels are 0, 1, 2");
  if (!(beta > T(0))) throw input_error("caldeira: beta must be positive");
  const auto p = hermite(n, beta, 2, 0) * hermite(n, beta, 2, 1);
  T norm = beta / sqrt(pi_v<T>());
  for (unsigned k = 1; k <= n; ++k) norm /= T(2 * k);
  const T q = beta * beta / T(4);
  return PolyGaussianKernel<T>(p, GaussianTriple<T>::scalar(q, T(0), q), norm);
}

/// delta -> infinity limit polynomials whose positive roots are Z_3 = Z_4 and Z_5.
template <class T>
T limit_poly_k34(const T& g) {
  return ((g - T(5) / T(2)) * g - T(15) / T(2)) * g - T(9) / T(4);
}

template <class T>
T limit_poly_k5(const T& g) {
  return ((T(16) * g - T(34)) * g - T(120)) * g - T(15);
}

/// A 1+1 Gaussian state that is not PPT: B = 0, A = [[1, .4], [.4, 1]],
/// C = [[.55, t], [t, .55]] with t = 0.4.  The partial transpose has
/// max mu = 1.25830574 (A - C >= 0 but L A L - C is indefinite).
inline GaussianTriple<double> npt_pair() {
  return GaussianTriple<double>(RealSymMatrix<double>(Matrix<double>::from_rows({{1.0, 0.4}, {0.4, 1.0}})),
                                Matrix<double>(2, 2),
                                RealSymMatrix<double>(Matrix<double>::from_rows({{0.55, 0.4}, {0.4, 0.55}})));
}
inline constexpr double npt_pair_coupling = 0.4;
inline constexpr double npt_pair_pt_mu = 1.25830574;

}  // namespace polygauss::fixtures
