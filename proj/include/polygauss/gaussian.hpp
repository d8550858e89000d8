#pragma once

// Gaussian triples (A, B, C) and the kernel
//   kappa_G(x, y) = exp{-(x-y)^T A (x-y) - i (x-y)^T B (x+y) - (x+y)^T C (x+y)}.
// Positivity is decided on the Williamson spectrum of the phase-space matrix.

#include <optional>
#include <span>
#include <vector>

#include "polygauss/numerics.hpp"

namespace polygauss {

template <class T>
struct GaussianTriple {
  RealSymMatrix<T> A;
  Matrix<T> B;
  RealSymMatrix<T> C;

  GaussianTriple() = default;
  GaussianTriple(RealSymMatrix<T> a, Matrix<T> b, RealSymMatrix<T> c)
      : A(std::move(a)), B(std::move(b)), C(std::move(c)) {
    const std::size_t n = A.dim();
    if (n == 0) throw input_error("GaussianTriple: dimension must be positive");
    if (C.dim() != n || B.rows() != n || B.cols() != n)
      throw input_error("GaussianTriple: A, B, C dimensions disagree");
    if (!all_finite(B)) throw input_error("GaussianTriple: non-finite entry in B");
  }

  /// Scalar triple for n = 1.
  static GaussianTriple scalar(const T& a, const T& b, const T& c) {
    return GaussianTriple(RealSymMatrix<T>::scalar(1, a), Matrix<T>(1, 1, b), RealSymMatrix<T>::scalar(1, c));
  }

  std::size_t n() const { return A.dim(); }

  /// A and C positive definite, i.e. the kernel is square integrable.
  bool kernel_valid() const { return positive_definite(A) && positive_definite(C); }

  template <class U>
  GaussianTriple<U> cast() const {
    return GaussianTriple<U>(A.template cast<U>(), B.template cast<U>(), C.template cast<U>());
  }

  bool operator==(const GaussianTriple& o) const {
    return A.matrix() == o.A.matrix() && B == o.B && C.matrix() == o.C.matrix();
  }
};

namespace detail {
template <class T>
void require_same_dim(const GaussianTriple<T>& g0, const GaussianTriple<T>& g1) {
  if (g0.n() != g1.n()) throw input_error("triples have different dimensions");
}

template <class T>
void require_kernel_valid(const GaussianTriple<T>& g, const char* what) {
  if (!g.kernel_valid()) throw input_error(std::string(what) + ": A and C must be positive definite");
}
}  // namespace detail

template <class T>
complex_t<T> eval_gaussian(const GaussianTriple<T>& g, std::span<const T> x, std::span<const T> y) {
  const std::size_t n = g.n();
  if (x.size() != n || y.size() != n) throw input_error("eval_gaussian: |x| and |y| must equal n");
  std::vector<T> d(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = x[i] - y[i];
    s[i] = x[i] + y[i];
  }
  const auto Ad = g.A.matrix() * d;
  const auto Bs = g.B * s;
  const auto Cs = g.C.matrix() * s;
  T re_part(0), im_part(0);
  for (std::size_t i = 0; i < n; ++i) {
    re_part -= d[i] * Ad[i] + s[i] * Cs[i];
    im_part -= d[i] * Bs[i];
  }
  using std::exp;
  return exp(make_complex(re_part, im_part));
}

/// K with kappa_G(x, y) = exp(-v^T K v), v = (x, y).
template <class T>
ComplexSymMatrix<T> exponent_form(const GaussianTriple<T>& g) {
  using Cx = complex_t<T>;
  const std::size_t n = g.n();
  Matrix<Cx> K(2 * n, 2 * n);
  const auto& A = g.A.matrix();
  const auto& C = g.C.matrix();
  const auto& B = g.B;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const T bs = (B(i, j) + B(j, i)) / T(2);
      const T ba = (B(i, j) - B(j, i)) / T(2);
      K(i, j) = make_complex(T(A(i, j) + C(i, j)), bs);
      K(n + i, n + j) = make_complex(T(A(i, j) + C(i, j)), T(-bs));
      K(i, n + j) = make_complex(T(C(i, j) - A(i, j)), ba);
      K(n + j, i) = K(i, n + j);
    }
  }
  return ComplexSymMatrix<T>(K);
}

/// Inverse of exponent_form.  Rejects exponents that are not of kernel form
/// (beyond a relative tolerance), e.g. Re K_xx != Re K_yy.
template <class T>
GaussianTriple<T> triple_from_exponent_form(const ComplexSymMatrix<T>& K, T rel_tol = T(1e-9)) {
  if (K.dim() % 2 != 0) throw input_error("triple_from_exponent_form: odd dimension");
  const std::size_t n = K.dim() / 2;
  const Matrix<T> re_k = K.real_part();
  const Matrix<T> im_k = K.imag_part();
  const T scale = frobenius_norm(re_k) + frobenius_norm(im_k) + T(1e-300);
  const Matrix<T> rxx = re_k.block(0, 0, n, n), ryy = re_k.block(n, n, n, n), rxy = re_k.block(0, n, n, n);
  const Matrix<T> ixx = im_k.block(0, 0, n, n), iyy = im_k.block(n, n, n, n), ixy = im_k.block(0, n, n, n);
  const T defect = frobenius_norm(Matrix<T>(rxx - ryy)) + frobenius_norm(Matrix<T>(ixx + iyy)) +
                   frobenius_norm(Matrix<T>(rxy - rxy.transpose())) +
                   frobenius_norm(Matrix<T>(ixy + ixy.transpose()));
  if (defect > rel_tol * scale) throw numerical_error("exponent is not of polynomial-Gaussian kernel form");
  const Matrix<T> rxx_s = (rxx + ryy) * T(0.5);
  const Matrix<T> rxy_s = (rxy + rxy.transpose()) * T(0.5);
  const Matrix<T> ixx_s = (ixx - iyy) * T(0.5);
  const Matrix<T> ixy_a = (ixy - ixy.transpose()) * T(0.5);
  return GaussianTriple<T>(RealSymMatrix<T>((rxx_s - rxy_s) * T(0.5)), ixx_s + ixy_a,
                           RealSymMatrix<T>((rxx_s + rxy_s) * T(0.5)));
}

template <class T>
struct PhaseSpaceForm {
  RealSymMatrix<T> G;
  T c_G;  // W(x,p) = c_G exp(-v^T G v) for the unit-norm kernel
};

/// Phase-space quadratic form of the Wigner transform of kappa_G, with the
/// transform normalised as (2 pi)^-n int exp(-i p.y) kappa(x+y/2, x-y/2) dy.
/// Then c_G = 2^-n pi^-n/2 det(A)^-1/2.
template <class T>
PhaseSpaceForm<T> phase_space_form(const GaussianTriple<T>& g) {
  using std::sqrt;
  detail::require_kernel_valid(g, "phase_space_form");
  const std::size_t n = g.n();
  const LuDecomposition<T> lu(g.A.matrix());
  const Matrix<T> a_inv = lu.inverse();
  const Matrix<T> a_inv_b = a_inv * g.B;
  Matrix<T> G(2 * n, 2 * n);
  G.set_block(0, 0, g.C.matrix() * T(4) + g.B.transpose() * a_inv_b);
  G.set_block(0, n, a_inv_b.transpose() * T(0.5));
  G.set_block(n, 0, a_inv_b * T(0.5));
  G.set_block(n, n, a_inv * T(0.25));
  const T det_a = lu.determinant();
  T c = T(1) / sqrt(det_a);
  for (std::size_t i = 0; i < n; ++i) c /= T(2) * sqrt(pi_v<T>());
  return {RealSymMatrix<T>(G), c};
}

template <class T>
struct SymplecticSpectrum {
  std::vector<T> mus;  // descending, one per +-mu pair

  T max_mu() const { return mus.front(); }
};

template <class T>
Matrix<T> symplectic_form(std::size_t n) {
  Matrix<T> omega(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    omega(i, n + i) = T(1);
    omega(n + i, i) = T(-1);
  }
  return omega;
}

/// Williamson eigenvalues of a positive definite G: the singular values of the
/// skew matrix K = G^{1/2} Omega G^{1/2}, obtained as square roots of the
/// doubly degenerate eigenvalues of -K^2.
template <class T>
SymplecticSpectrum<T> symplectic_spectrum(const RealSymMatrix<T>& G) {
  using std::abs;
  using std::sqrt;
  if (G.dim() == 0 || G.dim() % 2 != 0) throw input_error("symplectic_spectrum: G must be 2n x 2n");
  if (!positive_definite(G)) throw input_error("symplectic_spectrum: G is not positive definite");
  const std::size_t n = G.dim() / 2;
  const Matrix<T> root = psd_sqrt(G).matrix();
  const Matrix<T> K = root * symplectic_form<T>(n) * root;
  const Matrix<T> neg_k2 = -(K * K);
  auto values = sym_eig(RealSymMatrix<T>(neg_k2)).values;
  std::sort(values.begin(), values.end(), [](const T& a, const T& b) { return a > b; });
  SymplecticSpectrum<T> out;
  for (std::size_t k = 0; k < n; ++k) {
    const T a = sqrt(std::max(values[2 * k], T(0)));
    const T b = sqrt(std::max(values[2 * k + 1], T(0)));
    if (abs(a - b) > T(1e-8) * std::max(a, b)) {
      throw numerical_error("symplectic_spectrum: singular values do not pair up");
    }
    out.mus.push_back((a + b) / T(2));
  }
  return out;
}

template <class T>
struct GaussianVerdict {
  bool positive = false;
  SymplecticSpectrum<T> spectrum;

  T max_mu() const { return spectrum.max_mu(); }
  /// 1 - max mu; negative when positivity fails.
  T margin() const { return T(1) - max_mu(); }
};

inline constexpr double kMuTolerance = 1e-10;

/// Positive semidefiniteness of kappa_G: every Williamson eigenvalue <= 1.
template <class T>
GaussianVerdict<T> gaussian_positive(const GaussianTriple<T>& g) {
  detail::require_kernel_valid(g, "gaussian_positive");
  GaussianVerdict<T> v;
  v.spectrum = symplectic_spectrum(phase_space_form(g).G);
  v.positive = v.spectrum.max_mu() <= T(1) + T(kMuTolerance);
  return v;
}

template <class T>
struct PreorderWitness {
  T r;
  GaussianTriple<T> triple;  // (A1-A0+rI, B1-B0, C1-C0+rI)
  SymplecticSpectrum<T> spectrum;
};

template <class T>
struct PreorderResult {
  bool holds = false;
  PreorderWitness<T> witness;

  T max_mu() const { return witness.spectrum.max_mu(); }
};

/// The default shift: smallest r making both difference blocks PD, plus 1.
template <class T>
T preorder_shift(const GaussianTriple<T>& g0, const GaussianTriple<T>& g1) {
  detail::require_same_dim(g0, g1);
  const T la = min_eigenvalue(g1.A - g0.A);
  const T lc = min_eigenvalue(g1.C - g0.C);
  return std::max({T(0), T(-la), T(-lc)}) + T(1);
}

/// g0 <= g1 tested with an explicit shift r.  Any r making both shifted
/// blocks positive definite gives the same answer.
template <class T>
PreorderResult<T> preorder_leq_with_shift(const GaussianTriple<T>& g0, const GaussianTriple<T>& g1, const T& r) {
  detail::require_same_dim(g0, g1);
  const std::size_t n = g0.n();
  const auto shift = RealSymMatrix<T>::scalar(n, r);
  GaussianTriple<T> w(g1.A - g0.A + shift, g1.B - g0.B, g1.C - g0.C + shift);
  if (!w.kernel_valid()) throw input_error("preorder_leq: shift too small for a kernel-valid witness");
  const auto verdict = gaussian_positive(w);
  PreorderResult<T> out{verdict.positive, {r, std::move(w), verdict.spectrum}};
  if (out.holds) {
    // A1 - C1 >= A0 - C0 is necessary.
    const RealSymMatrix<T> dd = (g1.A - g1.C) - (g0.A - g0.C);
    const T scale = T(1) + frobenius_norm(g0.A.matrix()) + frobenius_norm(g1.A.matrix()) +
                    frobenius_norm(g0.C.matrix()) + frobenius_norm(g1.C.matrix());
    if (min_eigenvalue(dd) < T(-1e-10) * scale) {
      throw numerical_error("preorder_leq: witness positive but A1-C1 >= A0-C0 fails");
    }
  }
  return out;
}

template <class T>
PreorderResult<T> preorder_leq(const GaussianTriple<T>& g0, const GaussianTriple<T>& g1) {
  return preorder_leq_with_shift(g0, g1, preorder_shift(g0, g1));
}

namespace detail {
template <class T>
T triple_scale(const GaussianTriple<T>& g0, const GaussianTriple<T>& g1) {
  return std::max({T(1), frobenius_norm(g0.A.matrix()), frobenius_norm(g1.A.matrix()), frobenius_norm(g0.C.matrix()),
                   frobenius_norm(g1.C.matrix()), frobenius_norm(g0.B), frobenius_norm(g1.B)});
}
}  // namespace detail

/// g0 ~ g1: A1-C1 = A0-C0 and B1-B0 symmetric.
template <class T>
bool equiv(const GaussianTriple<T>& g0, const GaussianTriple<T>& g1) {
  detail::require_same_dim(g0, g1);
  const T tol = T(1e-12) * detail::triple_scale(g0, g1);
  const Matrix<T> dd = (g1.A.matrix() - g1.C.matrix()) - (g0.A.matrix() - g0.C.matrix());
  const Matrix<T> db = g1.B - g0.B;
  return frobenius_norm(dd) <= tol && frobenius_norm(Matrix<T>(db - db.transpose())) <= tol;
}

/// A1-C1 >= A0-C0 and B1-B0 symmetric; implies g0 <= g1.
template <class T>
bool sufficient_leq(const GaussianTriple<T>& g0, const GaussianTriple<T>& g1) {
  detail::require_same_dim(g0, g1);
  const T tol = T(1e-12) * detail::triple_scale(g0, g1);
  const RealSymMatrix<T> dd = (g1.A - g1.C) - (g0.A - g0.C);
  const Matrix<T> db = g1.B - g0.B;
  return min_eigenvalue(dd) >= -tol && frobenius_norm(Matrix<T>(db - db.transpose())) <= tol;
}

}  // namespace polygauss
