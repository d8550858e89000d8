#pragma once

// Dense small-matrix substrate: symmetric eigendecomposition, PSD square
// roots, pivoted LU, branch-safe sqrt(det) of complex symmetric matrices and
// bisection root finding.  Everything is templated on the scalar so the same
// code runs in double and in the fixed-width multiprecision type.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "polygauss/scalar.hpp"

namespace polygauss {

template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, S fill = S(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<S>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw input_error("Matrix::from_rows: ragged rows");
      std::size_t j = 0;
      for (const auto& v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  static Matrix from_row_major(std::size_t rows, std::size_t cols, std::span<const S> values) {
    if (values.size() != rows * cols) {
      std::ostringstream os;
      os << "expected " << rows * cols << " entries, got " << values.size();
      throw input_error(os.str());
    }
    Matrix m(rows, cols);
    std::copy(values.begin(), values.end(), m.data_.begin());
    return m;
  }

  static Matrix diagonal(std::span<const S> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const S> row_major() const { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    Matrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  template <class U>
  Matrix<U> cast() const {
    Matrix<U> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = U((*this)(i, j));
    return out;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const S& s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const S& s) { return a *= s; }
  friend Matrix operator*(const S& s, Matrix a) { return a *= s; }
  friend Matrix operator-(Matrix a) {
    for (auto& v : a.data_) v = -v;
    return a;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw input_error("Matrix product: inner dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const S aik = a(i, k);
        if (aik == S(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend std::vector<S> operator*(const Matrix& a, const std::vector<S>& x) {
    if (a.cols_ != x.size()) throw input_error("Matrix-vector product: dimension mismatch");
    std::vector<S> y(a.rows_, S(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
    return y;
  }

  bool operator==(const Matrix& o) const = default;

 private:
  void check_same(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw input_error("Matrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
};

template <class S>
real_t<S> frobenius_norm(const Matrix<S>& m) {
  using std::sqrt;
  real_t<S> s(0);
  for (const auto& v : m.row_major()) {
    const auto a = magnitude(v);
    s += a * a;
  }
  return sqrt(s);
}

template <class S>
bool all_finite(const Matrix<S>& m) {
  return std::all_of(m.row_major().begin(), m.row_major().end(),
                     [](const S& v) { return finite(v); });
}

namespace detail {

// Symmetrise when the asymmetry is roundoff-sized, reject otherwise.
template <class S>
Matrix<S> enforce_symmetry(const Matrix<S>& m, const char* what) {
  if (!m.square()) throw input_error(std::string(what) + ": matrix must be square");
  if (!all_finite(m)) throw input_error(std::string(what) + ": non-finite entry");
  const Matrix<S> skew = m - m.transpose();
  const auto norm = frobenius_norm(m);
  if (frobenius_norm(skew) > real_t<S>(1e-12) * norm) {
    throw input_error(std::string(what) + ": matrix is not symmetric");
  }
  Matrix<S> sym = m + m.transpose();
  sym *= S(real_t<S>(0.5));
  return sym;
}

}  // namespace detail

/// Real symmetric n x n matrix.  Symmetry is enforced at construction.
template <class T>
class RealSymMatrix {
 public:
  RealSymMatrix() = default;
  explicit RealSymMatrix(const Matrix<T>& m) : m_(detail::enforce_symmetry(m, "RealSymMatrix")) {}

  static RealSymMatrix identity(std::size_t n) { return RealSymMatrix(Matrix<T>::identity(n)); }
  static RealSymMatrix scalar(std::size_t n, const T& s) { return RealSymMatrix(Matrix<T>::identity(n) * s); }

  std::size_t dim() const { return m_.rows(); }
  const Matrix<T>& matrix() const { return m_; }
  const T& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  template <class U>
  RealSymMatrix<U> cast() const {
    return RealSymMatrix<U>(m_.template cast<U>());
  }

  friend RealSymMatrix operator+(const RealSymMatrix& a, const RealSymMatrix& b) {
    return RealSymMatrix(a.m_ + b.m_);
  }
  friend RealSymMatrix operator-(const RealSymMatrix& a, const RealSymMatrix& b) {
    return RealSymMatrix(a.m_ - b.m_);
  }
  friend RealSymMatrix operator*(const T& s, const RealSymMatrix& a) { return RealSymMatrix(a.m_ * s); }

 private:
  Matrix<T> m_;
};

/// Complex symmetric (not Hermitian) matrix, e.g. a Gaussian quadratic form.
template <class T>
class ComplexSymMatrix {
 public:
  using complex = complex_t<T>;
  ComplexSymMatrix() = default;
  explicit ComplexSymMatrix(const Matrix<complex>& m)
      : m_(detail::enforce_symmetry(m, "ComplexSymMatrix")) {}

  std::size_t dim() const { return m_.rows(); }
  const Matrix<complex>& matrix() const { return m_; }
  const complex& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  Matrix<T> real_part() const {
    Matrix<T> r(dim(), dim());
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) r(i, j) = re(m_(i, j));
    return r;
  }
  Matrix<T> imag_part() const {
    Matrix<T> r(dim(), dim());
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) r(i, j) = im(m_(i, j));
    return r;
  }

 private:
  Matrix<complex> m_;
};

template <class T>
struct SymEig {
  std::vector<T> values;  // ascending
  Matrix<T> vectors;      // column k pairs with values[k]
};

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.
/// Accurate to a few ulps of the norm; intended for dimensions up to ~50.
template <class T>
SymEig<T> sym_eig(const RealSymMatrix<T>& sym) {
  using std::abs;
  using std::sqrt;
  Matrix<T> a = sym.matrix();
  const std::size_t n = a.rows();
  if (!all_finite(a)) throw input_error("sym_eig: non-finite input");
  Matrix<T> v = Matrix<T>::identity(n);
  const T norm = frobenius_norm(a);
  const T eps = std::numeric_limits<T>::epsilon();

  for (int sweep = 0; sweep < 100; ++sweep) {
    T off(0);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (sqrt(off) <= eps * norm * T(1e-2) || off == T(0)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T apq = a(p, q);
        if (apq == T(0)) continue;
        const T theta = (a(q, q) - a(p, p)) / (T(2) * apq);
        T t;
        if (abs(theta) > T(1e60)) {
          t = T(1) / (T(2) * theta);
        } else {
          t = T(1) / (abs(theta) + sqrt(theta * theta + T(1)));
          if (theta < T(0)) t = -t;
        }
        const T c = T(1) / sqrt(t * t + T(1));
        const T s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const T akp = a(k, p);
          const T akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T apk = a(p, k);
          const T aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T vkp = v(k, p);
          const T vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SymEig<T> out{std::vector<T>(n), Matrix<T>(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

template <class T>
T min_eigenvalue(const RealSymMatrix<T>& m) {
  return sym_eig(m).values.front();
}

template <class T>
T max_eigenvalue(const RealSymMatrix<T>& m) {
  return sym_eig(m).values.back();
}

template <class T>
bool positive_definite(const RealSymMatrix<T>& m) {
  return m.dim() > 0 && min_eigenvalue(m) > T(0);
}

// V f(Λ) Vᵀ
template <class T, class F>
Matrix<T> spectral_apply(const SymEig<T>& eig, F&& f) {
  const std::size_t n = eig.values.size();
  Matrix<T> out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const T fk = f(eig.values[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const T vik = eig.vectors(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * eig.vectors(j, k);
    }
  }
  return out;
}

/// Symmetric PSD square root.  Eigenvalues down to -1e-12*||m|| are clamped
/// to zero; anything more negative is rejected.
template <class T>
RealSymMatrix<T> psd_sqrt(const RealSymMatrix<T>& m) {
  using std::sqrt;
  const auto eig = sym_eig(m);
  const T norm = frobenius_norm(m.matrix());
  if (!eig.values.empty() && eig.values.front() < -T(1e-12) * norm) {
    throw input_error("psd_sqrt: matrix is indefinite");
  }
  return RealSymMatrix<T>(spectral_apply(eig, [](const T& l) { return l > T(0) ? T(sqrt(l)) : T(0); }));
}

/// LU factorisation with partial pivoting, real or complex.
template <class S>
class LuDecomposition {
 public:
  explicit LuDecomposition(Matrix<S> m) : lu_(std::move(m)), perm_(lu_.rows()) {
    if (!lu_.square()) throw input_error("LU: matrix must be square");
    const std::size_t n = lu_.rows();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t piv = k;
      real_t<S> best = magnitude(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        const auto mag = magnitude(lu_(i, k));
        if (mag > best) {
          best = mag;
          piv = i;
        }
      }
      if (best == real_t<S>(0)) throw numerical_error("LU: matrix is singular");
      if (piv != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
        std::swap(perm_[k], perm_[piv]);
        odd_ = !odd_;
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        lu_(i, k) /= lu_(k, k);
        const S lik = lu_(i, k);
        if (lik == S(0)) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= lik * lu_(k, j);
      }
    }
  }

  std::size_t dim() const { return lu_.rows(); }

  S determinant() const {
    S d(odd_ ? -1 : 1);
    for (std::size_t i = 0; i < dim(); ++i) d *= lu_(i, i);
    return d;
  }

  std::vector<S> solve(const std::vector<S>& b) const {
    const std::size_t n = dim();
    if (b.size() != n) throw input_error("LU solve: dimension mismatch");
    std::vector<S> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      S s = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
      x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      S s = x[ii];
      for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * x[j];
      x[ii] = s / lu_(ii, ii);
    }
    return x;
  }

  Matrix<S> inverse() const {
    const std::size_t n = dim();
    Matrix<S> inv(n, n);
    std::vector<S> e(n, S(0));
    for (std::size_t j = 0; j < n; ++j) {
      std::fill(e.begin(), e.end(), S(0));
      e[j] = S(1);
      const auto col = solve(e);
      for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
  }

 private:
  Matrix<S> lu_;
  std::vector<std::size_t> perm_;
  bool odd_ = false;
};

template <class S>
Matrix<S> inverse(const Matrix<S>& m) {
  return LuDecomposition<S>(m).inverse();
}

template <class S>
S determinant(const Matrix<S>& m) {
  if (m.rows() == 0) return S(1);
  try {
    return LuDecomposition<S>(m).determinant();
  } catch (const numerical_error&) {
    return S(0);
  }
}

/// sqrt(det M) for complex symmetric M with positive definite real part,
/// on the branch prod_i sqrt(lambda_i) with every factor in Re > 0.
///
/// Evaluated as sqrt(det R) * prod_k sqrt(1 + i h_k), h_k the eigenvalues of
/// R^{-1/2} S R^{-1/2} for M = R + iS; the two products agree because both
/// are continuous square roots of det M on a convex set containing the real
/// SPD matrices, where they coincide.
template <class T>
complex_t<T> complex_sqrt_det(const ComplexSymMatrix<T>& m) {
  using std::sqrt;
  using C = complex_t<T>;
  const std::size_t n = m.dim();
  if (n == 0) return C(1);
  const RealSymMatrix<T> r(m.real_part());
  const auto eig_r = sym_eig(r);
  if (!(eig_r.values.front() > T(0))) {
    throw input_error("complex_sqrt_det: real part is not positive definite");
  }
  const Matrix<T> r_inv_half =
      spectral_apply(eig_r, [](const T& l) { return T(T(1) / sqrt(l)); });
  const Matrix<T> h = r_inv_half * m.imag_part() * r_inv_half;
  const auto eig_h = sym_eig(RealSymMatrix<T>(h));
  T det_r(1);
  for (const auto& l : eig_r.values) det_r *= l;
  C result = C(sqrt(det_r));
  for (const auto& hk : eig_h.values) result *= C(sqrt(make_complex(T(1), hk)));
  return result;
}

/// Bisection on [lo, hi]; requires a sign change.  Deterministic: the same
/// inputs always produce the same midpoint sequence.
template <class T, class F>
T bracket_root(F&& f, T lo, T hi, T tol = T(1e-8)) {
  using std::abs;
  if (!(lo < hi)) std::swap(lo, hi);
  T flo = f(lo);
  const T fhi = f(hi);
  if (flo == T(0)) return lo;
  if (fhi == T(0)) return hi;
  if ((flo < T(0)) == (fhi < T(0))) throw no_bracket_error("bracket_root: no sign change on bracket");
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    const T mid = lo + (hi - lo) / T(2);
    if (mid <= lo || mid >= hi) break;
    const T fm = f(mid);
    if (fm == T(0)) return mid;
    if ((fm < T(0)) == (flo < T(0))) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return lo + (hi - lo) / T(2);
}

}  // namespace polygauss
