#pragma once

#include <span>

#include "polygauss/gaussian.hpp"
#include "polygauss/poly.hpp"

namespace polygauss {

/// norm * P(x, y) * kappa_G(x, y) with P self-adjoint and (A, C) positive
/// definite.  Polynomials within a 1e-10 relative self-adjointness defect are
/// symmetrised (engine outputs carry roundoff); larger defects are rejected.
template <class T>
class PolyGaussianKernel {
 public:
  using real = T;
  using complex = complex_t<T>;
  using Poly = MultiPoly<complex>;

  PolyGaussianKernel() = default;
  PolyGaussianKernel(Poly poly, GaussianTriple<T> triple, T norm = T(1))
      : poly_(std::move(poly)), triple_(std::move(triple)), norm_(std::move(norm)) {
    if (poly_.nvars() != 2 * triple_.n()) throw input_error("kernel: polynomial must have 2n variables");
    if (poly_.is_zero()) throw input_error("kernel: polynomial is zero");
    if (!(norm_ > T(0)) || !finite(norm_)) throw input_error("kernel: norm must be positive and finite");
    if (!triple_.kernel_valid()) throw input_error("kernel: A and C must be positive definite");
    if (!is_self_adjoint(poly_)) {
      if (self_adjoint_defect(poly_) > T(1e-10)) throw input_error("kernel: polynomial is not self-adjoint");
      poly_ = self_adjoint_part(poly_);
    }
  }

  static PolyGaussianKernel gaussian(GaussianTriple<T> triple, T norm = T(1)) {
    const std::size_t n = triple.n();
    return PolyGaussianKernel(Poly::constant(2 * n, complex(1)), std::move(triple), std::move(norm));
  }

  std::size_t n() const { return triple_.n(); }
  const Poly& poly() const { return poly_; }
  const GaussianTriple<T>& triple() const { return triple_; }
  const T& norm() const { return norm_; }

  complex operator()(std::span<const T> x, std::span<const T> y) const {
    return complex(norm_) * poly_.evaluate(x, y) * eval_gaussian(triple_, x, y);
  }

  template <class U>
  PolyGaussianKernel<U> cast() const {
    return PolyGaussianKernel<U>(poly_.template cast<complex_t<U>>(), triple_.template cast<U>(), U(norm_));
  }

  PolyGaussianKernel with_triple(GaussianTriple<T> g) const { return PolyGaussianKernel(poly_, std::move(g), norm_); }
  PolyGaussianKernel with_norm(T norm) const { return PolyGaussianKernel(poly_, triple_, std::move(norm)); }

 private:
  Poly poly_;
  GaussianTriple<T> triple_;
  T norm_ = T(1);
};

}  // namespace polygauss
