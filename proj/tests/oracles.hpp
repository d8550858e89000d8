#pragma once

// Independent reference computations for the tests: adaptive quadrature,
// Eigen-based eigenvalues, and seeded generators of random inputs.

#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "polygauss/polygauss.hpp"

namespace oracle {

using cd = std::complex<double>;
using namespace polygauss;

/// Nested adaptive Gauss-Kronrod over [-L, L]^dims.
inline cd integrate_box(const std::function<cd(const std::vector<double>&)>& f, std::size_t dims, double L,
                        double tol = 1e-11) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  std::vector<double> x(dims);
  std::function<cd(std::size_t)> level = [&](std::size_t d) -> cd {
    if (d == dims) return f(x);
    return GK::integrate(
        [&](double t) {
          x[d] = t;
          return level(d + 1);
        },
        -L, L, 12, tol);
  };
  return level(0);
}

/// Half-width beyond which exp(-lambda_min(Re Q) |z|^2) is below ~1e-20.
inline double gaussian_box(const Matrix<cd>& Q) {
  Matrix<double> re(Q.rows(), Q.cols());
  for (std::size_t i = 0; i < Q.rows(); ++i)
    for (std::size_t j = 0; j < Q.cols(); ++j) re(i, j) = Q(i, j).real();
  const double lmin = min_eigenvalue(RealSymMatrix<double>(re));
  return std::sqrt(50.0 / lmin);
}

inline Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Eigen::MatrixXcd to_eigen(const Matrix<cd>& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

/// Gauss-Hermite nodes and weights for exp(-x^2) by Golub-Welsch.
inline std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int N) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N, N);
  for (int k = 1; k < N; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::vector<double> x(N), w(N);
  for (int i = 0; i < N; ++i) {
    x[i] = es.eigenvalues()(i);
    w[i] = std::sqrt(M_PI) * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
  return {x, w};
}

/// int p(z) exp(-z^T Q z + b^T z) dz over R^m by tensor Gauss-Hermite after
/// whitening Re Q about the real stationary point.  The remaining factor is
/// polynomial times a unimodular phase, so convergence is geometric.
/// l1, if given, receives the same quadrature of the absolute integrand.
inline cd gaussian_weighted(const MultiPoly<cd>& p, const Matrix<cd>& Q, const std::vector<cd>& b,
                            double* l1 = nullptr, int nodes = 0) {
  const std::size_t m = Q.rows();
  if (nodes == 0) nodes = m == 1 ? 200 : m == 2 ? 120 : 72;
  Matrix<double> re(m, m);
  std::vector<double> rb(m);
  for (std::size_t i = 0; i < m; ++i) {
    rb[i] = b[i].real();
    for (std::size_t j = 0; j < m; ++j) re(i, j) = Q(i, j).real();
  }
  const RealSymMatrix<double> reQ(re);
  const auto centre = inverse(re) * rb;
  const auto S = inverse(psd_sqrt(reQ).matrix());  // z = c/2 + S w
  const double jac = std::abs(determinant(S));
  const auto [x, w] = gauss_hermite(nodes);
  std::vector<std::size_t> idx(m, 0);
  std::vector<double> z(m);
  cd total = 0;
  double total_abs = 0;
  for (;;) {
    double weight = 1;
    for (std::size_t i = 0; i < m; ++i) weight *= w[idx[i]];
    for (std::size_t i = 0; i < m; ++i) {
      z[i] = 0.5 * centre[i];
      for (std::size_t j = 0; j < m; ++j) z[i] += S(i, j) * x[idx[j]];
    }
    cd e = 0;
    double wsq = 0;
    for (std::size_t i = 0; i < m; ++i) {
      e += b[i] * z[i];
      wsq += x[idx[i]] * x[idx[i]];
      for (std::size_t j = 0; j < m; ++j) e -= z[i] * Q(i, j) * z[j];
    }
    // divide out the Gauss-Hermite weight exp(-|w|^2)
    const cd v = p.evaluate(std::span<const double>(z)) * std::exp(e + wsq);
    total += weight * v;
    total_abs += weight * std::abs(v);
    std::size_t k = 0;
    while (k < m && ++idx[k] == static_cast<std::size_t>(nodes)) idx[k++] = 0;
    if (k == m) break;
  }
  if (l1) *l1 = total_abs * jac;
  return total * jac;
}

/// Adaptive counterpart of gaussian_weighted: nested Gauss-Kronrod in the same
/// whitened coordinates over the ball |w| <= L, outside which exp(-|w|^2) is negligible.
inline cd adaptive_weighted(const MultiPoly<cd>& p, const Matrix<cd>& Q, const std::vector<cd>& b, double tol = 1e-12,
                            double L = 7.0) {
  const std::size_t m = Q.rows();
  Matrix<double> re(m, m);
  std::vector<double> rb(m);
  for (std::size_t i = 0; i < m; ++i) {
    rb[i] = b[i].real();
    for (std::size_t j = 0; j < m; ++j) re(i, j) = Q(i, j).real();
  }
  const auto centre = inverse(re) * rb;
  const auto S = inverse(psd_sqrt(RealSymMatrix<double>(re)).matrix());
  const double jac = std::abs(determinant(S));
  // flat term list and power tables; the integrand is evaluated ~1e7 times in 3-D
  std::vector<std::pair<Exponent, cd>> terms(p.terms().begin(), p.terms().end());
  const unsigned deg = p.degree().value_or(0);
  std::vector<std::vector<double>> pw(m, std::vector<double>(deg + 1, 1.0));
  std::vector<double> z(m);
  const auto f = [&](const std::vector<double>& w) {
    for (std::size_t i = 0; i < m; ++i) {
      z[i] = 0.5 * centre[i];
      for (std::size_t j = 0; j < m; ++j) z[i] += S(i, j) * w[j];
      for (unsigned k = 1; k <= deg; ++k) pw[i][k] = pw[i][k - 1] * z[i];
    }
    cd e = 0;
    for (std::size_t i = 0; i < m; ++i) {
      e += b[i] * z[i];
      for (std::size_t j = 0; j < m; ++j) e -= z[i] * Q(i, j) * z[j];
    }
    cd pv = 0;
    for (const auto& [ex, c] : terms) {
      double mono = 1;
      for (std::size_t i = 0; i < m; ++i) mono *= pw[i][ex[i]];
      pv += c * mono;
    }
    return pv * std::exp(e);
  };
  // nested 61-point Gauss-Kronrod over the ball |w| <= L: each level integrates over
  // [-h, h] with h^2 = L^2 - (sum of outer w_i^2)
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  std::vector<double> w(m);
  std::function<cd(std::size_t, double)> level = [&](std::size_t d, double used) -> cd {
    if (d == m) return f(w);
    const double h = std::sqrt(std::max(0.0, L * L - used));
    if (h == 0) return 0;
    return GK::integrate(
        [&](double t) {
          w[d] = t;
          return level(d + 1, used + t * t);
        },
        -h, h, 12, tol);
  };
  return level(0, 0.0) * jac;
}

/// |Im| of the eigenvalues of G Omega, descending, one per conjugate pair.
inline std::vector<double> williamson_by_eigen(const Matrix<double>& G) {
  const std::size_t n = G.rows() / 2;
  const Eigen::MatrixXd M = to_eigen(G) * to_eigen(symplectic_form<double>(n));
  Eigen::EigenSolver<Eigen::MatrixXd> es(M);
  std::vector<double> ims;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i).imag() > 0) ims.push_back(es.eigenvalues()(i).imag());
  std::sort(ims.rbegin(), ims.rend());
  return ims;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen); }

  Matrix<double> general(std::size_t n, double s = 1.0) {
    Matrix<double> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = s * normal();
    return m;
  }
  Matrix<double> symmetric(std::size_t n, double s = 1.0) {
    const auto g = general(n, s);
    return (g + g.transpose()) * 0.5;
  }
  /// SPD with eigenvalues in [lo, hi].
  RealSymMatrix<double> spd(std::size_t n, double lo, double hi) {
    const auto q = sym_eig(RealSymMatrix<double>(symmetric(n))).vectors;
    std::vector<double> d(n);
    for (auto& v : d) v = uniform(lo, hi);
    return RealSymMatrix<double>(q * Matrix<double>::diagonal(d) * q.transpose());
  }
  GaussianTriple<double> triple(std::size_t n, double b_scale = 0.5) {
    return GaussianTriple<double>(spd(n, 0.3, 2.0), general(n, b_scale), spd(n, 0.3, 2.0));
  }
  /// Random polynomial in nvars variables with `terms` monomials of degree <= deg.
  MultiPoly<cd> poly(std::size_t nvars, int terms, int deg, bool complex_coeffs = true) {
    MultiPoly<cd> p(nvars);
    for (int t = 0; t < terms; ++t) {
      Exponent e(nvars, 0);
      const int d = integer(0, deg);
      for (int k = 0; k < d; ++k) ++e[static_cast<std::size_t>(integer(0, static_cast<int>(nvars) - 1))];
      p.add_term(e, cd(uniform(-1, 1), complex_coeffs ? uniform(-1, 1) : 0.0));
    }
    return p;
  }
  /// Self-adjoint kernel polynomial (nonzero).
  MultiPoly<cd> sa_poly(std::size_t n, int terms, int deg) {
    for (;;) {
      auto p = self_adjoint_part(poly(2 * n, terms, deg));
      if (!p.is_zero()) return p;
    }
  }
};

}  // namespace oracle
