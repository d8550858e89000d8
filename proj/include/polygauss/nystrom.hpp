#pragma once

// Discretisation oracle: eigenvalues of h^n k(x_i, x_j) on a midpoint grid
// over [-L, L]^n.  Independent of the moment engine; used to cross-check it.

#include <vector>

#include <Eigen/Dense>

#include "polygauss/spectral.hpp"

namespace polygauss {

struct NystromResult {
  std::vector<double> eigenvalues;  // descending
  double grid_trace = 0;            // sum of the eigenvalues
  double exact_trace = 0;           // int k(x, x) dx from the engine
  bool coarse = false;              // trace mismatch above 1%

  /// e_1 .. e_kmax of the grid spectrum.
  std::vector<double> eks(unsigned kmax) const {
    std::vector<double> e(kmax + 1, 0.0);
    e[0] = 1.0;
    for (double l : eigenvalues)
      for (unsigned k = kmax; k >= 1; --k) e[k] += l * e[k - 1];
    return {e.begin() + 1, e.end()};
  }

  double power_sum(unsigned j) const {
    double s = 0;
    for (double l : eigenvalues) s += std::pow(l, static_cast<double>(j));
    return s;
  }
};

inline NystromResult nystrom_oracle(const PolyGaussianKernel<double>& k, unsigned grid_points, double box_halfwidth) {
  const std::size_t n = k.n();
  if (n > 2) throw input_error("nystrom_oracle: only n <= 2 is supported");
  if (grid_points < 2 || !(box_halfwidth > 0)) throw input_error("nystrom_oracle: bad grid");
  const double h = 2 * box_halfwidth / grid_points;
  std::vector<double> axis(grid_points);
  for (unsigned i = 0; i < grid_points; ++i) axis[i] = -box_halfwidth + (i + 0.5) * h;

  std::vector<std::vector<double>> pts;
  if (n == 1) {
    for (double a : axis) pts.push_back({a});
  } else {
    for (double a : axis)
      for (double b : axis) pts.push_back({a, b});
  }
  const double weight = n == 1 ? h : h * h;
  const auto N = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXcd W(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j)
      W(i, j) = weight * k(std::span<const double>(pts[static_cast<std::size_t>(i)]),
                           std::span<const double>(pts[static_cast<std::size_t>(j)]));
  W = (W + W.adjoint()).eval() * 0.5;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(W, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numerical_error("nystrom_oracle: eigensolver failed");

  NystromResult r;
  for (Eigen::Index i = N; i-- > 0;) r.eigenvalues.push_back(es.eigenvalues()(i));
  for (double l : r.eigenvalues) r.grid_trace += l;
  r.exact_trace = trace(k);
  r.coarse = std::abs(r.grid_trace - r.exact_trace) > 0.01 * std::abs(r.exact_trace);
  return r;
}

}  // namespace polygauss
