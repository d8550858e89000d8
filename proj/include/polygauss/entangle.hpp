#pragma once

// Bipartite screening.  The partial transpose swaps x_i <-> y_i on part 1.
// In the (x - y, x + y) parametrisation that flips the sign of (x - y)_i and
// leaves (x + y) alone, so with L = diag(-1 on part 1, +1 elsewhere) the
// triple maps to (L A L, L B, C) and the polynomial has its part-1 exponents
// swapped.  Applying it twice is the identity.

#include <optional>
#include <string>
#include <vector>

#include "polygauss/spectral.hpp"

namespace polygauss {

class Bipartition {
 public:
  Bipartition(std::size_t n, std::vector<std::size_t> part1) : n_(n), part1_(std::move(part1)) {
    std::sort(part1_.begin(), part1_.end());
    part1_.erase(std::unique(part1_.begin(), part1_.end()), part1_.end());
    if (part1_.empty() || part1_.size() >= n_) throw input_error("Bipartition: part 1 must be a nonempty proper subset");
    if (part1_.front() < 1 || part1_.back() > n_) throw input_error("Bipartition: index out of range 1..n");
  }

  std::size_t n() const { return n_; }
  const std::vector<std::size_t>& part1() const { return part1_; }  // 1-based, sorted
  std::size_t d1() const { return part1_.size(); }
  std::size_t d2() const { return n_ - part1_.size(); }

  std::vector<std::size_t> part1_zero_based() const {
    std::vector<std::size_t> out;
    for (auto i : part1_) out.push_back(i - 1);
    return out;
  }

 private:
  std::size_t n_;
  std::vector<std::size_t> part1_;
};

template <class T>
GaussianTriple<T> partial_transpose(const GaussianTriple<T>& g, const Bipartition& b) {
  if (g.n() != b.n()) throw input_error("partial_transpose: partition dimension mismatch");
  const std::size_t n = g.n();
  std::vector<T> sign(n, T(1));
  for (auto i : b.part1()) sign[i - 1] = T(-1);
  Matrix<T> a = g.A.matrix();
  Matrix<T> bb = g.B;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) *= sign[i] * sign[j];
      bb(i, j) *= sign[i];
    }
  }
  return GaussianTriple<T>(RealSymMatrix<T>(a), bb, g.C);
}

template <class T>
PolyGaussianKernel<T> partial_transpose(const PolyGaussianKernel<T>& k, const Bipartition& b) {
  const auto idx = b.part1_zero_based();
  return PolyGaussianKernel<T>(k.poly().swap_blocks(idx), partial_transpose(k.triple(), b), k.norm());
}

struct NptOptions {
  bool escalate = true;
  unsigned kmax = 5;
  MercerOptions mercer{};
  MomentOptions moments{};
};

struct NptReport {
  enum class Verdict { NptCertified, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  std::string stage;  // "gaussian", "ek", "mercer" or "" when inconclusive
  double trace_before_normalisation = 0;
  double pt_max_mu = 0;
  std::optional<SpectralReport<double>> sweep;
  std::optional<MercerCertificate> mercer;
  unsigned kmax_effective = 0;

  bool npt() const { return verdict == Verdict::NptCertified; }
};

inline const char* to_string(NptReport::Verdict v) {
  return v == NptReport::Verdict::NptCertified ? "NPT_Certified" : "Inconclusive";
}

/// Largest k with k * deg(P) within the engine cap.
inline unsigned clamp_kmax(unsigned kmax, unsigned degree, const MomentOptions& opts) {
  unsigned k = std::min(kmax, opts.max_j);
  if (degree > 0) k = std::min(k, opts.wick.degree_cap / degree);
  return k;
}

/// NPT screening.  A non-positive PT Gaussian certifies NPT for every
/// polynomial over it; otherwise the optional escalation looks for a negative
/// e_k or a Mercer violation of the PT image.  PPT outcomes stay Inconclusive.
inline NptReport npt_gate(const PolyGaussianKernel<double>& k, const Bipartition& b, const NptOptions& opts = {}) {
  NptReport r;
  r.trace_before_normalisation = trace(k, opts.moments);
  if (!(r.trace_before_normalisation > 0)) throw input_error("npt_gate: kernel trace must be positive for a density operator");
  const auto rho = k.with_norm(k.norm() / r.trace_before_normalisation);
  const auto pt = partial_transpose(rho, b);
  const auto gate = gaussian_positive(pt.triple());
  r.pt_max_mu = gate.max_mu();
  if (!gate.positive) {
    r.verdict = NptReport::Verdict::NptCertified;
    r.stage = "gaussian";
    return r;
  }
  if (!opts.escalate) return r;
  r.kmax_effective = clamp_kmax(opts.kmax, *pt.poly().degree(), opts.moments);
  if (r.kmax_effective > 0) {
    r.sweep = positivity_sweep(pt, r.kmax_effective, opts.moments);
    if (r.sweep->certified_not_psd()) {
      r.verdict = NptReport::Verdict::NptCertified;
      r.stage = "ek";
      return r;
    }
  }
  r.mercer = mercer_search(pt, opts.mercer);
  if (r.mercer) {
    r.verdict = NptReport::Verdict::NptCertified;
    r.stage = "mercer";
  }
  return r;
}

enum class Separability { Separable, Entangled, OutOfScope };

inline const char* to_string(Separability s) {
  switch (s) {
    case Separability::Separable: return "Separable";
    case Separability::Entangled: return "Entangled";
    case Separability::OutOfScope: return "OutOfScope";
  }
  return "?";
}

/// Gaussian states split 1 vs (n-1): separable iff PPT.  Other splits are
/// out of scope since PPT is then only necessary.
template <class T>
Separability gaussian_separability(const GaussianTriple<T>& g, const Bipartition& b) {
  if (!g.kernel_valid() || !gaussian_positive(g).positive) throw input_error("gaussian_separability: triple is not a state");
  if (b.d1() != 1 && b.d2() != 1) return Separability::OutOfScope;
  return gaussian_positive(partial_transpose(g, b)).positive ? Separability::Separable : Separability::Entangled;
}

template <class T>
struct NptPropagation {
  bool holds = false;  // PT(g0) <= PT(g1): NPT over g1 transfers to g0
  PreorderResult<T> preorder;
};

template <class T>
NptPropagation<T> preorder_npt_propagate(const GaussianTriple<T>& g0, const GaussianTriple<T>& g1, const Bipartition& b) {
  auto pr = preorder_leq(partial_transpose(g0, b), partial_transpose(g1, b));
  const bool holds = pr.holds;
  return {holds, std::move(pr)};
}

}  // namespace polygauss
