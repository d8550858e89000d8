#pragma once

// Sparse multivariate polynomials with complex coefficients.  Kernel
// polynomials use 2n variables ordered (x_1..x_n, y_1..y_n); the integration
// engine reuses the same type for polynomials in arbitrary variable sets.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "polygauss/scalar.hpp"

namespace polygauss {

using Exponent = std::vector<unsigned>;

inline unsigned total_degree(const Exponent& e) {
  unsigned d = 0;
  for (auto v : e) d += v;
  return d;
}

/// Graded order: total degree ascending, then lexicographically descending
/// exponent vectors (x_1 before x_2 within a degree).
struct GradedLex {
  bool operator()(const Exponent& a, const Exponent& b) const {
    const auto da = total_degree(a);
    const auto db = total_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  }
};

template <class C>
class MultiPoly {
 public:
  using coeff_type = C;
  using real_type = real_t<C>;
  using TermMap = std::map<Exponent, C, GradedLex>;

  MultiPoly() = default;
  explicit MultiPoly(std::size_t nvars) : nvars_(nvars) {}

  static MultiPoly constant(std::size_t nvars, const C& c) {
    MultiPoly p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
  }

  static MultiPoly variable(std::size_t nvars, std::size_t index, const C& c = C(1)) {
    if (index >= nvars) throw input_error("MultiPoly::variable: index out of range");
    Exponent e(nvars, 0);
    e[index] = 1;
    MultiPoly p(nvars);
    p.add_term(e, c);
    return p;
  }

  static MultiPoly monomial(const Exponent& e, const C& c) {
    MultiPoly p(e.size());
    p.add_term(e, c);
    return p;
  }

  std::size_t nvars() const { return nvars_; }

  /// n for a kernel polynomial in (x_1..x_n, y_1..y_n).
  std::size_t half_dim() const {
    if (nvars_ % 2 != 0) throw input_error("kernel polynomial must have an even number of variables");
    return nvars_ / 2;
  }

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  std::optional<unsigned> degree() const {
    if (terms_.empty()) return std::nullopt;
    return total_degree(terms_.rbegin()->first);
  }

  C coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? C(0) : it->second;
  }

  void add_term(const Exponent& e, const C& c) {
    if (e.size() != nvars_) throw input_error("MultiPoly: exponent length does not match variable count");
    if (c == C(0)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == C(0)) terms_.erase(it);
    }
  }

  real_type max_abs_coefficient() const {
    real_type m(0);
    for (const auto& [e, c] : terms_) m = std::max(m, magnitude(c));
    return m;
  }

  /// Drop coefficients below prune_tolerance * max |c|.
  MultiPoly& prune() {
    const real_type cut = scalar_traits<C>::prune_tolerance() * max_abs_coefficient();
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (magnitude(it->second) <= cut) {
        it = terms_.erase(it);
      } else {
        ++it;
      }
    }
    return *this;
  }

  MultiPoly& operator+=(const MultiPoly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return prune();
  }
  MultiPoly& operator-=(const MultiPoly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return prune();
  }
  MultiPoly& operator*=(const C& s) {
    if (s == C(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator-(MultiPoly a) { return a *= C(-1); }
  friend MultiPoly operator*(MultiPoly a, const C& s) { return a *= s; }
  friend MultiPoly operator*(const C& s, MultiPoly a) { return a *= s; }

  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_compatible(b);
    MultiPoly out(a.nvars_);
    Exponent e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    }
    return out.prune();
  }

  MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }

  bool operator==(const MultiPoly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

  /// Value at a real point of length nvars().
  C evaluate(std::span<const real_type> point) const {
    if (point.size() != nvars_) throw input_error("MultiPoly::evaluate: dimension mismatch");
    C sum(0);
    for (const auto& [e, c] : terms_) {
      real_type m(1);
      for (std::size_t i = 0; i < nvars_; ++i)
        for (unsigned k = 0; k < e[i]; ++k) m *= point[i];
      sum += c * m;
    }
    return sum;
  }

  /// Value of a kernel polynomial P(x, y).
  C evaluate(std::span<const real_type> x, std::span<const real_type> y) const {
    const std::size_t n = half_dim();
    if (x.size() != n || y.size() != n) throw input_error("MultiPoly::evaluate: |x| and |y| must equal n");
    std::vector<real_type> v(x.begin(), x.end());
    v.insert(v.end(), y.begin(), y.end());
    return evaluate(std::span<const real_type>(v));
  }

  /// Relabel variables: variable i becomes index_map[i] of a new_nvars-variable
  /// polynomial.  Several variables may map onto one (their exponents add).
  MultiPoly remap(std::span<const std::size_t> index_map, std::size_t new_nvars) const {
    if (index_map.size() != nvars_) throw input_error("MultiPoly::remap: map size mismatch");
    MultiPoly out(new_nvars);
    Exponent f(new_nvars);
    for (const auto& [e, c] : terms_) {
      std::fill(f.begin(), f.end(), 0u);
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        if (index_map[i] >= new_nvars) throw input_error("MultiPoly::remap: target index out of range");
        f[index_map[i]] += e[i];
      }
      out.add_term(f, c);
    }
    return out;
  }

  /// Composition p(images_1, ..., images_nvars).
  MultiPoly substitute(const std::vector<MultiPoly>& images) const {
    if (images.size() != nvars_) throw input_error("MultiPoly::substitute: need one image per variable");
    if (images.empty()) return *this;
    const std::size_t m = images.front().nvars();
    std::vector<std::vector<MultiPoly>> powers(nvars_);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (images[i].nvars() != m) throw input_error("MultiPoly::substitute: images disagree on variable count");
      powers[i].push_back(constant(m, C(1)));
    }
    MultiPoly out(m);
    for (const auto& [e, c] : terms_) {
      MultiPoly term = constant(m, c);
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        while (powers[i].size() <= e[i]) powers[i].push_back(powers[i].back() * images[i]);
        term = term * powers[i][e[i]];
      }
      for (const auto& [f, d] : term.terms_) out.add_term(f, d);
    }
    return out.prune();
  }

  /// p*(y, x): swap the x and y blocks and conjugate the coefficients.
  MultiPoly conj_swap() const {
    const std::size_t n = half_dim();
    MultiPoly out(nvars_);
    Exponent f(nvars_);
    for (const auto& [e, c] : terms_) {
      for (std::size_t i = 0; i < n; ++i) {
        f[i] = e[n + i];
        f[n + i] = e[i];
      }
      out.add_term(f, cconj(c));
    }
    return out;
  }

  /// Swap x_i <-> y_i for the 0-based indices listed.
  MultiPoly swap_blocks(std::span<const std::size_t> indices) const {
    const std::size_t n = half_dim();
    MultiPoly out(nvars_);
    for (const auto& [e, c] : terms_) {
      Exponent f = e;
      for (auto i : indices) {
        if (i >= n) throw input_error("swap_blocks: index out of range");
        std::swap(f[i], f[n + i]);
      }
      out.add_term(f, c);
    }
    return out;
  }

  /// Substitute x_i = y_i = 0 for the 0-based indices listed.
  MultiPoly restrict_zero(std::span<const std::size_t> indices) const {
    const std::size_t n = half_dim();
    MultiPoly out(nvars_);
    for (const auto& [e, c] : terms_) {
      bool keep = true;
      for (auto i : indices) keep = keep && e[i] == 0 && e[n + i] == 0;
      if (keep) out.add_term(e, c);
    }
    return out;
  }

  template <class D>
  MultiPoly<D> cast() const {
    MultiPoly<D> out(nvars_);
    for (const auto& [e, c] : terms_) {
      out.add_term(e, make_complex(real_t<D>(re(c)), real_t<D>(im(c))));
    }
    return out;
  }

 private:
  void check_compatible(const MultiPoly& o) const {
    if (nvars_ != o.nvars_) throw input_error("MultiPoly: variable count mismatch");
  }

  std::size_t nvars_ = 0;
  TermMap terms_;
};

template <class C>
MultiPoly<C> pow(const MultiPoly<C>& p, unsigned k) {
  MultiPoly<C> out = MultiPoly<C>::constant(p.nvars(), C(1));
  for (unsigned i = 0; i < k; ++i) out = out * p;
  return out;
}

/// Exact test of P(y, x) == P*(x, y) on the coefficients.
template <class C>
bool is_self_adjoint(const MultiPoly<C>& p) {
  return p.conj_swap() == p;
}

/// max |c_e - conj(c_swap(e))| relative to the largest coefficient.
template <class C>
real_t<C> self_adjoint_defect(const MultiPoly<C>& p) {
  const auto scale = p.max_abs_coefficient();
  if (scale == real_t<C>(0)) return real_t<C>(0);
  MultiPoly<C> diff = p;
  const MultiPoly<C> swapped = p.conj_swap();
  for (const auto& [e, c] : swapped.terms()) diff.add_term(e, -c);
  return diff.max_abs_coefficient() / scale;
}

/// (P + P*(y,x)) / 2
template <class C>
MultiPoly<C> self_adjoint_part(const MultiPoly<C>& p) {
  MultiPoly<C> out = p;
  const MultiPoly<C> swapped = p.conj_swap();
  for (const auto& [e, c] : swapped.terms()) out.add_term(e, c);
  out *= C(real_t<C>(0.5));
  return out.prune();
}

struct OddGateVerdict {
  enum class Kind { Pass, RejectOdd, RejectReducibleOdd, Skipped };
  Kind kind = Kind::Pass;
  std::vector<std::size_t> witness;  // 1-based indices substituted by zero
  unsigned degree = 0;               // degree of the (restricted) polynomial that decided

  bool rejects() const { return kind == Kind::RejectOdd || kind == Kind::RejectReducibleOdd; }
};

inline const char* to_string(OddGateVerdict::Kind k) {
  switch (k) {
    case OddGateVerdict::Kind::Pass: return "Pass";
    case OddGateVerdict::Kind::RejectOdd: return "RejectOdd";
    case OddGateVerdict::Kind::RejectReducibleOdd: return "RejectReducibleOdd";
    case OddGateVerdict::Kind::Skipped: return "Skipped";
  }
  return "?";
}

/// Odd-degree and reducible-to-odd-degree gate.  A reject certifies that
/// P * Gaussian is not positive semidefinite for every Gaussian.  Subsets are
/// enumerated up to n = max_n; beyond that the gate reports Skipped.
template <class C>
OddGateVerdict odd_degree_gate(const MultiPoly<C>& p, std::size_t max_n = 20) {
  const auto deg = p.degree();
  if (!deg) throw input_error("odd_degree_gate: zero polynomial");
  OddGateVerdict v;
  v.degree = *deg;
  if (*deg % 2 == 1) {
    v.kind = OddGateVerdict::Kind::RejectOdd;
    return v;
  }
  const std::size_t n = p.half_dim();
  if (n > max_n) {
    v.kind = OddGateVerdict::Kind::Skipped;
    return v;
  }
  // Support mask and degree per term; a term survives restriction I iff its
  // support misses I, and distinct surviving terms cannot cancel.
  std::vector<std::pair<std::uint64_t, unsigned>> terms;
  for (const auto& [e, c] : p.terms()) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (e[i] || e[n + i]) mask |= std::uint64_t{1} << i;
    terms.emplace_back(mask, total_degree(e));
  }
  std::optional<std::vector<std::size_t>> best;
  unsigned best_deg = 0;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t subset = 1; subset < full; ++subset) {
    int d = -1;
    for (const auto& [mask, td] : terms)
      if ((mask & subset) == 0) d = std::max(d, static_cast<int>(td));
    if (d < 0 || d % 2 == 0) continue;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (subset >> i & 1) idx.push_back(i + 1);
    if (!best || idx < *best) {
      best = std::move(idx);
      best_deg = static_cast<unsigned>(d);
    }
  }
  if (best) {
    v.kind = OddGateVerdict::Kind::RejectReducibleOdd;
    v.witness = std::move(*best);
    v.degree = best_deg;
  }
  return v;
}

/// sum_{i,j} c_i c_j^* P(x_i, x_j).  Negative values certify that P is not
/// universal.
template <class C>
real_t<C> universal_point_check(const MultiPoly<C>& p, const std::vector<std::vector<real_t<C>>>& points,
                                const std::vector<C>& coeffs) {
  using R = real_t<C>;
  if (points.empty() || points.size() != coeffs.size())
    throw input_error("universal_point_check: need equally many points and coefficients (>= 1)");
  if (!is_self_adjoint(p)) throw input_error("universal_point_check: polynomial is not self-adjoint");
  C sum(0);
  R scale(0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < points.size(); ++j) {
      const C pij = p.evaluate(std::span<const R>(points[i]), std::span<const R>(points[j]));
      const C term = coeffs[i] * cconj(coeffs[j]) * pij;
      sum += term;
      scale += magnitude(term);
    }
  }
  using std::abs;
  if (abs(im(sum)) > R(1e-10) * (scale + R(1e-300))) {
    throw numerical_error("universal_point_check: quadratic form has a non-negligible imaginary part");
  }
  return re(sum);
}

}  // namespace polygauss
