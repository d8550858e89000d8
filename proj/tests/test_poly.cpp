#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace polygauss;
using oracle::cd;
using P = MultiPoly<cd>;

namespace {

P xy_poly(std::initializer_list<std::pair<Exponent, cd>> terms, std::size_t nvars) {
  P p(nvars);
  for (const auto& [e, c] : terms) p.add_term(e, c);
  return p;
}

cd eval2(const P& p, std::vector<double> x, std::vector<double> y) {
  return p.evaluate(std::span<const double>(x), std::span<const double>(y));
}

/// Brute force reference for the odd-degree gate.
OddGateVerdict::Kind brute_gate(const P& p, std::vector<std::size_t>* witness) {
  if (*p.degree() % 2 == 1) return OddGateVerdict::Kind::RejectOdd;
  const std::size_t n = p.half_dim();
  std::vector<std::vector<std::size_t>> hits;
  for (std::uint64_t s = 1; s < (std::uint64_t{1} << n) - 1; ++s) {
    std::vector<std::size_t> idx, idx1;
    for (std::size_t i = 0; i < n; ++i)
      if (s >> i & 1) {
        idx.push_back(i);
        idx1.push_back(i + 1);
      }
    const auto r = p.restrict_zero(idx);
    if (!r.is_zero() && *r.degree() % 2 == 1) hits.push_back(idx1);
  }
  if (hits.empty()) return OddGateVerdict::Kind::Pass;
  *witness = *std::min_element(hits.begin(), hits.end());
  return OddGateVerdict::Kind::RejectReducibleOdd;
}

}  // namespace

TEST_CASE("evaluate", "[poly]") {
  CHECK(eval2(xy_poly({{{1, 1}, 1}}, 2), {2}, {3}) == cd(6));
  CHECK(eval2(xy_poly({{{2, 0}, 1}, {{0, 2}, 1}}, 2), {1}, {1}) == cd(2));
  CHECK(eval2(fixtures::kappa_gamma_poly(1.0), {1}, {0}) == cd(1));
  CHECK_THROWS_AS(eval2(xy_poly({{{1, 1}, 1}}, 2), {1, 2}, {3}), input_error);
}

TEST_CASE("is_self_adjoint", "[poly]") {
  CHECK(is_self_adjoint(xy_poly({{{1, 1}, 1}}, 2)));
  CHECK(is_self_adjoint(xy_poly({{{1, 0}, cd(0, 1)}, {{0, 1}, cd(0, -1)}}, 2)));
  CHECK_FALSE(is_self_adjoint(xy_poly({{{1, 0}, 1}}, 2)));
}

TEST_CASE("degree and zero polynomial", "[poly]") {
  P z(4);
  CHECK_FALSE(z.degree().has_value());
  auto p = xy_poly({{{1, 0, 0, 0}, 1}, {{0, 0, 1, 1}, 2}}, 4);
  CHECK(*p.degree() == 2);
  p -= xy_poly({{{0, 0, 1, 1}, 2}}, 4);
  CHECK(*p.degree() == 1);  // cancellation leaves no stored zero
  CHECK(p.size() == 1);
  CHECK_THROWS_AS(odd_degree_gate(z), input_error);
}

TEST_CASE("pruning removes relative roundoff", "[poly]") {
  auto p = xy_poly({{{1, 0}, 1}, {{0, 1}, 1e-16}}, 2);
  p.prune();
  CHECK(p.size() == 1);
}

TEST_CASE("ring axioms at random points", "[poly][property]") {
  oracle::Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const auto p = rng.poly(4, 5, 4);
    const auto q = rng.poly(4, 5, 4);
    std::vector<double> v(4);
    for (auto& x : v) x = rng.uniform(-2, 2);
    const std::span<const double> s(v);
    const cd pv = p.evaluate(s), qv = q.evaluate(s);
    const double scale = 1 + std::abs(pv) + std::abs(qv) + std::abs(pv * qv);
    CHECK(std::abs((p + q).evaluate(s) - (pv + qv)) <= 1e-10 * scale);
    CHECK(std::abs((p * q).evaluate(s) - pv * qv) <= 1e-10 * scale);
  }
}

TEST_CASE("self-adjoint polynomials are real on the diagonal", "[poly][property]") {
  oracle::Rng rng(22);
  for (int t = 0; t < 100; ++t) {
    const auto p = rng.sa_poly(2, 6, 4);
    REQUIRE(is_self_adjoint(p));
    std::vector<double> x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const cd v = eval2(p, x, x);
    CHECK(std::abs(v.imag()) <= 1e-12 * (1 + std::abs(v) + p.max_abs_coefficient()));
  }
}

TEST_CASE("self_adjoint_defect and part", "[poly]") {
  const auto p = xy_poly({{{1, 0}, 1}}, 2);
  CHECK(self_adjoint_defect(p) == Catch::Approx(1.0));
  const auto s = self_adjoint_part(p);
  CHECK(is_self_adjoint(s));
  CHECK(s.coefficient({0, 1}) == cd(0.5));
}

TEST_CASE("odd_degree_gate examples", "[poly]") {
  CHECK(odd_degree_gate(xy_poly({{{1, 0}, 1}, {{0, 1}, 1}}, 2)).kind == OddGateVerdict::Kind::RejectOdd);
  CHECK(odd_degree_gate(xy_poly({{{1, 1}, 1}}, 2)).kind == OddGateVerdict::Kind::Pass);
  const auto v = odd_degree_gate(xy_poly({{{1, 0, 1, 0}, 1}, {{0, 1, 0, 0}, 1}, {{0, 0, 0, 1}, 1}}, 4));
  CHECK(v.kind == OddGateVerdict::Kind::RejectReducibleOdd);
  CHECK(v.witness == std::vector<std::size_t>{1});
  CHECK(v.degree == 1);
}

TEST_CASE("odd_degree_gate is skipped above the subset cap", "[poly]") {
  P p(2 * 21);
  Exponent e(42, 0);
  e[0] = 1;
  e[21] = 1;
  p.add_term(e, 1);
  CHECK(odd_degree_gate(p).kind == OddGateVerdict::Kind::Skipped);
  CHECK(odd_degree_gate(p, 21).kind == OddGateVerdict::Kind::Pass);
}

TEST_CASE("odd_degree_gate agrees with brute-force substitution", "[poly][property]") {
  oracle::Rng rng(23);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 5));
    const auto p = rng.poly(2 * n, rng.integer(1, 6), 5, false);
    if (p.is_zero()) continue;
    std::vector<std::size_t> w;
    const auto expected = brute_gate(p, &w);
    const auto got = odd_degree_gate(p);
    REQUIRE(got.kind == expected);
    if (expected == OddGateVerdict::Kind::RejectReducibleOdd) CHECK(got.witness == w);
    if (got.kind == OddGateVerdict::Kind::RejectOdd) CHECK(*p.degree() % 2 == 1);
  }
}

TEST_CASE("universal_point_check", "[poly]") {
  const auto sym = xy_poly({{{1, 1}, 2}}, 2);  // x y + y x with l = m = 1
  oracle::Rng rng(24);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::vector<double>> pts{{rng.uniform(-2, 2)}, {rng.uniform(-2, 2)}, {rng.uniform(-2, 2)}};
    std::vector<cd> c{cd(rng.normal(), rng.normal()), cd(rng.normal(), rng.normal()), cd(rng.normal(), rng.normal())};
    CHECK(universal_point_check(sym, pts, c) >= -1e-12);
  }
  // x^3 y + x y^3 at points 1 and lambda with c = (2, -1)
  const auto p31 = xy_poly({{{3, 1}, 1}, {{1, 3}, 1}}, 2);
  const double lambda = 1.3;
  const double v = universal_point_check(p31, {{1.0}, {lambda}}, {cd(2), cd(-1)});
  CHECK(v == Catch::Approx(2 * (std::pow(lambda, 3) - 2) * (lambda - 2)));
  CHECK(v < 0);
  // single point gives P(x, x)
  const auto sa = fixtures::kappa_gamma_poly(2.0);
  CHECK(universal_point_check(sa, {{0.7}}, {cd(1)}) == Catch::Approx(eval2(sa, {0.7}, {0.7}).real()));
  CHECK_THROWS_AS(universal_point_check(xy_poly({{{1, 0}, 1}}, 2), {{1.0}}, {cd(1)}), input_error);
}

TEST_CASE("non-universal monomial pairs are found by a randomized search", "[poly][property]") {
  oracle::Rng rng(25);
  for (auto [l, m] : {std::pair{3u, 1u}, std::pair{2u, 1u}, std::pair{4u, 2u}}) {
    const auto p = xy_poly({{{l, m}, 1}, {{m, l}, 1}}, 2);
    bool found = false;
    for (int t = 0; t < 500 && !found; ++t) {
      const double lambda = rng.uniform(0.1, 3.0);
      const double x = rng.uniform(0.2, 2.0);
      found = universal_point_check(p, {{x}, {lambda * x}}, {cd(2), cd(-1)}) < 0;
    }
    CHECK(found);
  }
}

TEST_CASE("structural operations", "[poly]") {
  const auto p = xy_poly({{{2, 1, 0, 3}, cd(1, 2)}}, 4);
  const std::vector<std::size_t> first{0};
  const auto s = p.swap_blocks(first);
  CHECK(s.coefficient({0, 1, 2, 3}) == cd(1, 2));
  CHECK(s.swap_blocks(first) == p);
  CHECK(p.conj_swap().coefficient({0, 3, 2, 1}) == cd(1, -2));
  // substitution x -> x + 1 in x^2
  const auto sq = xy_poly({{{2}, 1}}, 1);
  const auto shifted = sq.substitute({P::variable(1, 0) + P::constant(1, cd(1))});
  CHECK(shifted.coefficient({1}) == cd(2));
  CHECK(shifted.coefficient({0}) == cd(1));
}
