#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace polygauss;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using oracle::cd;
using G3 = GaussianTriple<double>;

namespace {

G3 identity_triple(std::size_t n) {
  return G3(RealSymMatrix<double>::identity(n), Matrix<double>(n, n), RealSymMatrix<double>::identity(n));
}

/// Random Gaussian-positive triple: A = C + PSD, B symmetric.
G3 positive_triple(oracle::Rng& rng, std::size_t n) {
  const auto c = rng.spd(n, 0.2, 1.5);
  const auto extra = rng.spd(n, 0.0, 1.0);
  return G3(c + extra, rng.symmetric(n, 0.7), c);
}

G3 add(const G3& g, const G3& d) { return G3(g.A + d.A, g.B + d.B, g.C + d.C); }

/// Random g1 with g0 <= g1: g1 - g0 is a positive triple minus r I.
G3 random_successor(oracle::Rng& rng, const G3& g0) {
  const std::size_t n = g0.n();
  const auto w = positive_triple(rng, n);
  const auto shift = RealSymMatrix<double>::scalar(n, -rng.uniform(0.0, 1.0));
  return add(g0, G3(w.A + shift, w.B, w.C + shift));
}

/// Random symplectic matrix as a product of shears and a block-diagonal factor.
Matrix<double> random_symplectic(oracle::Rng& rng, std::size_t n) {
  const auto I = Matrix<double>::identity(n);
  Matrix<double> lower = Matrix<double>::identity(2 * n), upper = Matrix<double>::identity(2 * n),
                 diag(2 * n, 2 * n);
  lower.set_block(n, 0, rng.symmetric(n, 0.5));
  upper.set_block(0, n, rng.symmetric(n, 0.5));
  const auto u = rng.general(n, 0.3) + I;
  diag.set_block(0, 0, u);
  diag.set_block(n, n, inverse(u).transpose());
  return lower * diag * upper;
}

}  // namespace

TEST_CASE("eval_gaussian", "[gaussian]") {
  const std::vector<double> zero{0.0};
  const std::vector<double> one{1.0};
  CHECK(eval_gaussian(identity_triple(1), std::span<const double>(zero), std::span<const double>(zero)) == cd(1));
  const auto v = eval_gaussian(G3::scalar(1.5, 0, 1), std::span<const double>(one), std::span<const double>(zero));
  CHECK_THAT(v.real(), WithinRel(std::exp(-2.5), 1e-14));

  oracle::Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    const auto g = rng.triple(3);
    std::vector<double> x(3), y(3);
    for (auto& a : x) a = rng.normal();
    for (auto& a : y) a = rng.normal();
    const auto kxy = eval_gaussian(g, std::span<const double>(x), std::span<const double>(y));
    const auto kyx = eval_gaussian(g, std::span<const double>(y), std::span<const double>(x));
    CHECK(std::abs(kyx - std::conj(kxy)) < 1e-14);
    CHECK(std::abs(kxy) <= 1.0);
  }
  CHECK_THROWS_AS(eval_gaussian(identity_triple(2), std::span<const double>(one), std::span<const double>(one)),
                  input_error);
}

TEST_CASE("exponent form round trip", "[gaussian]") {
  oracle::Rng rng(32);
  for (int t = 0; t < 30; ++t) {
    const auto g = rng.triple(static_cast<std::size_t>(rng.integer(1, 4)), 1.0);
    const auto back = triple_from_exponent_form(exponent_form(g));
    CHECK(frobenius_norm(Matrix<double>(back.A.matrix() - g.A.matrix())) < 1e-14);
    CHECK(frobenius_norm(Matrix<double>(back.B - g.B)) < 1e-14);
    CHECK(frobenius_norm(Matrix<double>(back.C.matrix() - g.C.matrix())) < 1e-14);
  }
}

TEST_CASE("phase_space_form", "[gaussian]") {
  const auto g1 = phase_space_form(identity_triple(1)).G;
  CHECK_THAT(g1(0, 0), WithinAbs(4.0, 1e-15));
  CHECK_THAT(g1(1, 1), WithinAbs(0.25, 1e-15));
  const auto g2 = phase_space_form(G3::scalar(1.5, 0, 1)).G;
  CHECK_THAT(g2(0, 0), WithinAbs(4.0, 1e-15));
  CHECK_THAT(g2(1, 1), WithinAbs(1.0 / 6.0, 1e-15));

  oracle::Rng rng(33);
  for (int t = 0; t < 50; ++t) {
    const auto g = rng.triple(static_cast<std::size_t>(rng.integer(1, 4)), 1.5);
    CHECK(min_eigenvalue(phase_space_form(g).G) > 0);
  }
  CHECK_THROWS_AS(phase_space_form(G3::scalar(-1, 0, 1)), input_error);
}

TEST_CASE("phase-space normalisation agrees with the integration engine and quadrature", "[gaussian]") {
  // For n = 1 the engine's Wigner transform of the unit-norm kernel gives the
  // constant; this value, not a closed form quoted elsewhere, is authoritative.
  for (auto [a, b, c] : {std::tuple{1.5, 0.0, 1.0}, std::tuple{0.7, 0.4, 1.3}, std::tuple{2.0, -1.1, 0.4}}) {
    const G3 g = G3::scalar(a, b, c);
    const auto ps = phase_space_form(g);
    const auto w = wigner_transform(PolyGaussianKernel<double>::gaussian(g));
    CHECK(std::abs(w.scale - cd(ps.c_G)) < 1e-12 * ps.c_G);
    CHECK(frobenius_norm(Matrix<double>(w.G.matrix() - ps.G.matrix())) < 1e-12);
    CHECK_THAT(ps.c_G, WithinRel(1.0 / (2.0 * std::sqrt(M_PI * a)), 1e-14));

    // W(x0, p0) by direct quadrature of the defining integral
    const double x0 = 0.3, p0 = -0.4;
    const cd num = oracle::integrate_box(
                       [&](const std::vector<double>& y) {
                         const std::vector<double> u{x0 + y[0] / 2}, v{x0 - y[0] / 2};
                         return std::exp(cd(0, -p0 * y[0])) *
                                eval_gaussian(g, std::span<const double>(u), std::span<const double>(v));
                       },
                       1, 12.0) /
                   (2 * M_PI);
    const std::vector<double> xv{x0}, pv{p0};
    CHECK(std::abs(num - w(std::span<const double>(xv), std::span<const double>(pv))) < 1e-10);
  }
}

TEST_CASE("symplectic_spectrum", "[gaussian]") {
  for (double c : {0.3, 1.0, 2.5}) {
    for (double a : {0.5, 1.0, 4.0}) {
      const auto G = RealSymMatrix<double>(Matrix<double>::from_rows({{4 * c, 0}, {0, 1 / (4 * a)}}));
      CHECK_THAT(symplectic_spectrum(G).mus[0], WithinRel(std::sqrt(c / a), 1e-12));
    }
  }
  for (double mu : {0.2, 1.0, 3.0}) {
    const auto sp = symplectic_spectrum(phase_space_form(G3::scalar(1 / (4 * mu), 0, mu / 4)).G);
    CHECK_THAT(sp.mus[0], WithinRel(mu, 1e-12));
    CHECK(gaussian_positive(G3::scalar(1 / (4 * mu), 0, mu / 4)).positive == (mu <= 1.0));
  }
  const auto id = symplectic_spectrum(RealSymMatrix<double>::identity(6));
  for (double m : id.mus) CHECK_THAT(m, WithinAbs(1.0, 1e-13));
  CHECK(id.mus.size() == 3);
  CHECK_THROWS_AS(symplectic_spectrum(RealSymMatrix<double>(Matrix<double>::from_rows({{1, 0}, {0, -1}}))),
                  input_error);
}

TEST_CASE("symplectic_spectrum matches eigenvalues of G Omega", "[gaussian][property]") {
  oracle::Rng rng(34);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 4));
    const auto G = phase_space_form(rng.triple(n, 1.0)).G;
    const auto mine = symplectic_spectrum(G).mus;
    const auto ref = oracle::williamson_by_eigen(G.matrix());
    REQUIRE(ref.size() == n);
    for (std::size_t k = 0; k < n; ++k) CHECK_THAT(mine[k], WithinRel(ref[k], 1e-8));
    CHECK(std::is_sorted(mine.rbegin(), mine.rend()));
  }
}

TEST_CASE("symplectic_spectrum is invariant under symplectic congruence", "[gaussian][property]") {
  oracle::Rng rng(35);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 3));
    const auto S = random_symplectic(rng, n);
    const auto omega = symplectic_form<double>(n);
    REQUIRE(frobenius_norm(Matrix<double>(S.transpose() * omega * S - omega)) < 1e-10);
    const auto G = phase_space_form(rng.triple(n, 1.0)).G;
    const auto before = symplectic_spectrum(G).mus;
    const auto after = symplectic_spectrum(RealSymMatrix<double>(S.transpose() * G.matrix() * S)).mus;
    for (std::size_t k = 0; k < n; ++k) CHECK_THAT(after[k], WithinRel(before[k], 1e-7));
  }
}

TEST_CASE("gaussian_positive", "[gaussian]") {
  const auto p = gaussian_positive(G3::scalar(1.5, 0, 1));
  CHECK(p.positive);
  CHECK_THAT(p.max_mu(), WithinAbs(std::sqrt(2.0 / 3.0), 1e-12));
  const auto q = gaussian_positive(G3::scalar(1, 0, 2));
  CHECK_FALSE(q.positive);
  CHECK_THAT(q.max_mu(), WithinAbs(std::sqrt(2.0), 1e-12));
  const auto b = gaussian_positive(identity_triple(3));
  CHECK(b.positive);
  CHECK_THAT(b.max_mu(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("1-D positivity is A >= C", "[gaussian][property]") {
  oracle::Rng rng(36);
  for (int t = 0; t < 500; ++t) {
    const double a = rng.uniform(0.05, 5), c = rng.uniform(0.05, 5), b = rng.uniform(-3, 3);
    if (std::abs(std::sqrt(c / a) - 1) < 1e-9) continue;
    CHECK(gaussian_positive(G3::scalar(a, b, c)).positive == (a >= c));
  }
}

TEST_CASE("(I, B, I) positive forces B symmetric", "[gaussian][property]") {
  oracle::Rng rng(37);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(2, 4));
    const auto s = rng.symmetric(n, 0.5);
    auto k = rng.general(n);
    k = (k - k.transpose()) * 0.5;
    const auto I = RealSymMatrix<double>::identity(n);
    CHECK(gaussian_positive(G3(I, s, I)).positive);
    for (double eps : {1e-3, 1e-2, 0.1, 1.0}) CHECK_FALSE(gaussian_positive(G3(I, s + k * eps, I)).positive);
  }
}

TEST_CASE("preorder examples", "[gaussian]") {
  oracle::Rng rng(38);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 3));
    const auto g = positive_triple(rng, n);
    CHECK(preorder_leq(identity_triple(n), g).holds);
  }
  CHECK(preorder_leq(G3::scalar(1.5, 0, 1), G3::scalar(11.5, 0, 11)).holds);
  CHECK_FALSE(preorder_leq(G3::scalar(1, 0, 1), G3::scalar(1, 0, 2)).holds);
  const auto res = preorder_leq(G3::scalar(1, 0, 1), G3::scalar(1, 0, 2));
  CHECK(res.witness.r == Catch::Approx(1.0));
  CHECK(res.max_mu() > 1);

  CHECK(equiv(G3::scalar(1.5, 0, 1), G3::scalar(1.5, 0, 1)));
  for (double d : {-0.5, 0.0, 10.0, 250.0}) CHECK(equiv(G3::scalar(1.5, 0, 1), G3::scalar(1.5 + d, 0, 1 + d)));
  CHECK_FALSE(equiv(G3::scalar(1, 0, 1), G3::scalar(2, 0, 1)));

  CHECK(sufficient_leq(G3::scalar(1.5, 0, 1), G3::scalar(1.5, 0, 1)));
  CHECK(sufficient_leq(G3::scalar(1.5, 0, 1), G3::scalar(2.5, 0, 1)));
  const auto I = RealSymMatrix<double>::identity(2);
  CHECK_FALSE(sufficient_leq(G3(I, Matrix<double>(2, 2), I), G3(I, Matrix<double>::from_rows({{0, 1}, {-1, 0}}), I)));
  CHECK_THROWS_AS(preorder_leq(identity_triple(1), identity_triple(2)), input_error);
}

TEST_CASE("preorder axioms on random triples", "[gaussian][property]") {
  oracle::Rng rng(39);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 3));
    const auto g0 = rng.triple(n, 1.0);
    CHECK(preorder_leq(g0, g0).holds);

    const auto g1 = random_successor(rng, g0);
    const auto g2 = random_successor(rng, g1);
    const auto r01 = preorder_leq(g0, g1);
    REQUIRE(r01.holds);
    REQUIRE(preorder_leq(g1, g2).holds);
    CHECK(preorder_leq(g0, g2).holds);

    // r-invariance
    for (double extra : {1.0, 10.0})
      CHECK(preorder_leq_with_shift(g0, g1, r01.witness.r + extra).holds == r01.holds);
    const auto other = rng.triple(n, 1.0);
    const auto ro = preorder_leq(g0, other);
    for (double extra : {1.0, 10.0})
      CHECK(preorder_leq_with_shift(g0, other, ro.witness.r + extra).holds == ro.holds);

    // necessary condition A1 - C1 >= A0 - C0
    for (const auto* h : {&g1, &g2, &other}) {
      if (!preorder_leq(g0, *h).holds) continue;
      CHECK(min_eigenvalue((h->A - h->C) - (g0.A - g0.C)) >= -1e-10);
    }

    // sufficient condition implies the preorder
    if (sufficient_leq(g0, other)) CHECK(ro.holds);
  }
}

TEST_CASE("equiv iff two-sided preorder", "[gaussian][property]") {
  oracle::Rng rng(40);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 3));
    const auto g0 = rng.triple(n, 1.0);
    G3 g1 = rng.triple(n, 1.0);
    switch (t % 3) {
      case 0: {  // equivalent by construction
        const auto d = RealSymMatrix<double>(rng.symmetric(n, 0.3));
        g1 = G3(g0.A + d, g0.B + rng.symmetric(n), g0.C + d);
        break;
      }
      case 1: {  // A - C differs slightly
        const auto d = RealSymMatrix<double>(rng.symmetric(n, 0.3));
        g1 = G3(g0.A + d + RealSymMatrix<double>::scalar(n, 0.05), g0.B, g0.C + d);
        break;
      }
      default: break;
    }
    const bool two_sided = preorder_leq(g0, g1).holds && preorder_leq(g1, g0).holds;
    CHECK(equiv(g0, g1) == two_sided);
    if (t % 3 == 0) CHECK(two_sided);
  }
}
