// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the qes authors
#include <array>
#include <random>
#include <vector>

#include "doctest.h"
#include "qes/bethe.h"
#include "qes/explorer.h"
#include "qes/models.h"

namespace {

using qes::cplx;
using qes::OdeSpec;
using qes::Poly;
using qes::real;
using qes::RootSet;

OdeSpec random_spec(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  OdeSpec s;
  for (auto& v : s.a) v = real(u(rng));
  for (auto& v : s.b) v = real(u(rng));
  s.c = {real(0), real(0), real(0)};
  return s;
}

RootSet random_roots(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  RootSet rs;
  for (int i = 0; i < n; ++i) rs.roots.emplace_back(real(u(rng)), real(u(rng)));
  return rs;
}

qes::ModelInstance sextic_on_locus(double beta, double gamma, int n, int p) {
  qes::SexticParams sp;
  sp.beta = real(beta);
  sp.gamma = real(gamma);
  sp.n = n;
  sp.p = p;
  return qes::on_qes_locus(sp);
}

/// Independent check of admissible_z: expand X y'' + Y y' + (c=0) y for the
/// monic y with the given roots, then peel c2, c1, c0 off the top three
/// coefficient rows by back-substitution.  Adding c(z) y contributes
/// c2 y_{k-2} + c1 y_{k-1} + c0 y_k to the z^k coefficient, so requiring the
/// coefficients of z^{n+2}, z^{n+1}, z^n of the full image to vanish gives a
/// triangular system in (c2, c1, c0).
std::array<cplx, 3> oracle_c(int n, const OdeSpec& spec, const RootSet& roots) {
  OdeSpec bare = spec;
  bare.c = {real(0), real(0), real(0)};
  Poly y = qes::from_roots(roots);
  Poly image = qes::apply_ode(bare, y);
  auto coef = [&](const Poly& p, int k) -> cplx {
    return (k >= 0 && k <= p.degree()) ? p.coeffs[static_cast<std::size_t>(k)] : cplx(0);
  };
  cplx c2 = -coef(image, n + 2);
  cplx c1 = -coef(image, n + 1) - c2 * coef(y, n - 1);
  cplx c0 = -coef(image, n) - c1 * coef(y, n - 1) - c2 * coef(y, n - 2);
  return {c2, c1, c0};
}

}  // namespace

TEST_SUITE("bethe") {

TEST_CASE("coefficient formulas match expansion for arbitrary distinct roots") {
  // The closed forms hold for any root multiset, not only solved ones.
  for (std::uint64_t seed = 1; seed <= 24; ++seed) {
    int n = 1 + static_cast<int>(seed % 5);
    OdeSpec spec = random_spec(seed * 131);
    RootSet roots = random_roots(n, seed * 733);
    auto closed = qes::admissible_z(n, spec, roots);
    auto expanded = oracle_c(n, spec, roots);
    for (std::size_t k = 0; k < 3; ++k) {
      real scale = real(1) + abs(expanded[k]);
      CHECK(abs(closed[k] - expanded[k]) / scale <= real(1e-9));
    }
  }
}

TEST_CASE("admissible coefficients make the subspace exactly invariant") {
  OdeSpec spec = random_spec(42);
  RootSet roots = random_roots(3, 43);
  auto c = qes::admissible_z(3, spec, roots);
  // With the derived complex c folded in, the image of y must stay at
  // degree <= n; verify by direct polynomial arithmetic.
  OdeSpec bare = spec;
  bare.c = {real(0), real(0), real(0)};
  Poly y = qes::from_roots(roots);
  Poly image = qes::apply_ode(bare, y);
  Poly zpoly{std::vector<cplx>{c[2], c[1], c[0]}};
  Poly total = qes::add(image, qes::multiply(zpoly, y));
  for (int k = 4; k <= total.degree(); ++k)
    CHECK(abs(total.coeffs[static_cast<std::size_t>(k)]) <= real(1e-9));
}

TEST_CASE("residuals vanish at solved configurations and telescoping holds") {
  OdeSpec spec = qes::ode_spec(sextic_on_locus(0.0, 1.5, 2, 0));
  auto sols = qes::solve_baes(spec, 2);
  REQUIRE(!sols.empty());
  for (const auto& s : sols) {
    CHECK(s.residual_norm <= real(1e-9));
    auto per_root = qes::bae_residual(spec, s.roots);
    cplx tele(0);
    for (const cplx& r : per_root) {
      CHECK(abs(r) <= real(1e-9));
      tele += r;
    }
    // The pairwise 2/(z_i - z_j) terms cancel in the sum, leaving sum Y/X.
    cplx yx(0);
    for (const cplx& z : s.roots.roots)
      yx += qes::evaluate(spec.Y(), z) / qes::evaluate(spec.X(), z);
    CHECK(abs(tele - yx) <= real(1e-8));
    REQUIRE(s.roots.size() == 2);
    CHECK(abs(s.roots.roots[0] - s.roots.roots[1]) > real(1e-10));
  }
  CHECK(sols.size() <= 3);  // at most n+1 distinct configurations
  for (std::size_t i = 0; i < sols.size(); ++i)
    for (std::size_t j = i + 1; j < sols.size(); ++j)
      CHECK(qes::assignment_distance(sols[i].roots.roots, sols[j].roots.roots) >= real(1e-7));
}

TEST_CASE("solution counts stay within the spectral bound for small levels") {
  for (int n = 1; n <= 4; ++n) {
    OdeSpec spec = qes::ode_spec(sextic_on_locus(0.0, 0.5, n, 1));
    auto sols = qes::solve_baes(spec, n);
    CHECK(!sols.empty());
    CHECK(sols.size() <= static_cast<std::size_t>(n) + 1);
  }
}

TEST_CASE("derived coefficients at solved roots match the instance values") {
  qes::SingularParams sg;
  sg.e = real(1);
  sg.d = real(0.5);
  sg.n = 1;
  auto branches = qes::closed_form_level(sg);
  REQUIRE(branches.size() == 2);
  for (const auto& branch : branches) {
    OdeSpec spec = qes::ode_spec(branch.instance);
    auto sols = qes::solve_baes(spec, 1);
    bool matched = false;
    for (const auto& s : sols) {
      if (qes::assignment_distance(s.roots.roots, branch.roots.roots) <= real(1e-7)) {
        matched = true;
        // c1 and c0 derived from the roots must equal the instance values.
        CHECK(abs(s.derived_c[1] - cplx(spec.c[1])) <= real(1e-8) * (real(1) + abs(spec.c[1])));
        CHECK(abs(s.derived_c[2] - cplx(spec.c[0])) <= real(1e-8) * (real(1) + abs(spec.c[0])));
      }
    }
    CHECK(matched);
  }
}

TEST_CASE("coincident roots raise the singular-configuration error") {
  OdeSpec spec = random_spec(7);
  RootSet rs;
  rs.roots.emplace_back(real(1), real(0));
  rs.roots.emplace_back(real(1), real(0));
  CHECK_THROWS_AS((void)qes::bae_residual(spec, rs), qes::validation_error);
  // A root on a zero of X is flagged with its index.
  OdeSpec cusp;
  cusp.a = {real(0), real(0), real(1), real(0), real(0)};  // X = z^2
  cusp.b = {real(1), real(0), real(0), real(0)};
  RootSet at_zero;
  at_zero.roots.emplace_back(real(0), real(0));
  CHECK_THROWS_AS((void)qes::bae_residual(cusp, at_zero), qes::bae_singularity);
}

TEST_CASE("identical seeds reproduce identical solution lists") {
  OdeSpec spec = qes::ode_spec(sextic_on_locus(0.0, 1.0, 3, 0));
  qes::BaeOptions opt;
  opt.seed = 91;
  auto a = qes::solve_baes(spec, 3, {}, opt);
  auto b = qes::solve_baes(spec, 3, {}, opt);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].roots.size() == b[i].roots.size());
    for (std::size_t j = 0; j < a[i].roots.size(); ++j)
      CHECK(a[i].roots.roots[j] == b[i].roots.roots[j]);
  }
}

}  // TEST_SUITE
