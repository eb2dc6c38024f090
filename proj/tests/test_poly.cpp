// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the qes authors
#include <random>
#include <vector>

#include "doctest.h"
#include "qes/bethe.h"
#include "qes/poly.h"

namespace {

using qes::cplx;
using qes::Poly;
using qes::real;
using qes::RootSet;

RootSet random_roots(int n, std::uint64_t seed, double spread = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-spread, spread);
  RootSet rs;
  for (int i = 0; i < n; ++i) rs.roots.emplace_back(real(u(rng)), real(u(rng)));
  return rs;
}

}  // namespace

TEST_SUITE("poly") {

TEST_CASE("from_roots is monic and evaluates to zero at each root") {
  RootSet rs = random_roots(7, 11);
  Poly p = qes::from_roots(rs);
  CHECK(p.degree() == 7);
  CHECK(abs(p.leading() - cplx(1)) == real(0));
  for (const cplx& r : rs.roots) CHECK(abs(qes::evaluate(p, r)) <= real(1e-20));
}

TEST_CASE("random-root roundtrip: residuals and assignment distance") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    // Well-separated roots: resample until the minimum gap is comfortable.
    RootSet rs;
    for (std::uint64_t bump = 0;; ++bump) {
      rs = random_roots(9, seed * 977 + bump);
      real gap(1e30);
      for (std::size_t i = 0; i < rs.size(); ++i)
        for (std::size_t j = i + 1; j < rs.size(); ++j)
          gap = std::min(gap, real(abs(rs.roots[i] - rs.roots[j])));
      if (gap > real(0.05)) break;
    }
    Poly p = qes::from_roots(rs);
    RootSet found = qes::find_roots(p);
    REQUIRE(found.size() == rs.size());
    for (const real& r : found.refinement_residuals) CHECK(r <= real(1e-10));
    CHECK(qes::assignment_distance(found.roots, rs.roots) <= real(1e-8));
  }
}

TEST_CASE("degree-30 integer-root polynomial recovers its roots") {
  RootSet rs;
  for (int k = 1; k <= 30; ++k) rs.roots.emplace_back(real(k), real(0));
  Poly p = qes::from_roots(rs);
  RootSet found = qes::find_roots(p, 40);
  REQUIRE(found.size() == 30);
  CHECK(qes::assignment_distance(found.roots, rs.roots) <= real(1e-6));
}

TEST_CASE("zero polynomial and constants are rejected") {
  CHECK_THROWS_AS(qes::find_roots(Poly{}), qes::validation_error);
  CHECK_THROWS_AS(qes::find_roots(Poly(std::vector<cplx>{cplx(3)})), qes::validation_error);
}

TEST_CASE("real coefficients give a conjugation-closed root set") {
  std::vector<cplx> c;
  for (double v : {6.0, -3.5, 2.0, -1.0, 4.0, 1.0}) c.emplace_back(real(v), real(0));
  Poly p{c};
  RootSet found = qes::find_roots(p);
  REQUIRE(found.size() == 5);
  std::vector<cplx> conj_roots;
  for (const cplx& r : found.roots) conj_roots.push_back(conj(r));
  CHECK(qes::assignment_distance(found.roots, conj_roots) <= real(1e-9));
}

TEST_CASE("nearby but distinct roots are not merged") {
  RootSet rs;
  rs.roots.emplace_back(real(0.5), real(0));
  rs.roots.emplace_back(real(0.5) + real(1e-8), real(0));
  rs.roots.emplace_back(real(-1), real(0));
  Poly p = qes::from_roots(rs);
  RootSet found = qes::find_roots(p, 40);
  REQUIRE(found.size() == 3);
  CHECK(qes::assignment_distance(found.roots, rs.roots) <= real(1e-10));
}

TEST_CASE("wide-dynamic-range quadratic avoids cancellation") {
  // z^2 - (1e8 + 1e-8) z + 1: roots 1e8 and 1e-8 exactly.
  std::vector<cplx> c{cplx(1), cplx(-(real(1e8) + real(1e-8))), cplx(1)};
  Poly p{c};
  RootSet found = qes::find_roots(p, 40);
  REQUIRE(found.size() == 2);
  real big(0), small(1e30);
  for (const cplx& r : found.roots) {
    big = std::max(big, real(abs(r)));
    small = std::min(small, real(abs(r)));
  }
  CHECK(abs(big - real(1e8)) / real(1e8) <= real(1e-9));
  CHECK(abs(small - real(1e-8)) / real(1e-8) <= real(1e-9));
}

TEST_CASE("differentiate and evaluate agree with closed forms") {
  // p = (z - 2)^3: p' = 3 (z - 2)^2, p'' = 6 (z - 2), p''' = 6.
  RootSet rs;
  for (int i = 0; i < 3; ++i) rs.roots.emplace_back(real(2), real(0));
  Poly p = qes::from_roots(rs);
  cplx z(real(1.25), real(-0.5));
  cplx d = z - cplx(2);
  CHECK(abs(qes::evaluate(qes::differentiate(p, 1), z) - cplx(3) * d * d) <= real(1e-25));
  CHECK(abs(qes::evaluate(qes::differentiate(p, 2), z) - cplx(6) * d) <= real(1e-25));
  CHECK(abs(qes::evaluate(qes::differentiate(p, 3), z) - cplx(6)) <= real(1e-25));
  CHECK(qes::differentiate(p, 4).is_zero());
}

TEST_CASE("arithmetic identities") {
  Poly p = qes::from_roots(random_roots(4, 21));
  Poly q = qes::from_roots(random_roots(3, 22));
  cplx z(real(0.3), real(0.7));
  CHECK(abs(qes::evaluate(qes::add(p, q), z) - (qes::evaluate(p, z) + qes::evaluate(q, z))) <=
        real(1e-25));
  CHECK(abs(qes::evaluate(qes::multiply(p, q), z) - qes::evaluate(p, z) * qes::evaluate(q, z)) <=
        real(1e-24));
  CHECK(abs(qes::evaluate(qes::scale(p, cplx(0, 2)), z) - cplx(0, 2) * qes::evaluate(p, z)) <=
        real(1e-25));
  // Leading cancellation renormalizes: (p) + (-p) is the zero polynomial.
  CHECK(qes::add(p, qes::scale(p, cplx(-1))).is_zero());
}

}  // TEST_SUITE
