// SPDX-License-Identifier: Apache-2.0
// Dense univariate polynomials over complex multiprecision scalars.
#pragma once

#include <cstddef>
#include <vector>

#include "qes/mp.h"

namespace qes {

/// Coefficients ascending in degree: coeffs[k] multiplies z^k.
/// Invariant: the highest stored coefficient is nonzero unless the
/// polynomial is identically zero (stored as the single coefficient 0).
struct Poly {
  std::vector<cplx> coeffs{cplx(0)};

  Poly() = default;
  explicit Poly(std::vector<cplx> c) : coeffs(std::move(c)) { normalize(); }

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  bool is_zero() const { return coeffs.size() == 1 && coeffs[0] == cplx(0); }
  const cplx& leading() const { return coeffs.back(); }

  /// Drop trailing exact zeros so degree() is meaningful.
  void normalize() {
    while (coeffs.size() > 1 && coeffs.back() == cplx(0)) coeffs.pop_back();
    if (coeffs.empty()) coeffs.push_back(cplx(0));
  }
};

/// Unordered root multiset with the per-root refinement residuals
/// |p(r)| / (1 + |lead| * |r|^deg) reported by find_roots.
struct RootSet {
  std::vector<cplx> roots;
  std::vector<real> refinement_residuals;

  std::size_t size() const { return roots.size(); }
};

Poly add(const Poly& p, const Poly& q);
Poly scale(const Poly& p, const cplx& s);
Poly multiply(const Poly& p, const Poly& q);
cplx evaluate(const Poly& p, const cplx& z);

/// Monic polynomial with exactly the given root multiset; {} maps to 1.
Poly from_roots(const RootSet& roots);

/// Exact formal derivative of the given order (order >= 0).
Poly differentiate(const Poly& p, int order = 1);

/// All degree-many roots with multiplicity. Starts come from a balanced
/// companion matrix in double precision; an all-roots simultaneous Newton
/// correction then polishes in working precision until the relative
/// residual |p(r)| / (1 + |lead| * |r|^deg) is at most 1e-10 per root.
/// Throws validation_error for the zero polynomial or degree < 1.
RootSet find_roots(const Poly& p, int precision_digits = 30);

}  // namespace qes
