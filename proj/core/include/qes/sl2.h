// SPDX-License-Identifier: Apache-2.0
// Finite-dimensional representation of the raising/neutral/lowering triple
// on polynomials of degree <= n, plus the degree-invariance conditions and
// the matrix-identity verifier for bilinear operator forms.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qes/ode.h"

namespace qes {

/// Generators on the monomial basis {1, z, ..., z^n}:
///   Jm = d/dz           -> Jm[k-1][k] = k
///   J0 = z d/dz - n/2   -> J0[k][k]   = k - n/2
///   Jp = -z^2 d/dz + nz -> Jp[k+1][k] = n - k
/// Stored exactly as integer matrices of the DOUBLED generators so the
/// commutator checks are integer arithmetic (J0 is half-integer for odd n).
struct Sl2Rep {
  int n = 0;
  /// two_j*[r][k] is twice the matrix entry (row r, column k).
  std::vector<std::vector<std::int64_t>> two_jplus, two_jzero, two_jminus;

  MatR Jplus() const;
  MatR Jzero() const;
  MatR Jminus() const;
};

Sl2Rep build_rep(int n);

/// Largest integer defect of the doubled commutator identities
/// [2J0,2Jp] = 2*(2Jp), [2J0,2Jm] = -2*(2Jm), [2Jp,2Jm] = 4*(2J0).
/// Zero exactly when the representation relations hold.
std::int64_t commutator_defect(const Sl2Rep& rep);

enum class Gen { Jp, J0, Jm };

/// A bilinear expression in the generators: sum of coeff * (word of length
/// <= 2, matrices multiplied left to right) plus constant * I. `epsilon` is
/// the gauge eigenvalue convention tied to the model form: assembling the
/// form and subtracting epsilon * I reproduces the full operator matrix.
struct AlgebraizedForm {
  int n = 0;
  struct Term {
    real coeff{0};
    std::vector<Gen> word;
  };
  std::vector<Term> terms;
  real constant{0};
  real epsilon{0};
};

/// Matrix of the form including the constant but not the epsilon shift.
MatR assemble(const AlgebraizedForm& form);

/// Degree-invariance test for the operator: the polynomial subspace of
/// degree <= n is invariant iff
///   b3 = -2(n-1) a4,  c2 = n(n-1) a4,  c1 = -n[(n-1) a3 + b2],
/// each within 1e-10 relative.
struct ConditionReport {
  struct Item {
    std::string name;
    real lhs{0}, rhs{0}, residual{0};
    bool ok = false;
  };
  bool ok = false;
  std::array<Item, 3> items;
};
ConditionReport algebraization_conditions(const OdeSpec& spec, int n);

/// Max-entry deviation |(assemble(form) - epsilon I) - ode_matrix(spec)| on
/// the (n+1)-dimensional subspace. Throws validation_error when the level
/// disagrees with the form's dimension.
real verify_algebraization(const AlgebraizedForm& form, const OdeSpec& spec, int n);

}  // namespace qes
