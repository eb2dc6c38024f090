// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the qes authors

#pragma once

#include <vector>

#include "qes/models.h"

namespace qes {

/// Which model parameter the pencil is an eigenproblem in.  `accessory`
/// is the kink's free c0 at fixed nu (the root-cloud route); the other tags
/// name the parameter the family's scan solves for.
enum class SpectralUnknown { energy, omega, lambda, nu, accessory };

enum class Classification { real_eigenvalue, complex_discarded, refinement_failed };

/// Coefficient recursion of the mapped ODE as a matrix pencil
/// (A + mu B + mu^2 C) a = 0 on the coefficient vector a_0..a_n; row r
/// encodes the coefficient of z^r.  C = 0 for the four linear families;
/// only the kink's nu enters quadratically.
struct PencilProblem {
  ModelInstance model;  // unknown's own slot is ignored when substituting mu
  SpectralUnknown unknown{SpectralUnknown::energy};
  int n{0};
  bool quadratic{false};
  MatR A, B, C;
};

struct SolveOptions {
  int precision_digits{30};
  unsigned long long seed{0};
};

struct SpectralResult {
  cplx eigenvalue{};
  Poly coeffs;  // a_n = 1; lower degree only when degree_deficient
  RootSet roots;
  Classification classification{Classification::real_eigenvalue};
  real pencil_residual{0};
  /// Trailing coefficients below 1e-12 of the vector's largest entry are
  /// trimmed; a shortened polynomial marks a collapse onto a lower level.
  bool degree_deficient{false};
  int effective_degree{0};
  bool bae_checked{false};
  real bae_residual{0};
  bool bae_mismatch{false};
};

/// Assembles the pencil for the family's scan unknown (E, omega, omega,
/// lambda, nu).  Constrained parameters that do not involve the unknown
/// must already be substituted: the sextic instance's alpha has to carry
/// its admissible value for the eigenvalues to be exact energies; the
/// energy slot of the four constrained families is placed on the solvable
/// sector automatically.
PencilProblem build_pencil(const ModelInstance& m);

/// Pencil in the kink's free constant coefficient c0 at fixed nu, whose
/// eigenvectors are the Bethe-root polynomials of the nu-parametrized
/// clouds (c1 sits on its solvable-sector value for any root set of this
/// family, so c0 alone separates the branches).
PencilProblem accessory_pencil(const KinkParams& m);

/// ODE coefficient arrays with the unknown set to mu (used for Bethe-root
/// cross-checks of a solved branch).
OdeSpec spec_at(const PencilProblem& pr, const real& mu);

/// True when det(A + mu B + mu^2 C) vanishes for every mu (seeded random
/// rank probes).  The kink (n,p) = (2,1) and (0,1) pencils are of this
/// kind; solve_pencil then reports the kernel at the instance's own nu.
bool identically_singular(const PencilProblem& pr, unsigned long long seed = 0);

/// All eigenpairs: double-precision QZ starts (row-equilibrated, the
/// quadratic case companion-linearized), each refined by an
/// extended-precision bordered Newton iteration.  Results are sorted by
/// real part ascending; complex eigenvalues are kept and tagged
/// complex_discarded; pairs whose refinement stalls are tagged
/// refinement_failed rather than dropped.
std::vector<SpectralResult> solve_pencil(const PencilProblem& pr,
                                         const SolveOptions& opt = {});

/// Fills r.roots with find_roots(r.coeffs) and, for a real eigenvalue,
/// cross-checks them against the Bethe-ansatz equations at spec_at(pr, mu):
/// residual above 1e-6 sets bae_mismatch.  Returns the root set.
RootSet roots_from_coeffs(SpectralResult& r, const PencilProblem& pr,
                          const SolveOptions& opt = {});

/// |Im mu| <= 1e-9 (1 + |Re mu|).
bool is_real_eigenvalue(const cplx& mu);

}  // namespace qes
