// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the qes authors

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qes/bethe.h"
#include "qes/sl2.h"

namespace qes {

/// The five model families handled by this library.  Each maps a
/// one-dimensional Schrödinger problem to a polynomial ODE in a
/// transformed variable; see ode_spec() for the coefficient arrays.
enum class Family { sextic, singular, isotonic, nonpoly, kink };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// V(x) = alpha x^2 + beta x^4 + gamma x^6 on the line, mapped by z = x^2.
/// Energies live in c0 of the mapped ODE; the constraint pins alpha.
struct SexticParams {
  real alpha{0};
  real beta{0};
  real gamma{1};  // > 0
  int p{0};       // parity sector, 0 or 1
  int n{0};       // polynomial degree of the solvable sector
};

/// V(x) = omega^2 x^2 + 2e/x^4 + 2d/x^6 on the half line, mapped by z = x^2.
/// Only the even sector exists (p = 0 identically); see
/// odd_sector_obstruction() for why p = 1 admits no solutions.
struct SingularParams {
  real omega{1};
  real e{0};
  real d{1};  // > 0
  int n{0};

  /// Exponent of the x^(3/2+g) prefactor, g = e/sqrt(2d).  The sign of
  /// 3/2+g decides whether the prefactor vanishes or diverges at the origin.
  real prefactor_exponent() const;
};

/// V(x) = omega^2 x^2 + 2 beta (beta-1)(x^2-a^2)/(x^2+a^2)^2, mapped by
/// xi = x^2 + a^2.
struct IsotonicParams {
  real omega{1};
  real beta{0};
  real a{1};  // != 0
  int p{0};
  int n{0};
};

/// V(x) = omega^2 x^2 + 2 lambda x^2/(1+delta x^2), mapped by
/// xi = 1 + delta x^2.
struct NonPolyParams {
  real omega{1};
  real lambda{0};
  real delta{1};  // != 0
  int p{0};
  int n{0};
};

/// Kink-stability potential
///   V(x) = mu^2 [8 sinh^4(mu x/2) - (20 nu - 4) sinh^2(mu x/2)
///                + 2 (nu+1)(nu-2)] / [8 (1 + nu + sinh^2(mu x/2))^2],
/// mapped by xi = cosh^2(mu x/2) + nu.
struct KinkParams {
  real mu{1};  // > 0
  real nu{0};
  int p{0};
  int n{0};
};

using ModelInstance =
    std::variant<SexticParams, SingularParams, IsotonicParams, NonPolyParams,
                 KinkParams>;

Family family(const ModelInstance& m);
int level(const ModelInstance& m);   // n
int parity(const ModelInstance& m);  // p; the singular family reports 0

/// Checks structural parameter requirements (gamma > 0, d > 0, a != 0,
/// delta != 0, mu > 0, n >= 0, p in {0,1}); throws validation_error.
void validate(const ModelInstance& m);

/// Coefficient arrays of the mapped ODE X S'' + Y S' + Z S = 0.
///
/// The energy enters c1 for the singular, isotonic, non-polynomial and kink
/// families and c0 for the sextic family.  When `energy` is absent the four
/// c1-placed families use the solvable-sector value E_n, so c1 lands on its
/// admissible value; the sextic spec is built with E = 0.
OdeSpec ode_spec(const ModelInstance& m, std::optional<real> energy = {});

/// Closed-form energy of the solvable sector.  The sextic energy needs the
/// root sum 4*sqrt(gamma)*sum z_i; pass it via `sum_z` (imaginary part is
/// discarded; conjugation-closed root sets have real sums).  The other four
/// families ignore `sum_z`.
real energy(const ModelInstance& m, std::optional<cplx> sum_z = {});

/// Signed residual of the model's parameter constraint evaluated on a root
/// set of size n.  Zero (to tolerance) iff the roots are an admissible
/// solvable-sector solution for the instance's parameters.
real constraint_residual(const ModelInstance& m, const RootSet& roots);

/// Wavefunction in factored form: gauge factor (closed-form exponents
/// derived from the stored instance) times x^p (cosh^p(mu x/2) for the
/// kink) times a polynomial in the mapped variable.
struct Wavefunction {
  ModelInstance model;
  int p{0};
  Poly poly;  // monic, in the mapped variable; degree = level(model)
  real E{0};
};

/// Builds the wavefunction from BAE roots.  `energy` defaults to
/// energy(m, sum of roots).  Requires roots.size() == level(m).
Wavefunction assemble_wavefunction(const ModelInstance& m,
                                   const RootSet& roots,
                                   std::optional<real> energy = {});

/// psi(x); complex only through the polynomial part (conjugation-closed
/// root sets give real values up to roundoff).
cplx wavefunction_value(const Wavefunction& w, const real& x);

real potential(const ModelInstance& m, const real& x);

/// Sixteen deterministic sample points in the family's natural domain:
/// [-2,2] for sextic/isotonic/nonpoly, [0.2,3] for singular, [-3,3] for the
/// kink with points near zeros of xi(x) = 1 + nu + sinh^2(mu x/2) excluded.
std::vector<real> default_samples(const ModelInstance& m);

/// max over samples of |psi''/psi - (V - E)| / (1 + |E|), with psi''/psi
/// evaluated analytically from the gauge log-derivatives.  Samples whose
/// amplitude falls below 1e-8 relative to the largest sampled amplitude are
/// skipped (wavefunction nodes, deep tunneling tails); if every sample is
/// skipped a numerical_error is thrown.
real schrodinger_residual(const Wavefunction& w,
                          const std::vector<real>& samples = {});

/// One analytic branch of a closed-form level.
struct ClosedFormSolution {
  std::string branch;       // "0", "+", "-", "family-1", "family-2", "degenerate"
  std::string solved_name;  // parameter pinned by the constraint; "" if none
  real solved_value{0};
  ModelInstance instance;   // input instance with solved_value substituted
  RootSet roots;            // in the mapped variable
  real E{0};
  Wavefunction wavefunction;
};

/// All analytic branches for n <= 1 of every family plus the kink n = 2
/// levels.  The kink (n,p) = (2,1) sector collapses onto the (0,1) solution;
/// it is returned as a single "degenerate" branch whose instance and
/// wavefunction carry the reduced level n = 0.  Unsupported (family, n)
/// pairs throw validation_error directing to the numeric paths.
std::vector<ClosedFormSolution> closed_form_level(const ModelInstance& m);

/// Magnitude 2p*sqrt(2d) of the contradiction obtained by inserting the
/// root-sum rule into the singular family's c0 coefficient formula: zero in
/// the even sector, 2*sqrt(2d) in the odd sector.  A nonzero value proves
/// the odd sector admits no Bethe-ansatz solution.
real odd_sector_obstruction(const SingularParams& m, int p);

enum class HeunKind { confluent, doubly_confluent, general };

/// Normal form of the mapped ODE as a Heun-class equation.  Exponent slots
/// not meaningful for a given kind are NaN.
struct HeunForm {
  HeunKind kind;
  std::vector<real> singular_points;  // finite singular points
  real gamma, delta, sigma, q;
  cplx alpha, beta;  // complex off the solvable sector; NaN when not meaningful
  /// |alpha + beta + 1 - (gamma + delta + sigma)|; vanishes for the general
  /// kind at any energy.
  real fuchs_residual() const;
};

/// Heun classification: isotonic and non-polynomial map to the confluent
/// equation, the singular family to the doubly-confluent one, the kink to
/// the general equation with alpha, beta the roots of
/// t^2 - (p-3) t + c1 = 0.  The sextic family's mapped ODE falls outside
/// these three kinds and throws validation_error.
HeunForm heun_form(const ModelInstance& m, std::optional<real> energy = {});

/// The model's operator written in the spin-n/2 representation, with the
/// scalar `epsilon` such that assemble(form) - epsilon * I equals
/// ode_matrix(ode_spec(m, energy), n, n+1).  For the sextic family the
/// energy enters only through epsilon, so the identity holds at any E; the
/// other four families algebraize on the solvable sector, i.e. at the
/// default energy(m).
AlgebraizedForm algebraized_form(const ModelInstance& m,
                                 std::optional<real> energy = {});

/// JSON document {"family": ..., params..., "p": ..., "n": ...}; parameter
/// values carry 17 significant digits.
std::string to_json_string(const ModelInstance& m);
ModelInstance instance_from_json(const std::string& text);

}  // namespace qes
