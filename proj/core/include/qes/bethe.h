// SPDX-License-Identifier: Apache-2.0
// Generic machinery for second-order operators with polynomial invariant
// subspaces: admissible lowest-coefficient values, the coupled algebraic
// root equations, their residuals, and a multi-start numeric solver.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <tuple>
#include <vector>

#include "qes/ode.h"

namespace qes {

/// One solved root configuration at level n.
struct BetheSolution {
  int n = 0;
  RootSet roots;
  /// max_i of the root-equation residual |sum_{j!=i} 2/(z_i-z_j) + Y(z_i)/X(z_i)|.
  real residual_norm{0};
  /// (c2, c1, c0) implied by the roots via admissible_z.
  std::array<cplx, 3> derived_c{};
};

/// Thrown by bae_residual when a root sits on a zero of X; carries which one.
struct bae_singularity : validation_error {
  int root_index;
  bae_singularity(const std::string& what, int index) : validation_error(what), root_index(index) {}
};

/// The closed-form (c2, c1, c0) that make X y'' + Y y' + Z y = 0 admit the
/// monic degree-n polynomial with the given roots as a solution candidate:
///   c2 = -n(n-1) a4 - n b3
///   c1 = -[2(n-1) a4 + b3] S1 - n(n-1) a3 - n b2
///   c0 = -[2(n-1) a4 + b3] S2 - 2 a4 P2 - [2(n-1) a3 + b2] S1 - n(n-1) a2 - n b1
/// with S1 = sum z_i, S2 = sum z_i^2, P2 = sum_{i<j} z_i z_j.
/// Only the a and b arrays of `spec` are read. Requires |roots| = n.
std::array<cplx, 3> admissible_z(int n, const OdeSpec& spec, const RootSet& roots);

/// i-th entry: sum_{j!=i} 2/(z_i - z_j) + Y(z_i)/X(z_i).
/// Throws bae_singularity if some X(z_i) vanishes, and validation_error
/// when two roots coincide exactly (the pairwise terms are undefined).
std::vector<cplx> bae_residual(const OdeSpec& spec, const RootSet& roots);

/// The three symmetric functions (sum z_i, sum z_i^2, sum_{i<j} z_i z_j).
std::tuple<cplx, cplx, cplx> sum_rule(const RootSet& roots);

struct BaeOptions {
  int starts = 64;           ///< random multi-start budget beyond structured seeds
  std::uint64_t seed = 0;    ///< RNG seed; identical seeds reproduce identical output
  int precision_digits = 30; ///< drives the Newton stopping tolerance
  real box = real(0);        ///< half-width of the real seed box; 0 = auto from Y roots
};

/// All distinct root configurations found by damped multi-start Newton on
/// the smooth form F_i = 2 X(z_i) sum_{j!=i} 1/(z_i - z_j) + Y(z_i).
/// Seeds: perturbed multisets of the roots of Y, Chebyshev-spaced points in
/// a real box, random complex points, plus any caller-provided seeds.
/// Results are deduplicated as unordered multisets (assignment distance
/// 1e-7), rejected unless the residual norm is <= 1e-9 and pairwise root
/// distances exceed 1e-10, and sorted by (residual, lexicographic roots).
/// An empty list means no start converged; that is not an error.
std::vector<BetheSolution> solve_baes(const OdeSpec& spec, int n,
                                      const std::vector<RootSet>& seeds = {},
                                      const BaeOptions& options = {});

/// Assignment distance between two equal-size root multisets: the minimum
/// over pairings of the maximum pairwise distance.
real assignment_distance(const std::vector<cplx>& a, const std::vector<cplx>& b);

}  // namespace qes
