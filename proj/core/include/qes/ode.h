// SPDX-License-Identifier: Apache-2.0
// The generic second-order operator X(z) y'' + Y(z) y' + Z(z) y with
// polynomial coefficients of degree at most 4, 3, 2.
#pragma once

#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Dense>
#include <array>

#include "qes/poly.h"

namespace qes {

using MatR = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic>;
using MatC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using VecR = Eigen::Matrix<real, Eigen::Dynamic, 1>;
using VecC = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

/// Coefficient triple of the operator, ascending degree:
///   X(z) = a0 + a1 z + a2 z^2 + a3 z^3 + a4 z^4
///   Y(z) = b0 + b1 z + b2 z^2 + b3 z^3
///   Z(z) = c0 + c1 z + c2 z^2
struct OdeSpec {
  std::array<real, 5> a{};
  std::array<real, 4> b{};
  std::array<real, 3> c{};

  Poly X() const;
  Poly Y() const;
  Poly Z() const;
};

/// Apply the operator to a polynomial: X y'' + Y y' + Z y.
Poly apply_ode(const OdeSpec& spec, const Poly& y);

/// Matrix of the operator on the monomial basis {1, z, ..., z^n}, with
/// `rows` output rows (row r is the coefficient of z^r of the image).
/// Entry [r][k] = k(k-1) a_{r-k+2} + k b_{r-k+1} + c_{r-k}.
/// The square case rows = n+1 is the restriction used by eigenproblems;
/// rows = n+3 additionally exposes the two degree-overflow rows whose
/// vanishing characterizes an invariant polynomial subspace.
MatR ode_matrix(const OdeSpec& spec, int n, int rows);

/// Largest magnitude in the two overflow rows (coefficients of z^{n+1} and
/// z^{n+2} of images of degree-<=n inputs). Zero exactly when the operator
/// maps the degree-n subspace into itself.
real degree_leak(const OdeSpec& spec, int n);

}  // namespace qes
