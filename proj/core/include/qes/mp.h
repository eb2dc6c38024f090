// SPDX-License-Identifier: Apache-2.0
// Working arithmetic types and shared error taxonomy.
#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <complex>
#include <stdexcept>
#include <string>

namespace qes {

/// Fixed working precision: 50 significant decimal digits everywhere.
/// Requested CLI precision only moves stopping tolerances, never the type.
using real = boost::multiprecision::cpp_bin_float_50;
using cplx = boost::multiprecision::cpp_complex_50;

/// Stopping tolerance for iterative refinement at a requested digit count.
/// Floored at 1e-45 so it stays meaningful inside the 50-digit type.
inline real stop_tolerance(int digits) {
  if (digits < 1) digits = 1;
  if (digits > 45) digits = 45;
  real t = 1;
  for (int i = 0; i < digits; ++i) t /= 10;
  return t;
}

inline double to_double(const real& x) { return x.convert_to<double>(); }
inline std::complex<double> to_dcomplex(const cplx& z) {
  return {z.real().convert_to<double>(), z.imag().convert_to<double>()};
}
inline cplx to_cplx(const std::complex<double>& z) { return cplx(real(z.real()), real(z.imag())); }

/// Invalid parameters, unsupported combinations, violated preconditions.
/// The CLI maps this to exit code 2.
struct validation_error : std::invalid_argument {
  explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Breakdown of an iterative numeric procedure (no convergence, singular
/// linear algebra where regular was required). The CLI maps this to exit 3.
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qes
