// SPDX-License-Identifier: Apache-2.0
#include "qes/poly.h"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <cmath>

namespace qes {

Poly add(const Poly& p, const Poly& q) {
  std::vector<cplx> c(std::max(p.coeffs.size(), q.coeffs.size()), cplx(0));
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) c[i] += p.coeffs[i];
  for (std::size_t i = 0; i < q.coeffs.size(); ++i) c[i] += q.coeffs[i];
  return Poly(std::move(c));
}

Poly scale(const Poly& p, const cplx& s) {
  std::vector<cplx> c = p.coeffs;
  for (auto& x : c) x *= s;
  return Poly(std::move(c));
}

Poly multiply(const Poly& p, const Poly& q) {
  if (p.is_zero() || q.is_zero()) return Poly();
  std::vector<cplx> c(p.coeffs.size() + q.coeffs.size() - 1, cplx(0));
  for (std::size_t i = 0; i < p.coeffs.size(); ++i)
    for (std::size_t j = 0; j < q.coeffs.size(); ++j) c[i + j] += p.coeffs[i] * q.coeffs[j];
  return Poly(std::move(c));
}

cplx evaluate(const Poly& p, const cplx& z) {
  cplx acc(0);
  for (std::size_t i = p.coeffs.size(); i-- > 0;) acc = acc * z + p.coeffs[i];
  return acc;
}

Poly from_roots(const RootSet& roots) {
  Poly p(std::vector<cplx>{cplx(1)});
  for (const cplx& r : roots.roots) p = multiply(p, Poly(std::vector<cplx>{-r, cplx(1)}));
  return p;
}

Poly differentiate(const Poly& p, int order) {
  if (order < 0) throw validation_error("differentiate: negative order");
  Poly d = p;
  for (int o = 0; o < order; ++o) {
    if (d.degree() == 0) {
      d = Poly();
      continue;
    }
    std::vector<cplx> c(d.coeffs.size() - 1);
    for (std::size_t k = 1; k < d.coeffs.size(); ++k) c[k - 1] = d.coeffs[k] * real(k);
    d = Poly(std::move(c));
  }
  return d;
}

namespace {

// Parlett-Reinsch style balancing: scale rows/columns by powers of two until
// row and column one-norms are within a factor of two of each other.
void balance_in_place(Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  bool converged = false;
  for (int sweep = 0; sweep < 50 && !converged; ++sweep) {
    converged = true;
    for (int i = 0; i < n; ++i) {
      double c = 0, r = 0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(m(j, i));
        r += std::abs(m(i, j));
      }
      if (c == 0 || r == 0) continue;
      double f = 1.0;
      double s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if ((c + r) < 0.95 * s && f != 1.0) {
        converged = false;
        m.col(i) *= f;
        m.row(i) /= f;
      }
    }
  }
}

// Roots of a quadratic with multiprecision coefficients, stable branch choice.
std::vector<cplx> quadratic_roots(const cplx& c0, const cplx& c1, const cplx& c2) {
  const cplx disc = sqrt(c1 * c1 - real(4) * c2 * c0);
  // Pick the sign that avoids cancellation in -c1 -+ disc.
  cplx q = (c1.real() * disc.real() + c1.imag() * disc.imag() >= 0) ? -(c1 + disc) / real(2)
                                                                    : -(c1 - disc) / real(2);
  std::vector<cplx> out;
  if (q != cplx(0)) {
    out.push_back(q / c2);
    out.push_back(c0 / q);
  } else {
    out.push_back(cplx(0));
    out.push_back(-c1 / c2);
  }
  return out;
}

std::vector<cplx> companion_starts(const std::vector<cplx>& monic, int deg) {
  // Scale roots by s so the double-precision companion stays in range even
  // for coefficient magnitudes far outside double range.
  real s(0);
  for (int k = 0; k < deg; ++k) {
    real mag = abs(monic[k]);
    if (mag == 0) continue;
    real bound = pow(mag, real(1) / real(deg - k));
    if (bound > s) s = bound;
  }
  if (s == 0) return std::vector<cplx>(deg, cplx(0));
  s *= 2;

  // Coefficients of the root-scaled polynomial q(w) = p(s*w)/s^deg are
  // monic[k] / s^(deg-k); complex input is handled by absorbing phases into
  // a real companion of the modulus-balanced real/imag parts. For the real
  // case (the common one) this is the standard companion matrix.
  bool is_real = true;
  for (const auto& c : monic)
    if (c.imag() != 0) is_real = false;

  std::vector<cplx> scaled(deg);
  for (int k = 0; k < deg; ++k) scaled[k] = monic[k] / pow(s, real(deg - k));

  std::vector<cplx> starts(deg);
  if (is_real) {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -to_double(scaled[i].real());
    balance_in_place(comp);
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int i = 0; i < deg; ++i) starts[i] = to_cplx(es.eigenvalues()(i)) * s;
  } else {
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -to_dcomplex(scaled[i]);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    for (int i = 0; i < deg; ++i) starts[i] = to_cplx(es.eigenvalues()(i)) * s;
  }
  return starts;
}

// Simultaneous all-roots correction (Aberth-Ehrlich): plain per-root Newton
// collides nearby roots, the coupled correction keeps them apart.
void polish_all_roots(const std::vector<cplx>& monic, int deg, std::vector<cplx>& z,
                      const real& tol) {
  Poly p{monic};
  Poly dp = differentiate(p);

  // Separate near-coincident starts: coupled corrections divide by pairwise
  // differences, so exact duplicates from the double-precision stage must be
  // displaced before iterating.
  real scale(0);
  for (const auto& zi : z) scale = std::max(scale, abs(zi));
  if (scale == 0) scale = 1;
  const real coincident = real("1e-8") * scale;
  for (int i = 0; i < deg; ++i) {
    for (int j = 0; j < i; ++j) {
      if (abs(z[i] - z[j]) < coincident) {
        real ang = real(2) * boost::math::constants::pi<real>() * (real(i) + real("0.5")) / real(deg);
        z[i] += real("1e-4") * scale * cplx(cos(ang), sin(ang));
      }
    }
  }

  const int max_iter = 500;
  for (int iter = 0; iter < max_iter; ++iter) {
    real max_step(0);
    for (int i = 0; i < deg; ++i) {
      cplx pv = evaluate(p, z[i]);
      cplx dv = evaluate(dp, z[i]);
      if (dv == cplx(0)) {
        z[i] += coincident + tol;
        max_step = scale;
        continue;
      }
      cplx newton = pv / dv;
      cplx sum(0);
      for (int j = 0; j < deg; ++j) {
        if (j == i) continue;
        cplx diff = z[i] - z[j];
        if (diff == cplx(0)) diff = cplx(tol, tol);
        sum += cplx(1) / diff;
      }
      cplx denom = cplx(1) - newton * sum;
      cplx step = (denom == cplx(0)) ? newton : newton / denom;
      z[i] -= step;
      real rel = abs(step) / std::max(real(1), abs(z[i]));
      if (rel > max_step) max_step = rel;
    }
    if (max_step <= tol) break;
  }
}

}  // namespace

RootSet find_roots(const Poly& p, int precision_digits) {
  Poly q = p;
  q.normalize();
  if (q.is_zero()) throw validation_error("find_roots: zero polynomial has no defined root set");
  if (q.degree() < 1) throw validation_error("find_roots: constant polynomial has no roots");

  const int deg_total = q.degree();
  RootSet out;

  // Exact zero roots split off so the companion stage sees a nonzero tail.
  std::vector<cplx> c = q.coeffs;
  int zero_roots = 0;
  while (zero_roots < deg_total && c[zero_roots] == cplx(0)) ++zero_roots;
  c.erase(c.begin(), c.begin() + zero_roots);
  for (int i = 0; i < zero_roots; ++i) out.roots.push_back(cplx(0));

  const int deg = static_cast<int>(c.size()) - 1;
  if (deg >= 1) {
    std::vector<cplx> monic(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) monic[k] = c[k] / c.back();

    std::vector<cplx> z;
    if (deg == 1) {
      z.push_back(-monic[0]);
    } else if (deg == 2) {
      z = quadratic_roots(monic[0], monic[1], cplx(1));
    } else {
      z = companion_starts(monic, deg);
    }
    // The coupled sweeps also polish the closed-form cases, whose starts can
    // carry rounding from upstream arithmetic.
    const real tol = std::max(stop_tolerance(precision_digits + 15), real("1e-45"));
    polish_all_roots(monic, deg, z, tol);
    for (const auto& r : z) out.roots.push_back(r);
  }

  const real lead_mag = abs(q.leading());
  for (const auto& r : out.roots) {
    real denom = real(1) + lead_mag * pow(std::max(abs(r), real(0)), real(deg_total));
    out.refinement_residuals.push_back(abs(evaluate(q, r)) / denom);
  }
  return out;
}

}  // namespace qes
