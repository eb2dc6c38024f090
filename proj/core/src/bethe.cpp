// SPDX-License-Identifier: Apache-2.0
#include "qes/bethe.h"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/fpclassify.hpp>
#include <cmath>
#include <random>

namespace qes {

std::array<cplx, 3> admissible_z(int n, const OdeSpec& spec, const RootSet& roots) {
  if (static_cast<int>(roots.size()) != n)
    throw validation_error("admissible_z: root count does not match the level n");
  const auto [s1, s2, p2] = sum_rule(roots);
  const real a2 = spec.a[2], a3 = spec.a[3], a4 = spec.a[4];
  const real b1 = spec.b[1], b2 = spec.b[2], b3 = spec.b[3];
  const real nn1 = real(n) * real(n - 1);
  std::array<cplx, 3> c;
  c[0] = cplx(-nn1 * a4 - real(n) * b3);
  c[1] = -(real(2) * real(n - 1) * a4 + b3) * s1 - cplx(nn1 * a3 + real(n) * b2);
  c[2] = -(real(2) * real(n - 1) * a4 + b3) * s2 - real(2) * a4 * p2 -
         (real(2) * real(n - 1) * a3 + b2) * s1 - cplx(nn1 * a2 + real(n) * b1);
  return c;
}

std::vector<cplx> bae_residual(const OdeSpec& spec, const RootSet& roots) {
  const int n = static_cast<int>(roots.size());
  const Poly X = spec.X();
  const Poly Y = spec.Y();
  // Scale-aware zero test for X(z_i): the equations divide by it.
  real xscale(0);
  for (const auto& c : X.coeffs) xscale = std::max(xscale, abs(c));
  if (xscale == 0) xscale = 1;

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (roots.roots[i] == roots.roots[j])
        throw validation_error("bae_residual: coincident roots at indices " + std::to_string(j) +
                               " and " + std::to_string(i));

  std::vector<cplx> res(n);
  for (int i = 0; i < n; ++i) {
    const cplx zi = roots.roots[i];
    const cplx xv = evaluate(X, zi);
    real zmag = std::max(real(1), abs(zi));
    if (abs(xv) <= real("1e-40") * xscale * pow(zmag, real(4)))
      throw bae_singularity("bae_residual: root " + std::to_string(i) + " lies on a zero of X", i);
    cplx sum(0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      sum += real(2) / (zi - roots.roots[j]);
    }
    res[i] = sum + evaluate(Y, zi) / xv;
  }
  return res;
}

std::tuple<cplx, cplx, cplx> sum_rule(const RootSet& roots) {
  cplx s1(0), s2(0);
  for (const auto& z : roots.roots) {
    s1 += z;
    s2 += z * z;
  }
  cplx p2 = (s1 * s1 - s2) / real(2);
  return {s1, s2, p2};
}

real assignment_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  const int n = static_cast<int>(a.size());
  if (n != static_cast<int>(b.size())) return real("1e50");
  if (n == 0) return real(0);
  if (n <= 12) {
    // Bitmask assignment: entry m = best max-distance matching the first
    // popcount(m) elements of a onto the subset m of b.
    const std::size_t full = (std::size_t(1) << n);
    std::vector<real> best(full, real("1e50"));
    best[0] = 0;
    for (std::size_t m = 0; m + 1 < full; ++m) {
      if (best[m] >= real("1e50")) continue;
      int i = __builtin_popcountll(m);
      for (int j = 0; j < n; ++j) {
        if (m & (std::size_t(1) << j)) continue;
        real cand = std::max(best[m], abs(a[i] - b[j]));
        std::size_t nm = m | (std::size_t(1) << j);
        if (cand < best[nm]) best[nm] = cand;
      }
    }
    return best[full - 1];
  }
  // Large sets: order-based pairing after lexicographic sort. Used only for
  // deduplication, where both sets came from the same solver and agree.
  auto key = [](const cplx& x, const cplx& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  };
  std::vector<cplx> sa = a, sb = b;
  std::sort(sa.begin(), sa.end(), key);
  std::sort(sb.begin(), sb.end(), key);
  real d(0);
  for (int i = 0; i < n; ++i) d = std::max(d, abs(sa[i] - sb[i]));
  return d;
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  std::vector<cplx> z;
};

// Damped Newton on F_i = 2 X(z_i) sum_{j!=i} 1/(z_i-z_j) + Y(z_i) = 0.
// Multiplying through by X removes the poles of the rational form while
// keeping the same zero set away from zeros of X.
NewtonOutcome newton_from(const OdeSpec& spec, std::vector<cplx> z, const real& tol) {
  const int n = static_cast<int>(z.size());
  const Poly X = spec.X(), Y = spec.Y();
  const Poly dX = differentiate(X), dY = differentiate(Y);

  real scale(1);
  for (const auto& zi : z) scale = std::max(scale, abs(zi));

  MatC J(n, n);
  VecC F(n), step(n);
  for (int iter = 0; iter < 80; ++iter) {
    for (int i = 0; i < n; ++i) {
      const cplx zi = z[i];
      cplx s1(0), s2(0);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        cplx d = zi - z[j];
        if (d == cplx(0)) return {};
        s1 += cplx(1) / d;
        s2 += cplx(1) / (d * d);
      }
      const cplx xv = evaluate(X, zi), dxv = evaluate(dX, zi);
      F(i) = real(2) * xv * s1 + evaluate(Y, zi);
      J(i, i) = real(2) * dxv * s1 - real(2) * xv * s2 + evaluate(dY, zi);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        cplx d = zi - z[j];
        J(i, j) = real(2) * xv / (d * d);
      }
    }
    Eigen::PartialPivLU<MatC> lu(J);
    step = lu.solve(-F);
    real snorm(0), fnorm(0);
    for (int i = 0; i < n; ++i) {
      snorm = std::max(snorm, abs(step(i)));
      fnorm = std::max(fnorm, abs(F(i)));
    }
    if (!boost::math::isfinite(snorm)) return {};
    // Damp long steps; the coupled equations have poles between basins.
    real damp = snorm > scale ? scale / snorm : real(1);
    for (int i = 0; i < n; ++i) z[i] += damp * step(i);
    real zmax(0);
    for (const auto& zi : z) zmax = std::max(zmax, abs(zi));
    if (zmax > real("1e12") * scale) return {};
    scale = std::max(real(1), zmax);
    if (snorm <= tol * scale && damp == real(1)) {
      NewtonOutcome out;
      out.converged = true;
      out.z = std::move(z);
      return out;
    }
  }
  return {};
}

bool distinct_enough(const std::vector<cplx>& z) {
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (abs(z[i] - z[j]) <= real("1e-10")) return false;
  return true;
}

}  // namespace

std::vector<BetheSolution> solve_baes(const OdeSpec& spec, int n, const std::vector<RootSet>& seeds,
                                      const BaeOptions& options) {
  if (n < 1) throw validation_error("solve_baes: level n must be at least 1");
  const real tol = stop_tolerance(options.precision_digits + 10);

  // Structured seeds from the roots of Y: the single-root equations reduce
  // to Y(z) = 0 exactly, and higher levels cluster near those points.
  std::vector<cplx> ynodes;
  {
    Poly Y = spec.Y();
    if (Y.degree() >= 1 && !Y.is_zero()) {
      RootSet yr = find_roots(Y, options.precision_digits);
      ynodes = yr.roots;
    }
  }
  real box = options.box;
  if (box == 0) {
    box = 1;
    for (const auto& y : ynodes) box = std::max(box, real(2) * abs(y));
  }

  std::vector<std::vector<cplx>> starts;
  if (!ynodes.empty() && std::pow(double(ynodes.size()), double(n)) <= 256.0) {
    // All multisets of size n over the Y roots, duplicates displaced.
    std::vector<int> pick(n, 0);
    const int m = static_cast<int>(ynodes.size());
    while (true) {
      std::vector<cplx> s(n);
      for (int i = 0; i < n; ++i) {
        real ang = real(2) * boost::math::constants::pi<real>() * real(i + 1) / real(n + 1);
        s[i] = ynodes[pick[i]] + real("1e-2") * box * cplx(cos(ang), sin(ang)) * real(i) / real(n);
      }
      starts.push_back(std::move(s));
      int idx = n - 1;
      while (idx >= 0 && pick[idx] == m - 1) pick[idx--] = 0;
      if (idx < 0) break;
      ++pick[idx];
    }
  }
  for (const auto& rs : seeds)
    if (static_cast<int>(rs.size()) == n) starts.emplace_back(rs.roots);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> node_pick(0, 4 * n - 1);
  // Chebyshev ladder in [-box, box]; random draws choose n of the nodes and
  // add a small imaginary displacement so complex pairs are reachable.
  std::vector<cplx> cheb(4 * n);
  for (int j = 0; j < 4 * n; ++j) {
    real arg = boost::math::constants::pi<real>() * (real(j) + real("0.5")) / real(4 * n);
    cheb[j] = cplx(box * cos(arg), real(0));
  }
  for (int s = 0; s < options.starts; ++s) {
    std::vector<cplx> start(n);
    const bool pure_random = (s % 2 == 1);
    for (int i = 0; i < n; ++i) {
      if (pure_random) {
        start[i] = cplx(box * real(unit(rng)), box * real(unit(rng)));
      } else {
        start[i] = cheb[node_pick(rng)] + cplx(real(0), box * real("0.05") * real(unit(rng)));
      }
    }
    starts.push_back(std::move(start));
  }

  std::vector<BetheSolution> found;
  auto consider = [&](std::vector<cplx> z) {
    if (!distinct_enough(z)) return;
    RootSet rs;
    rs.roots = std::move(z);
    real rnorm(0);
    try {
      for (const auto& r : bae_residual(spec, rs)) rnorm = std::max(rnorm, abs(r));
    } catch (const bae_singularity&) {
      return;
    }
    if (rnorm > real("1e-9")) return;
    std::sort(rs.roots.begin(), rs.roots.end(), [](const cplx& x, const cplx& y) {
      if (x.real() != y.real()) return x.real() < y.real();
      return x.imag() < y.imag();
    });
    for (auto& existing : found) {
      if (assignment_distance(existing.roots.roots, rs.roots) <= real("1e-7")) {
        if (rnorm < existing.residual_norm) {
          existing.roots = rs;
          existing.residual_norm = rnorm;
          existing.derived_c = admissible_z(existing.n, spec, rs);
        }
        return;
      }
    }
    BetheSolution sol;
    sol.n = n;
    sol.roots = rs;
    sol.residual_norm = rnorm;
    sol.derived_c = admissible_z(n, spec, rs);
    found.push_back(std::move(sol));
  };

  if (n == 1) {
    // Exact enumeration: the one-root equation is Y(z) = 0 away from X = 0.
    for (const auto& y : ynodes) consider({y});
  } else {
    for (auto& s : starts) {
      NewtonOutcome out = newton_from(spec, s, tol);
      if (out.converged) consider(std::move(out.z));
    }
  }

  std::sort(found.begin(), found.end(), [](const BetheSolution& a, const BetheSolution& b) {
    if (a.residual_norm != b.residual_norm) return a.residual_norm < b.residual_norm;
    for (std::size_t i = 0; i < std::min(a.roots.size(), b.roots.size()); ++i) {
      const cplx &x = a.roots.roots[i], &y = b.roots.roots[i];
      if (x.real() != y.real()) return x.real() < y.real();
      if (x.imag() != y.imag()) return x.imag() < y.imag();
    }
    return a.roots.size() < b.roots.size();
  });
  return found;
}

}  // namespace qes
