// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the qes authors

#include "qes/spectral.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/special_functions/fpclassify.hpp>

namespace qes {

namespace {

real maxabs(const MatR& m) {
  real r(0);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (abs(m(i, j)) > r) r = abs(m(i, j));
  return r;
}

real maxabs(const VecC& v) {
  real r(0);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (abs(v(i)) > r) r = abs(v(i));
  return r;
}

MatC promote(const MatR& m) {
  MatC c(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) c(i, j) = cplx(m(i, j));
  return c;
}

Eigen::MatrixXd to_dmat(const MatR& m) {
  Eigen::MatrixXd d(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) d(i, j) = to_double(m(i, j));
  return d;
}

/// Power-of-two row equilibration shared by all the pencil blocks; left
/// scaling moves neither eigenvalues nor right eigenvectors.
void equilibrate_rows(std::vector<Eigen::MatrixXd*> blocks) {
  if (blocks.empty()) return;
  const Eigen::Index rows = blocks.front()->rows();
  for (Eigen::Index i = 0; i < rows; ++i) {
    double m = 0;
    for (auto* b : blocks) m = std::max(m, b->row(i).cwiseAbs().maxCoeff());
    if (m <= 0 || !std::isfinite(m)) continue;
    int e = 0;
    std::frexp(m, &e);
    const double s = std::ldexp(1.0, -e + 1);
    for (auto* b : blocks) b->row(i) *= s;
  }
}

struct Refined {
  cplx mu;
  VecC a;
  real resid{0};
  bool ok{false};
};

/// Bordered (Keller) Newton on F = [P(mu) a; w^H a - 1] in extended
/// precision; w is a random border redrawn when it is near-orthogonal to
/// the eigenvector.
Refined refine_eigenpair(const MatR& A, const MatR& B, const MatR& C,
                         bool quadratic, cplx mu, VecC a,
                         std::mt19937_64& rng, const real& tol) {
  const Eigen::Index N = A.rows();
  const MatC Ac = promote(A), Bc = promote(B);
  const MatC Cc = quadratic ? promote(C) : MatC();
  const real nA = maxabs(A), nB = maxabs(B),
             nC = quadratic ? maxabs(C) : real(0);
  const real mu_cap = real(1e10) * (1 + abs(mu));
  std::uniform_real_distribution<double> U(-1.0, 1.0);

  Refined best;
  best.mu = mu;
  best.a = a;
  best.resid = std::numeric_limits<real>::infinity();

  for (int attempt = 0; attempt < 3; ++attempt) {
    VecC w(N);
    for (Eigen::Index k = 0; k < N; ++k) w(k) = cplx(U(rng), U(rng));
    w /= cplx(sqrt(abs(w.dot(w))));
    cplx m = best.mu;
    VecC v = best.a;
    {
      const real an = maxabs(v);
      if (an == 0) break;
      v /= cplx(an);
      if (abs(w.dot(v)) < real(1e-3)) continue;  // unlucky border; redraw
      v /= w.dot(v);                             // start on the border plane
    }
    for (int it = 0; it < 60; ++it) {
      MatC P = Ac + m * Bc;
      MatC Pp = Bc;
      if (quadratic) {
        P += (m * m) * Cc;
        Pp += (2 * m) * Cc;
      }
      const VecC Pa = P * v;
      const real scale = nA + abs(m) * nB + abs(m) * abs(m) * nC;
      const real an = maxabs(v);
      const real resid = maxabs(Pa) / (scale * an + real(1e-300));
      if (resid < best.resid) {
        best.mu = m;
        best.a = v;
        best.resid = resid;
      }
      const cplx border = w.dot(v) - cplx(1);
      if (resid <= tol && abs(border) <= tol) break;
      MatC J(N + 1, N + 1);
      J.topLeftCorner(N, N) = P;
      J.block(0, N, N, 1) = Pp * v;
      J.block(N, 0, 1, N) = w.adjoint();
      J(N, N) = cplx(0);
      VecC F(N + 1);
      F.head(N) = Pa;
      F(N) = border;
      const VecC delta = J.partialPivLu().solve(-F);
      v += delta.head(N);
      m += delta(N);
      if (!boost::math::isfinite(abs(m)) || abs(m) > mu_cap) break;
      if (abs(delta(N)) <= tol * (1 + abs(m)) &&
          maxabs(VecC(delta.head(N))) <= tol * (1 + maxabs(v)))
        it = 58;  // one confirming pass, then the residual check exits
    }
    if (best.resid <= real(1e-8)) break;
  }
  best.ok = (best.resid <= real(1e-8));
  return best;
}

SpectralResult finalize(const Refined& rf, int n) {
  SpectralResult r;
  r.eigenvalue = rf.mu;
  r.pencil_residual = rf.resid;
  const real amax = maxabs(rf.a);
  int deg = 0;
  for (int k = static_cast<int>(rf.a.size()) - 1; k >= 0; --k) {
    if (abs(rf.a(k)) > real(1e-12) * amax) {
      deg = k;
      break;
    }
  }
  std::vector<cplx> c(static_cast<std::size_t>(deg) + 1);
  for (int k = 0; k <= deg; ++k) c[static_cast<std::size_t>(k)] = rf.a(k);
  const cplx lead = c.back();
  for (auto& x : c) x /= lead;
  r.coeffs = Poly{c};
  r.effective_degree = deg;
  r.degree_deficient = (deg < n);
  if (!rf.ok)
    r.classification = Classification::refinement_failed;
  else if (is_real_eigenvalue(rf.mu))
    r.classification = Classification::real_eigenvalue;
  else
    r.classification = Classification::complex_discarded;
  return r;
}

void sort_results(std::vector<SpectralResult>& out) {
  std::sort(out.begin(), out.end(),
            [](const SpectralResult& x, const SpectralResult& y) {
              if (x.eigenvalue.real() != y.eigenvalue.real())
                return x.eigenvalue.real() < y.eigenvalue.real();
              return x.eigenvalue.imag() < y.eigenvalue.imag();
            });
}

}  // namespace

bool is_real_eigenvalue(const cplx& mu) {
  return abs(mu.imag()) <= real(1e-9) * (1 + abs(mu.real()));
}

OdeSpec spec_at(const PencilProblem& pr, const real& mu) {
  switch (pr.unknown) {
    case SpectralUnknown::energy:
      return ode_spec(pr.model, mu);
    case SpectralUnknown::accessory: {
      OdeSpec s = ode_spec(pr.model);
      s.c[0] = mu;
      return s;
    }
    default: {
      ModelInstance m = pr.model;
      std::visit(
          [&](auto& q) {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, SingularParams> ||
                          std::is_same_v<T, IsotonicParams>) {
              q.omega = mu;
            } else if constexpr (std::is_same_v<T, NonPolyParams>) {
              q.lambda = mu;
            } else if constexpr (std::is_same_v<T, KinkParams>) {
              q.nu = mu;
            }
          },
          m);
      return ode_spec(m);
    }
  }
}

PencilProblem build_pencil(const ModelInstance& m) {
  validate(m);
  PencilProblem pr;
  pr.model = m;
  pr.n = level(m);
  switch (family(m)) {
    case Family::sextic: pr.unknown = SpectralUnknown::energy; break;
    case Family::singular:
    case Family::isotonic: pr.unknown = SpectralUnknown::omega; break;
    case Family::nonpoly: pr.unknown = SpectralUnknown::lambda; break;
    case Family::kink:
      pr.unknown = SpectralUnknown::nu;
      pr.quadratic = true;
      break;
  }
  const int N = pr.n + 1;
  // The matrix entries are polynomials of degree <= 2 in the unknown, so
  // three evaluations recover the blocks exactly.
  const MatR M0 = ode_matrix(spec_at(pr, real(0)), pr.n, N);
  const MatR M1 = ode_matrix(spec_at(pr, real(1)), pr.n, N);
  pr.A = M0;
  if (!pr.quadratic) {
    pr.B = M1 - M0;
    pr.C = MatR::Zero(N, N);
  } else {
    const MatR Mm = ode_matrix(spec_at(pr, real(-1)), pr.n, N);
    pr.B = (M1 - Mm) / 2;
    pr.C = (M1 + Mm) / 2 - M0;
  }
  return pr;
}

PencilProblem accessory_pencil(const KinkParams& m) {
  validate(ModelInstance(m));
  PencilProblem pr;
  pr.model = m;
  pr.unknown = SpectralUnknown::accessory;
  pr.n = m.n;
  const int N = pr.n + 1;
  OdeSpec s = ode_spec(pr.model);
  s.c[0] = real(0);
  pr.A = ode_matrix(s, pr.n, N);
  pr.B = MatR::Identity(N, N);
  pr.C = MatR::Zero(N, N);
  return pr;
}

bool identically_singular(const PencilProblem& pr, unsigned long long seed) {
  const Eigen::Index N = pr.A.rows();
  std::mt19937_64 rng(seed ^ 0xd1b54a32d192ed03ULL);
  std::uniform_real_distribution<double> U(0.25, 3.0);
  for (int t = 0; t < 3; ++t) {
    const real mu((t % 2 ? -1 : 1) * U(rng));
    MatR P = pr.A + mu * pr.B;
    if (pr.quadratic) P += (mu * mu) * pr.C;
    Eigen::FullPivLU<MatR> lu(P);
    if (lu.rank() == N) return false;
  }
  return true;
}

std::vector<SpectralResult> solve_pencil(const PencilProblem& pr,
                                         const SolveOptions& opt) {
  const int N = pr.n + 1;
  const real tol = stop_tolerance(opt.precision_digits);
  std::mt19937_64 rng(opt.seed ^ 0x517cc1b727220a95ULL);
  std::vector<SpectralResult> out;

  if (pr.quadratic && identically_singular(pr, opt.seed)) {
    // det P(mu) vanishes identically: every mu is an eigenvalue and the
    // solutions live in the kernel at the instance's own parameter (the
    // kink (2,1) sector collapsing onto (0,1) is the canonical case).
    const real nu0 = std::get<KinkParams>(pr.model).nu;
    MatR P = pr.A + nu0 * pr.B + nu0 * nu0 * pr.C;
    Eigen::FullPivLU<MatR> lu(P);
    const MatR K = lu.kernel();
    const real scale = maxabs(pr.A) + abs(nu0) * maxabs(pr.B) +
                       nu0 * nu0 * maxabs(pr.C) + real(1e-300);
    for (Eigen::Index c = 0; c < K.cols(); ++c) {
      Refined rf;
      rf.mu = cplx(nu0);
      rf.a = VecC(N);
      for (int k = 0; k < N; ++k) rf.a(k) = cplx(K(k, c));
      rf.resid = maxabs(VecC(promote(P) * rf.a)) / (scale * maxabs(rf.a));
      rf.ok = true;
      out.push_back(finalize(rf, pr.n));
    }
    sort_results(out);
    return out;
  }

  std::vector<std::pair<cplx, VecC>> starts;
  if (!pr.quadratic) {
    Eigen::MatrixXd Ad = to_dmat(pr.A), Bd = to_dmat(pr.B);
    equilibrate_rows({&Ad, &Bd});
    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges;
    ges.compute(Ad, Bd, true);
    if (ges.info() == Eigen::Success) {
      double bmax = 0;
      for (Eigen::Index i = 0; i < ges.betas().size(); ++i)
        bmax = std::max(bmax, std::abs(ges.betas()(i)));
      for (Eigen::Index i = 0; i < ges.betas().size(); ++i) {
        const double beta = ges.betas()(i);
        const std::complex<double> alpha = ges.alphas()(i);
        if (!(std::abs(beta) > 1e-14 * bmax) || !std::isfinite(std::abs(alpha)))
          continue;  // eigenvalue at infinity (singular B direction)
        const std::complex<double> lam = alpha / beta;  // A v = lam B v
        VecC a(N);
        for (int k = 0; k < N; ++k) {
          const std::complex<double> e = ges.eigenvectors()(k, i);
          a(k) = cplx(real(e.real()), real(e.imag()));
        }
        starts.emplace_back(cplx(real(-lam.real()), real(-lam.imag())), a);
      }
    }
  } else {
    // Companion linearization L1 z = mu L2 z with z = [a; mu a].
    Eigen::MatrixXd Ad = to_dmat(pr.A), Bd = to_dmat(pr.B), Cd = to_dmat(pr.C);
    Eigen::MatrixXd L1 = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    Eigen::MatrixXd L2 = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    L1.topLeftCorner(N, N) = Ad;
    L1.topRightCorner(N, N) = Bd;
    L1.bottomRightCorner(N, N).setIdentity();
    L2.topRightCorner(N, N) = -Cd;
    L2.bottomLeftCorner(N, N).setIdentity();
    equilibrate_rows({&L1, &L2});
    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges;
    ges.compute(L1, L2, true);
    if (ges.info() == Eigen::Success) {
      double bmax = 0;
      for (Eigen::Index i = 0; i < ges.betas().size(); ++i)
        bmax = std::max(bmax, std::abs(ges.betas()(i)));
      for (Eigen::Index i = 0; i < ges.betas().size(); ++i) {
        const double beta = ges.betas()(i);
        const std::complex<double> alpha = ges.alphas()(i);
        if (!(std::abs(beta) > 1e-14 * bmax) || !std::isfinite(std::abs(alpha)))
          continue;
        const std::complex<double> lam = alpha / beta;
        double head = 0, whole = 0;
        for (int k = 0; k < 2 * N; ++k) {
          const double m = std::abs(ges.eigenvectors()(k, i));
          whole = std::max(whole, m);
          if (k < N) head = std::max(head, m);
        }
        if (!(head > 1e-10 * whole)) continue;  // infinite-direction artifact
        VecC a(N);
        for (int k = 0; k < N; ++k) {
          const std::complex<double> e = ges.eigenvectors()(k, i);
          a(k) = cplx(real(e.real()), real(e.imag()));
        }
        starts.emplace_back(cplx(real(lam.real()), real(lam.imag())), a);
      }
    }
  }

  for (auto& [mu0, a0] : starts) {
    const Refined rf = refine_eigenpair(pr.A, pr.B, pr.C, pr.quadratic, mu0,
                                        a0, rng, tol);
    out.push_back(finalize(rf, pr.n));
  }

  const bool shortfall =
      static_cast<int>(out.size()) < N ||
      std::any_of(out.begin(), out.end(), [](const SpectralResult& r) {
        return r.classification == Classification::refinement_failed;
      });
  if (!pr.quadratic && shortfall) {
    // Dense fallback: eigenvalues of -B^{-1} A in extended precision.
    Eigen::FullPivLU<MatR> lub(pr.B);
    if (lub.isInvertible()) {
      const MatR G = -lub.solve(pr.A);
      Eigen::EigenSolver<MatR> es(G);
      if (es.info() == Eigen::Success) {
        std::vector<SpectralResult> alt;
        for (int i = 0; i < N; ++i) {
          const auto lam = es.eigenvalues()(i);  // std::complex<real>
          VecC a(N);
          for (int k = 0; k < N; ++k) {
            const auto e = es.eigenvectors()(k, i);
            a(k) = cplx(e.real(), e.imag());
          }
          const Refined rf = refine_eigenpair(
              pr.A, pr.B, pr.C, false, cplx(lam.real(), lam.imag()), a, rng,
              tol);
          alt.push_back(finalize(rf, pr.n));
        }
        const auto failures = [](const std::vector<SpectralResult>& v) {
          return std::count_if(v.begin(), v.end(), [](const SpectralResult& r) {
            return r.classification == Classification::refinement_failed;
          });
        };
        if (alt.size() > out.size() ||
            (alt.size() == out.size() && failures(alt) < failures(out)))
          out = std::move(alt);
      }
    }
  }

  sort_results(out);
  return out;
}

RootSet roots_from_coeffs(SpectralResult& r, const PencilProblem& pr,
                          const SolveOptions& opt) {
  if (r.coeffs.degree() >= 1)
    r.roots = find_roots(r.coeffs, opt.precision_digits);
  else
    r.roots = RootSet{};
  r.bae_checked = false;
  r.bae_mismatch = false;
  r.bae_residual = real(0);
  if (r.classification == Classification::real_eigenvalue) {
    const OdeSpec s = spec_at(pr, r.eigenvalue.real());
    try {
      real mx(0);
      for (const auto& e : bae_residual(s, r.roots))
        if (abs(e) > mx) mx = abs(e);
      r.bae_residual = mx;
    } catch (const bae_singularity&) {
      r.bae_residual = std::numeric_limits<real>::infinity();
    }
    r.bae_checked = true;
    r.bae_mismatch = !(r.bae_residual <= real(1e-6));
  }
  return r.roots;
}

}  // namespace qes
