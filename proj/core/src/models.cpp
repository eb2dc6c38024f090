// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the qes authors

#include "qes/models.h"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/fpclassify.hpp>

#include "json.hpp"

namespace qes {

namespace {

const real kNaN = std::numeric_limits<real>::quiet_NaN();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::sextic: return "sextic";
    case Family::singular: return "singular";
    case Family::isotonic: return "isotonic";
    case Family::nonpoly: return "nonpoly";
    case Family::kink: return "kink";
  }
  throw validation_error("unknown family tag");
}

Family family_from_name(const std::string& name) {
  if (name == "sextic") return Family::sextic;
  if (name == "singular") return Family::singular;
  if (name == "isotonic") return Family::isotonic;
  if (name == "nonpoly") return Family::nonpoly;
  if (name == "kink") return Family::kink;
  throw validation_error("unknown model family '" + name + "'");
}

real SingularParams::prefactor_exponent() const {
  return real(1.5) + e / sqrt(2 * d);
}

Family family(const ModelInstance& m) {
  return std::visit(
      overloaded{[](const SexticParams&) { return Family::sextic; },
                 [](const SingularParams&) { return Family::singular; },
                 [](const IsotonicParams&) { return Family::isotonic; },
                 [](const NonPolyParams&) { return Family::nonpoly; },
                 [](const KinkParams&) { return Family::kink; }},
      m);
}

int level(const ModelInstance& m) {
  return std::visit([](const auto& x) { return x.n; }, m);
}

int parity(const ModelInstance& m) {
  return std::visit(
      [](const auto& x) {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, SingularParams>)
          return 0;
        else
          return x.p;
      },
      m);
}

void validate(const ModelInstance& m) {
  if (level(m) < 0) throw validation_error("the level n must be nonnegative");
  const int p = parity(m);
  if (p != 0 && p != 1) throw validation_error("the parity p must be 0 or 1");
  std::visit(overloaded{[](const SexticParams& q) {
                          if (!(q.gamma > 0))
                            throw validation_error("sextic requires gamma > 0");
                        },
                        [](const SingularParams& q) {
                          if (!(q.d > 0))
                            throw validation_error("singular requires d > 0");
                        },
                        [](const IsotonicParams& q) {
                          if (q.a == 0)
                            throw validation_error("isotonic requires a != 0");
                        },
                        [](const NonPolyParams& q) {
                          if (q.delta == 0)
                            throw validation_error("nonpoly requires delta != 0");
                        },
                        [](const KinkParams& q) {
                          if (!(q.mu > 0))
                            throw validation_error("kink requires mu > 0");
                        }},
             m);
}

OdeSpec ode_spec(const ModelInstance& m, std::optional<real> energy_in) {
  validate(m);
  OdeSpec s{};
  if (const auto* q = std::get_if<SexticParams>(&m)) {
    const real rg = sqrt(q->gamma);
    const real E = energy_in.value_or(real(0));
    s.a = {real(0), real(4), real(0), real(0), real(0)};
    s.b = {real(2 * (2 * q->p + 1)), -2 * q->beta / rg, -4 * rg, real(0)};
    s.c = {E - (2 * q->p + 1) * q->beta / (2 * rg),
           -(q->alpha - q->beta * q->beta / (4 * q->gamma) +
             (3 + 2 * q->p) * rg),
           real(0)};
  } else if (const auto* q = std::get_if<SingularParams>(&m)) {
    const real sd = sqrt(2 * q->d);
    const real g = q->e / sd;
    const real E = energy_in.value_or(energy(m));
    s.a = {real(0), real(0), real(1), real(0), real(0)};
    s.b = {sd, 2 + g, -q->omega, real(0)};
    s.c = {((1 + g) * (1 + g) - real(0.25)) / 4 - q->omega * sd / 2,
           (E - 2 * (2 + g) * q->omega) / 4, real(0)};
  } else if (const auto* q = std::get_if<IsotonicParams>(&m)) {
    const real a2 = q->a * q->a;
    const real E = energy_in.value_or(energy(m));
    s.a = {real(0), -4 * a2, real(4), real(0), real(0)};
    s.b = {-8 * q->beta * a2,
           2 * (1 + 2 * q->p + 4 * q->beta + 2 * q->omega * a2),
           -4 * q->omega, real(0)};
    s.c = {2 * q->beta * (q->beta + 2 * q->p + 2 * q->omega * a2),
           E - q->omega * (1 + 2 * q->p + 4 * q->beta), real(0)};
  } else if (const auto* q = std::get_if<NonPolyParams>(&m)) {
    const real wd = q->omega / q->delta;
    const real E = energy_in.value_or(energy(m));
    s.a = {real(0), real(-1), real(1), real(0), real(0)};
    s.b = {real(-2), real(2.5) + q->p + wd, -wd, real(0)};
    s.c = {((2 * q->p + 1) * q->delta + 2 * q->omega + q->lambda / q->delta) /
               (2 * q->delta),
           (E - 2 * q->lambda / q->delta - (5 + 2 * q->p) * q->omega) /
               (4 * q->delta),
           real(0)};
  } else {
    const auto& k = std::get<KinkParams>(m);
    const real E = energy_in.value_or(energy(m));
    s.a = {real(0), k.nu * (k.nu + 1), -(1 + 2 * k.nu), real(1), real(0)};
    s.b = {-3 * k.nu * (k.nu + 1), real(2.5) - k.nu * (k.p - 5) - k.p,
           real(k.p - 2), real(0)};
    s.c = {real(1.5) * (1 + k.nu) * (k.p - 1),
           E / (k.mu * k.mu) - real(1.25) * (k.p - 1), real(0)};
  }
  return s;
}

real energy(const ModelInstance& m, std::optional<cplx> sum_z) {
  validate(m);
  return std::visit(
      overloaded{
          [&](const SexticParams& q) {
            if (!sum_z)
              throw validation_error(
                  "the sextic energy needs the Bethe-root sum; pass sum_z");
            const real rg = sqrt(q.gamma);
            return (4 * q.n + 2 * q.p + 1) * q.beta / (2 * rg) +
                   4 * rg * sum_z->real();
          },
          [](const SingularParams& q) {
            const real g = q.e / sqrt(2 * q.d);
            return 2 * (2 + 2 * q.n + g) * q.omega;
          },
          [](const IsotonicParams& q) {
            return q.omega * (1 + 4 * q.n + 2 * q.p + 4 * q.beta);
          },
          [](const NonPolyParams& q) {
            return 2 * q.lambda / q.delta + (5 + 4 * q.n + 2 * q.p) * q.omega;
          },
          [](const KinkParams& q) {
            return -(q.mu * q.mu / 4) * (2 * q.n + q.p - 1) *
                   (2 * q.n + q.p - 5);
          }},
      m);
}

real constraint_residual(const ModelInstance& m, const RootSet& roots) {
  validate(m);
  const int n = level(m);
  if (static_cast<int>(roots.size()) != n)
    throw validation_error("constraint_residual expects exactly n roots");
  cplx s1c(0);
  for (const auto& z : roots.roots) s1c += z;
  const real s1 = s1c.real();
  return std::visit(
      overloaded{
          [&](const SexticParams& q) {
            const real rg = sqrt(q.gamma);
            return q.alpha - q.beta * q.beta / (4 * q.gamma) +
                   (3 + 4 * q.n + 2 * q.p) * rg;
          },
          [&](const SingularParams& q) {
            const real sd = sqrt(2 * q.d);
            const real g = q.e / sd;
            return (1 + g) * (1 + g) - real(0.25) - 2 * q.omega * sd -
                   (4 * q.omega * s1 - 4 * q.n * (q.n + 1 + g));
          },
          [&](const IsotonicParams& q) {
            const real a2 = q.a * q.a;
            return q.beta * (q.beta + 2 * q.p + 2 * q.omega * a2) -
                   (2 * q.omega * s1 - 2 * q.n * (q.n - 1) -
                    q.n * (1 + 2 * q.p + 4 * q.beta + 2 * q.omega * a2));
          },
          [&](const NonPolyParams& q) {
            const real wd = q.omega / q.delta;
            return ((2 * q.p + 1) * q.delta + 2 * q.omega +
                    q.lambda / q.delta) /
                       (2 * q.delta) -
                   (wd * s1 - q.n * (q.n + q.p + real(1.5) + wd));
          },
          [&](const KinkParams& q) {
            return (2 * q.n + q.p - 4) * s1 -
                   q.n * (q.n - real(3.5)) * (2 * q.nu + 1) -
                   (q.p * (q.n - real(1.5)) + real(1.5)) * (q.nu + 1);
          }},
      m);
}

Wavefunction assemble_wavefunction(const ModelInstance& m,
                                   const RootSet& roots,
                                   std::optional<real> energy_in) {
  validate(m);
  if (static_cast<int>(roots.size()) != level(m))
    throw validation_error("assemble_wavefunction expects exactly n roots");
  Wavefunction w;
  w.model = m;
  w.p = parity(m);
  w.poly = from_roots(roots);
  if (energy_in) {
    w.E = *energy_in;
  } else {
    cplx s1(0);
    for (const auto& z : roots.roots) s1 += z;
    w.E = energy(m, s1);
  }
  return w;
}

namespace {

/// Everything a sample point needs: the mapped variable with its first two
/// x-derivatives, the log-derivative of the non-polynomial factor (gauge
/// times x^p or cosh^p) with its x-derivative, and the factor's magnitude.
struct PointFrame {
  real mapped{0}, dmap{0}, d2map{0};
  real lg{0}, dlg{0};
  real amplitude{0};  // |gauge * prefactor| at x
  bool ok{false};
};

PointFrame frame_at(const ModelInstance& m, int p, const real& x) {
  PointFrame f;
  if (const auto* q = std::get_if<SexticParams>(&m)) {
    const real rg = sqrt(q->gamma);
    const real x2 = x * x;
    f.mapped = x2;
    f.dmap = 2 * x;
    f.d2map = 2;
    f.lg = p / x - q->beta * x / (2 * rg) - rg * x2 * x;
    f.dlg = -p / x2 - q->beta / (2 * rg) - 3 * rg * x2;
    f.amplitude = (p ? abs(x) : real(1)) *
                  exp(-q->beta * x2 / (4 * rg) - rg * x2 * x2 / 4);
    f.ok = (x != 0);
  } else if (const auto* q = std::get_if<SingularParams>(&m)) {
    if (!(x > 0)) return f;  // half-line model
    const real sd = sqrt(2 * q->d);
    const real ex = q->prefactor_exponent();
    const real x2 = x * x;
    f.mapped = x2;
    f.dmap = 2 * x;
    f.d2map = 2;
    f.lg = ex / x - q->omega * x + sd / (x2 * x);
    f.dlg = -ex / x2 - q->omega - 3 * sd / (x2 * x2);
    f.amplitude = pow(x, ex) * exp(-q->omega * x2 / 2 - sd / (2 * x2));
    f.ok = true;
  } else if (const auto* q = std::get_if<IsotonicParams>(&m)) {
    const real x2 = x * x;
    const real a2 = q->a * q->a;
    const real u = x2 + a2;
    f.mapped = u;
    f.dmap = 2 * x;
    f.d2map = 2;
    f.lg = p / x + 2 * q->beta * x / u - q->omega * x;
    f.dlg = -p / x2 + 2 * q->beta * (a2 - x2) / (u * u) - q->omega;
    f.amplitude =
        (p ? abs(x) : real(1)) * pow(u, q->beta) * exp(-q->omega * x2 / 2);
    f.ok = (x != 0);
  } else if (const auto* q = std::get_if<NonPolyParams>(&m)) {
    const real x2 = x * x;
    const real u = 1 + q->delta * x2;
    if (u == 0) return f;
    f.mapped = u;
    f.dmap = 2 * q->delta * x;
    f.d2map = 2 * q->delta;
    f.lg = p / x + 2 * q->delta * x / u - q->omega * x;
    f.dlg = -p / x2 + 2 * q->delta * (1 - q->delta * x2) / (u * u) - q->omega;
    f.amplitude = (p ? abs(x) : real(1)) * abs(u) * exp(-q->omega * x2 / 2);
    f.ok = (x != 0);
  } else {
    const auto& k = std::get<KinkParams>(m);
    const real h = k.mu * x / 2;
    const real sh = sinh(h), ch = cosh(h);
    const real xi = ch * ch + k.nu;
    if (!(xi > 0)) return f;  // the gauge power xi^(-3/2) needs xi > 0
    const real dxi = (k.mu / 2) * sinh(k.mu * x);
    const real d2xi = (k.mu * k.mu / 2) * cosh(k.mu * x);
    f.mapped = xi;
    f.dmap = dxi;
    f.d2map = d2xi;
    f.lg = real(-1.5) * dxi / xi + p * (k.mu / 2) * sh / ch;
    f.dlg = real(-1.5) * (d2xi * xi - dxi * dxi) / (xi * xi) +
            p * (k.mu * k.mu / 4) / (ch * ch);
    f.amplitude = pow(xi, real(-1.5)) * (p ? ch : real(1));
    f.ok = true;
  }
  return f;
}

}  // namespace

cplx wavefunction_value(const Wavefunction& w, const real& x) {
  const PointFrame f = frame_at(w.model, w.p, x);
  if (!f.ok && f.amplitude == 0) {
    // Prefactor zeros at x = 0 are genuine wavefunction zeros for p = 1;
    // out-of-domain points surface as NaN.
    if (x == 0 && w.p == 1 && !std::holds_alternative<SingularParams>(w.model) &&
        !std::holds_alternative<KinkParams>(w.model))
      return cplx(0);
    if (std::holds_alternative<SingularParams>(w.model) ||
        std::holds_alternative<KinkParams>(w.model))
      return cplx(kNaN);
  }
  // Signed value: rebuild the sign lost in `amplitude` (only x^p flips sign).
  real sign(1);
  if (w.p == 1 && x < 0 && !std::holds_alternative<KinkParams>(w.model))
    sign = -1;
  if (const auto* q = std::get_if<NonPolyParams>(&w.model)) {
    if (1 + q->delta * x * x < 0) sign = -sign;
  }
  return sign * f.amplitude * evaluate(w.poly, cplx(f.mapped));
}

real potential(const ModelInstance& m, const real& x) {
  return std::visit(
      overloaded{
          [&](const SexticParams& q) {
            const real x2 = x * x;
            return q.alpha * x2 + q.beta * x2 * x2 + q.gamma * x2 * x2 * x2;
          },
          [&](const SingularParams& q) {
            const real x2 = x * x;
            return q.omega * q.omega * x2 + 2 * q.e / (x2 * x2) +
                   2 * q.d / (x2 * x2 * x2);
          },
          [&](const IsotonicParams& q) {
            const real x2 = x * x;
            const real a2 = q.a * q.a;
            const real u = x2 + a2;
            return q.omega * q.omega * x2 +
                   2 * q.beta * (q.beta - 1) * (x2 - a2) / (u * u);
          },
          [&](const NonPolyParams& q) {
            const real x2 = x * x;
            return q.omega * q.omega * x2 +
                   2 * q.lambda * x2 / (1 + q.delta * x2);
          },
          [&](const KinkParams& q) {
            const real sh = sinh(q.mu * x / 2);
            const real s2 = sh * sh;
            const real xi = 1 + q.nu + s2;
            return q.mu * q.mu *
                   (8 * s2 * s2 - (20 * q.nu - 4) * s2 +
                    2 * (q.nu + 1) * (q.nu - 2)) /
                   (8 * xi * xi);
          }},
      m);
}

std::vector<real> default_samples(const ModelInstance& m) {
  const int want = 16;
  real lo(-2), hi(2);
  switch (family(m)) {
    case Family::singular:
      lo = real(0.2);
      hi = real(3);
      break;
    case Family::kink:
      lo = real(-3);
      hi = real(3);
      break;
    default:
      break;
  }
  if (family(m) != Family::kink) {
    std::vector<real> xs;
    for (int j = 0; j < want; ++j)
      xs.push_back(lo + (2 * j + 1) * (hi - lo) / (2 * want));
    return xs;
  }
  // Kink: drop points too close to zeros of xi(x) = cosh^2(mu x/2) + nu,
  // densifying the grid until sixteen clean points remain.
  const auto& q = std::get<KinkParams>(m);
  const real guard = real(0.05) * (1 + abs(q.nu));
  for (int count = want; count <= 64; count *= 2) {
    std::vector<real> xs;
    for (int j = 0; j < count && static_cast<int>(xs.size()) < want; ++j) {
      const real x = lo + (2 * j + 1) * (hi - lo) / (2 * count);
      const real ch = cosh(q.mu * x / 2);
      if (abs(ch * ch + q.nu) > guard) xs.push_back(x);
    }
    if (static_cast<int>(xs.size()) == want) return xs;
    if (count == 64) return xs;
  }
  return {};
}

real schrodinger_residual(const Wavefunction& w,
                          const std::vector<real>& samples_in) {
  validate(w.model);
  const std::vector<real> samples =
      samples_in.empty() ? default_samples(w.model) : samples_in;
  if (samples.empty())
    throw numerical_error("no usable sample points for the residual");
  const Poly d1 = differentiate(w.poly);
  const Poly d2 = differentiate(w.poly, 2);

  std::vector<real> amp(samples.size(), real(0));
  real amax(0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const real a = abs(wavefunction_value(w, samples[i]));
    amp[i] = boost::math::isnan(a) ? real(0) : a;
    if (amp[i] > amax) amax = amp[i];
  }
  if (amax == 0)
    throw numerical_error(
        "the wavefunction vanishes at every sample point; residual undefined");
  const real cut = real(1e-8) * amax;

  real worst(0);
  bool any = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(amp[i] > cut)) continue;  // node or deep tail; psi''/psi unreliable
    const real& x = samples[i];
    const PointFrame f = frame_at(w.model, w.p, x);
    if (!f.ok) continue;
    const cplx zm(f.mapped);
    const cplx Q = evaluate(w.poly, zm);
    if (Q == cplx(0)) continue;
    const cplx Q1 = evaluate(d1, zm);
    const cplx Q2 = evaluate(d2, zm);
    const cplx LQ = Q1 * f.dmap / Q;
    const cplx dLQ = (Q2 * f.dmap * f.dmap + Q1 * f.d2map) / Q - LQ * LQ;
    const cplx L = cplx(f.lg) + LQ;
    const cplx dL = cplx(f.dlg) + dLQ;
    const cplx ratio = L * L + dL;  // psi''/psi
    const real rhs = potential(w.model, x) - w.E;
    const real r = abs(ratio - cplx(rhs)) / (1 + abs(w.E));
    if (r > worst) worst = r;
    any = true;
  }
  if (!any)
    throw numerical_error("every sample point was rejected by the amplitude guard");
  return worst;
}

namespace {

ClosedFormSolution make_branch(std::string branch, std::string name,
                               const real& value, ModelInstance solved,
                               std::vector<cplx> roots, const real& E) {
  ClosedFormSolution s;
  s.branch = std::move(branch);
  s.solved_name = std::move(name);
  s.solved_value = value;
  s.instance = solved;
  s.roots.roots = std::move(roots);
  s.roots.refinement_residuals.assign(s.roots.roots.size(), real(0));
  s.E = E;
  s.wavefunction = assemble_wavefunction(solved, s.roots, E);
  return s;
}

[[noreturn]] void unsupported_level() {
  throw validation_error(
      "closed forms cover n <= 1 for every family and n = 2 for the kink; "
      "use solve_baes or the spectral solver for higher levels");
}

}  // namespace

std::vector<ClosedFormSolution> closed_form_level(const ModelInstance& m) {
  validate(m);
  std::vector<ClosedFormSolution> out;
  if (const auto* q = std::get_if<SexticParams>(&m)) {
    const real rg = sqrt(q->gamma);
    if (q->n == 0) {
      SexticParams sv = *q;
      sv.alpha = q->beta * q->beta / (4 * q->gamma) - (3 + 2 * q->p) * rg;
      out.push_back(make_branch("0", "alpha", sv.alpha, sv, {},
                                (2 * q->p + 1) * q->beta / (2 * rg)));
    } else if (q->n == 1) {
      const real disc =
          sqrt(q->beta * q->beta + 8 * (2 * q->p + 1) * q->gamma * rg);
      SexticParams sv = *q;
      sv.alpha = q->beta * q->beta / (4 * q->gamma) - (7 + 2 * q->p) * rg;
      for (int sgn : {+1, -1}) {
        const real z = (-q->beta + sgn * disc) / (4 * q->gamma);
        const real E = ((2 * q->p + 3) * q->beta + sgn * 2 * disc) / (2 * rg);
        out.push_back(make_branch(sgn > 0 ? "+" : "-", "alpha", sv.alpha, sv,
                                  {cplx(z)}, E));
      }
    } else {
      unsupported_level();
    }
  } else if (const auto* q = std::get_if<SingularParams>(&m)) {
    const real sd = sqrt(2 * q->d);
    const real g = q->e / sd;
    if (q->n == 0) {
      SingularParams sv = *q;
      sv.omega = ((1 + g) * (1 + g) - real(0.25)) / (2 * sd);
      out.push_back(
          make_branch("0", "omega", sv.omega, sv, {}, 2 * (2 + g) * sv.omega));
    } else if (q->n == 1) {
      const real disc = sqrt(35 * q->d + 12 * q->e * sd + 3 * q->e * q->e);
      for (int sgn : {+1, -1}) {
        SingularParams sv = *q;
        sv.omega = (16 * q->e + 35 * sd + 4 * q->e * q->e / sd +
                    sgn * 8 * disc) /
                   (16 * q->d);
        if (sv.omega == 0) throw numerical_error("degenerate omega branch");
        // The root takes the opposite surd sign from omega.
        const real z =
            (2 + g - sgn * sqrt((2 + g) * (2 + g) + 4 * sv.omega * sd)) /
            (2 * sv.omega);
        out.push_back(make_branch(sgn > 0 ? "+" : "-", "omega", sv.omega, sv,
                                  {cplx(z)}, 2 * (4 + g) * sv.omega));
      }
    } else {
      unsupported_level();
    }
  } else if (const auto* q = std::get_if<IsotonicParams>(&m)) {
    const real a2 = q->a * q->a;
    if (q->n == 0) {
      IsotonicParams sv = *q;
      sv.beta = -2 * q->p - 2 * q->omega * a2;
      out.push_back(make_branch("0", "beta", sv.beta, sv, {},
                                q->omega * (1 + 2 * q->p + 4 * sv.beta)));
    } else if (q->n == 1) {
      if (abs(1 + q->beta) < real(1e-30))
        throw validation_error(
            "the n = 1 closed form degenerates at beta = -1; use the numeric "
            "paths");
      const real rad =
          25 * q->beta * q->beta + (32 * q->p + 46) * q->beta + 25 + 32 * q->p;
      if (rad < 0)
        throw validation_error(
            "no real closed-form branch at these parameters; use the numeric "
            "paths");
      const real disc = sqrt(rad);
      for (int sgn : {+1, -1}) {
        const real w = -(2 * q->beta * q->beta +
                         (5 + 4 * q->p) * (q->beta + 1) + sgn * disc) /
                       (4 * (1 + q->beta));  // w = omega a^2
        IsotonicParams sv = *q;
        sv.omega = w / a2;
        if (sv.omega == 0) throw numerical_error("degenerate omega branch");
        const real base = 2 * q->p + 1 + 4 * q->beta;
        const real rad2 =
            base * base + 4 * (2 * q->p + 1 - 4 * q->beta + w) * w;
        if (rad2 < 0)
          throw validation_error(
              "no real closed-form root at these parameters; use the numeric "
              "paths");
        // The root takes the opposite surd sign from the omega a^2 branch.
        const real xi = (base + 2 * w - sgn * sqrt(rad2)) / (4 * sv.omega);
        out.push_back(make_branch(sgn > 0 ? "+" : "-", "omega", sv.omega, sv,
                                  {cplx(xi)},
                                  sv.omega * (2 * q->p + 5 + 4 * q->beta)));
      }
    } else {
      unsupported_level();
    }
  } else if (const auto* q = std::get_if<NonPolyParams>(&m)) {
    if (q->n == 0) {
      NonPolyParams sv = *q;
      sv.lambda = -q->delta * ((2 * q->p + 1) * q->delta + 2 * q->omega);
      out.push_back(make_branch("0", "lambda", sv.lambda, sv, {},
                                2 * sv.lambda / q->delta +
                                    (2 * q->p + 5) * q->omega));
    } else if (q->n == 1) {
      if (q->omega == 0)
        throw validation_error("the n = 1 closed form needs omega != 0");
      const real disc =
          sqrt(4 * q->omega * q->omega +
               4 * q->omega * (2 * q->p - 3) * q->delta +
               (4 * q->p * q->p + 20 * q->p + 25) * q->delta * q->delta);
      // Branches keyed by the root surd; lambda takes the opposite sign.
      for (int sgn : {+1, -1}) {
        const real xi =
            (2 * q->omega + (2 * q->p + 5) * q->delta + sgn * disc) /
            (4 * q->omega);
        NonPolyParams sv = *q;
        sv.lambda = -(q->delta / 2) *
                    ((6 * q->p + 7) * q->delta + 6 * q->omega - sgn * disc);
        out.push_back(make_branch(sgn > 0 ? "+" : "-", "lambda", sv.lambda, sv,
                                  {cplx(xi)},
                                  2 * sv.lambda / q->delta +
                                      (2 * q->p + 9) * q->omega));
      }
    } else {
      unsupported_level();
    }
  } else {
    const auto& k = std::get<KinkParams>(m);
    const real mu2 = k.mu * k.mu;
    if (k.n == 0) {
      if (k.p == 0) {
        KinkParams sv = k;
        sv.nu = -1;
        out.push_back(make_branch("0", "nu", sv.nu, sv, {}, -5 * mu2 / 4));
      } else {
        // nu stays free in the odd n = 0 sector; nothing is solved for.
        out.push_back(make_branch("0", "", k.nu, k, {}, real(0)));
      }
    } else if (k.n == 1) {
      const real E = -(mu2 / 4) * (k.p + 1) * (k.p - 3);
      {
        KinkParams sv = k;
        sv.nu = -1;
        out.push_back(make_branch("family-1", "nu", sv.nu, sv,
                                  {cplx(real(5) / (2 * (k.p - 2)))}, E));
      }
      {
        KinkParams sv = k;
        sv.nu = 2 * (1 - k.p);
        out.push_back(make_branch("family-2", "nu", sv.nu, sv,
                                  {cplx(real(8 - 5 * k.p) / 2)}, E));
      }
    } else if (k.n == 2 && k.p == 0) {
      KinkParams sv = k;
      sv.nu = real(-1) / 3;
      const real r2 = sqrt(real(2));
      out.push_back(make_branch("0", "nu", sv.nu, sv,
                                {cplx((8 - 12 * r2) / 21),
                                 cplx((8 + 12 * r2) / 21)},
                                3 * mu2 / 4));
    } else if (k.n == 2 && k.p == 1) {
      // The (2,1) sector collapses onto the (0,1) solution: same energy,
      // same wavefunction, nu unconstrained.
      KinkParams sv = k;
      sv.n = 0;
      out.push_back(make_branch("degenerate", "", k.nu, sv, {}, real(0)));
    } else {
      unsupported_level();
    }
  }
  return out;
}

real odd_sector_obstruction(const SingularParams& m, int p) {
  validate(ModelInstance(m));
  if (p != 0 && p != 1) throw validation_error("the parity p must be 0 or 1");
  return 2 * p * sqrt(2 * m.d);
}

real HeunForm::fuchs_residual() const {
  return abs(alpha + beta + cplx(1) - cplx(gamma + delta + sigma));
}

HeunForm heun_form(const ModelInstance& m, std::optional<real> energy_in) {
  validate(m);
  const OdeSpec s = ode_spec(m, energy_in);
  HeunForm h{};
  h.alpha = cplx(kNaN);
  h.beta = cplx(kNaN);
  h.gamma = h.delta = h.sigma = h.q = kNaN;
  if (std::holds_alternative<SexticParams>(m)) {
    throw validation_error(
        "the sextic family's mapped equation is not of confluent, "
        "doubly-confluent or general Heun kind");
  } else if (const auto* q = std::get_if<SingularParams>(&m)) {
    const real sd = sqrt(2 * q->d);
    h.kind = HeunKind::doubly_confluent;
    h.singular_points = {real(0)};
    h.gamma = 2 + q->e / sd;  // 1/z pole of the derivative term
    h.delta = -sd;            // 1/z^2 pole of the derivative term
    h.sigma = -q->omega;
    h.alpha = cplx(s.c[1]);
    h.q = -s.c[0];
  } else if (const auto* q = std::get_if<IsotonicParams>(&m)) {
    h.kind = HeunKind::confluent;
    h.singular_points = {real(0), q->a * q->a};
    h.gamma = 2 * q->beta;
    h.delta = q->p + real(0.5);
    h.sigma = -q->omega;
    h.alpha = cplx(s.c[1] / 4);  // the stored arrays carry X = 4 xi (xi - a^2)
    h.q = -s.c[0] / 4;
  } else if (const auto* q = std::get_if<NonPolyParams>(&m)) {
    h.kind = HeunKind::confluent;
    h.singular_points = {real(0), real(1)};
    h.gamma = 2;
    h.delta = q->p + real(0.5);
    h.sigma = -q->omega / q->delta;
    h.alpha = cplx(s.c[1]);
    h.q = -s.c[0];
  } else {
    const auto& k = std::get<KinkParams>(m);
    h.kind = HeunKind::general;
    h.singular_points = {real(0), k.nu, k.nu + 1};
    h.gamma = -3;
    h.delta = k.p + real(0.5);
    h.sigma = real(0.5);
    h.q = -s.c[0];
    // alpha, beta are the roots of t^2 - (p-3) t + c1 = 0, so alpha*beta
    // reproduces c1 and alpha+beta = p-3 keeps the Fuchs relation at any
    // energy; alpha carries the smaller real part (-n on the solvable
    // sector).
    const cplx half((k.p - 3) / real(2));
    const cplx sq = sqrt(half * half - cplx(s.c[1]));
    h.alpha = half - sq;
    h.beta = half + sq;
  }
  return h;
}

AlgebraizedForm algebraized_form(const ModelInstance& m,
                                 std::optional<real> energy_in) {
  validate(m);
  const int n = level(m);
  const int p = parity(m);
  AlgebraizedForm f;
  f.n = n;
  using W = std::vector<Gen>;
  if (const auto* q = std::get_if<SexticParams>(&m)) {
    const real rg = sqrt(q->gamma);
    f.terms = {{real(4), W{Gen::J0, Gen::Jm}},
               {4 * rg, W{Gen::Jp}},
               {-2 * q->beta / rg, W{Gen::J0}},
               {real(2 * (n + 2 * p + 1)), W{Gen::Jm}}};
    f.constant = -q->beta * (1 + 2 * n + 2 * p) / (2 * rg);
    f.epsilon = -energy_in.value_or(real(0));
  } else if (const auto* q = std::get_if<SingularParams>(&m)) {
    const real sd = sqrt(2 * q->d);
    const real g = q->e / sd;
    f.terms = {{real(1), W{Gen::J0, Gen::J0}},
               {q->omega, W{Gen::Jp}},
               {n + 1 + g, W{Gen::J0}},
               {sd, W{Gen::Jm}}};
    f.constant = n * (real(0.5) + real(n) / 4 + g / 2);
    f.epsilon = -(((1 + g) * (1 + g) - real(0.25)) / 4 - q->omega * sd / 2);
  } else if (const auto* q = std::get_if<IsotonicParams>(&m)) {
    const real a2 = q->a * q->a;
    f.terms = {{real(4), W{Gen::J0, Gen::J0}},
               {-4 * a2, W{Gen::J0, Gen::Jm}},
               {4 * q->omega, W{Gen::Jp}},
               {4 * n + 4 * p + 8 * q->beta + 4 * a2 * q->omega - 2,
                W{Gen::J0}},
               {-2 * a2 * (n + 4 * q->beta), W{Gen::Jm}}};
    f.constant = n * (n + 2 * p + 4 * q->beta + 2 * a2 * q->omega - 1);
    f.epsilon = -2 * q->beta * (q->beta + 2 * p + 2 * q->omega * a2);
  } else if (const auto* q = std::get_if<NonPolyParams>(&m)) {
    const real wd = q->omega / q->delta;
    f.terms = {{real(1), W{Gen::J0, Gen::J0}},
               {real(-1), W{Gen::J0, Gen::Jm}},
               {wd, W{Gen::Jp}},
               {real(1.5) + n + p + wd, W{Gen::J0}},
               {-(real(n) / 2 + 2), W{Gen::Jm}}};
    f.constant = (real(n) / (4 * q->delta)) *
                 (2 * q->omega + (3 + n + 2 * p) * q->delta);
    f.epsilon = -((2 * p + 1) * q->delta + 2 * q->omega +
                  q->lambda / q->delta) /
                (2 * q->delta);
  } else {
    const auto& k = std::get<KinkParams>(m);
    f.terms = {{real(-1), W{Gen::Jp, Gen::J0}},
               {-(1 + 2 * k.nu), W{Gen::J0, Gen::J0}},
               {k.nu * (k.nu + 1), W{Gen::J0, Gen::Jm}},
               {-(real(3 * n) / 2 + p - 3), W{Gen::Jp}},
               {k.nu * (1 + k.nu) * (n - 6) / 2, W{Gen::Jm}},
               {((7 - 2 * n - p) * (1 + 2 * k.nu) - p) / real(2),
                W{Gen::J0}}};
    f.constant = -real(n) * ((1 + 2 * k.nu) * (p + n - 7) + p) / 4;
    f.epsilon = real(1.5) * (1 + k.nu) * (1 - p);
  }
  return f;
}

std::string to_json_string(const ModelInstance& m) {
  validate(m);
  nlohmann::json j;
  j["family"] = family_name(family(m));
  std::visit(overloaded{[&](const SexticParams& q) {
                          j["alpha"] = to_double(q.alpha);
                          j["beta"] = to_double(q.beta);
                          j["gamma"] = to_double(q.gamma);
                        },
                        [&](const SingularParams& q) {
                          j["omega"] = to_double(q.omega);
                          j["e"] = to_double(q.e);
                          j["d"] = to_double(q.d);
                        },
                        [&](const IsotonicParams& q) {
                          j["omega"] = to_double(q.omega);
                          j["beta"] = to_double(q.beta);
                          j["a"] = to_double(q.a);
                        },
                        [&](const NonPolyParams& q) {
                          j["omega"] = to_double(q.omega);
                          j["lambda"] = to_double(q.lambda);
                          j["delta"] = to_double(q.delta);
                        },
                        [&](const KinkParams& q) {
                          j["mu"] = to_double(q.mu);
                          j["nu"] = to_double(q.nu);
                        }},
             m);
  j["p"] = parity(m);
  j["n"] = level(m);
  return j.dump();
}

ModelInstance instance_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw validation_error(std::string("bad instance JSON: ") + ex.what());
  }
  ModelInstance m;
  try {
    const Family fam = family_from_name(j.at("family").get<std::string>());
    const int n = j.value("n", 0);
    const int p = j.value("p", 0);
    switch (fam) {
      case Family::sextic: {
        SexticParams q;
        q.alpha = real(j.value("alpha", 0.0));
        q.beta = real(j.value("beta", 0.0));
        q.gamma = real(j.value("gamma", 1.0));
        q.p = p;
        q.n = n;
        m = q;
        break;
      }
      case Family::singular: {
        if (p != 0)
          throw validation_error(
              "the singular family has no odd sector (p must be 0)");
        SingularParams q;
        q.omega = real(j.value("omega", 1.0));
        q.e = real(j.value("e", 0.0));
        q.d = real(j.value("d", 1.0));
        q.n = n;
        m = q;
        break;
      }
      case Family::isotonic: {
        IsotonicParams q;
        q.omega = real(j.value("omega", 1.0));
        q.beta = real(j.value("beta", 0.0));
        q.a = real(j.value("a", 1.0));
        q.p = p;
        q.n = n;
        m = q;
        break;
      }
      case Family::nonpoly: {
        NonPolyParams q;
        q.omega = real(j.value("omega", 1.0));
        q.lambda = real(j.value("lambda", 0.0));
        q.delta = real(j.value("delta", 1.0));
        q.p = p;
        q.n = n;
        m = q;
        break;
      }
      case Family::kink: {
        KinkParams q;
        q.mu = real(j.value("mu", 1.0));
        q.nu = real(j.value("nu", 0.0));
        q.p = p;
        q.n = n;
        m = q;
        break;
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw validation_error(std::string("bad instance JSON: ") + ex.what());
  }
  validate(m);
  return m;
}

}  // namespace qes
