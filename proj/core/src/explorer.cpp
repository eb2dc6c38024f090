// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the qes authors

#include "qes/explorer.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <utility>

#include "qes/bethe.h"

namespace qes {

namespace {

real max_bae_residual(const OdeSpec& s, const RootSet& roots) {
  try {
    real mx(0);
    for (const auto& e : bae_residual(s, roots))
      if (abs(e) > mx) mx = abs(e);
    return mx;
  } catch (const bae_singularity&) {
    return std::numeric_limits<real>::infinity();
  }
}

bool lex_less(const cplx& x, const cplx& y) {
  if (x.real() != y.real()) return x.real() < y.real();
  return x.imag() < y.imag();
}

ModelInstance grid_instance(Family f, int n, int p, const real& v1,
                            const real& v2) {
  switch (f) {
    case Family::sextic: {
      SexticParams s;
      s.alpha = real(0);  // replaced by on_qes_locus
      s.beta = v1;
      s.gamma = v2;
      s.p = p;
      s.n = n;
      return ModelInstance(s);
    }
    case Family::singular: {
      SingularParams s;
      s.omega = real(1);  // placeholder; omega is the solved unknown
      s.d = v1;
      s.e = v2;
      s.n = n;
      return ModelInstance(s);
    }
    case Family::isotonic: {
      IsotonicParams s;
      s.omega = real(1);  // placeholder; omega is the solved unknown
      s.a = v1;
      s.beta = v2;
      s.p = p;
      s.n = n;
      return ModelInstance(s);
    }
    case Family::nonpoly: {
      NonPolyParams s;
      s.omega = v2;
      s.lambda = real(0);  // placeholder; lambda is the solved unknown
      s.delta = v1;
      s.p = p;
      s.n = n;
      return ModelInstance(s);
    }
    default:
      throw validation_error("no grid instance for this family");
  }
}

AxisSpec merge_axis(AxisSpec def, const AxisSpec& user) {
  if (!user.name.empty()) def.name = user.name;
  if (user.lo != user.hi) {
    def.lo = user.lo;
    def.hi = user.hi;
  }
  if (user.steps != 21) def.steps = user.steps;
  if (def.steps < 1) def.steps = 1;
  if (def.steps > 1 && !(def.lo < def.hi))
    throw validation_error("axis range must have lo < hi");
  return def;
}

real axis_value(const AxisSpec& ax, int i) {
  if (ax.steps <= 1) return ax.lo;
  return ax.lo + (ax.hi - ax.lo) * real(i) / real(ax.steps - 1);
}

}  // namespace

const char* scan_class_name(ScanClass c) {
  switch (c) {
    case ScanClass::real_layer: return "real";
    case ScanClass::complex_discarded: return "complex-discarded";
    case ScanClass::refinement_failed: return "refinement-failed";
    case ScanClass::bae_mismatch: return "bae-mismatch";
  }
  return "unknown";
}

ModelInstance on_qes_locus(const ModelInstance& m) {
  if (const auto* s = std::get_if<SexticParams>(&m)) {
    SexticParams t = *s;
    t.alpha = real(0);
    validate(ModelInstance(t));
    t.alpha = t.beta * t.beta / (4 * t.gamma) -
              real(3 + 4 * t.n + 2 * t.p) * sqrt(t.gamma);
    return ModelInstance(t);
  }
  validate(m);
  return m;
}

AxisSpec default_axis1(Family f) {
  switch (f) {
    case Family::sextic: return {"beta", real(-5), real(5), 21};
    case Family::singular: return {"d", real(0), real(10), 21};
    case Family::isotonic: return {"a", real(0), real(10), 21};
    case Family::nonpoly: return {"delta", real(-2), real(2), 21};
    default:
      throw validation_error(
          "the kink family has a one-parameter constraint and no layer "
          "surface; use roots instead of scan");
  }
}

AxisSpec default_axis2(Family f) {
  switch (f) {
    case Family::sextic: return {"gamma", real(0), real(10), 21};
    case Family::singular: return {"e", real(-20), real(20), 21};
    case Family::isotonic: return {"beta", real(-20), real(20), 21};
    case Family::nonpoly: return {"omega", real(0), real(10), 21};
    default:
      throw validation_error(
          "the kink family has a one-parameter constraint and no layer "
          "surface; use roots instead of scan");
  }
}

ScanSurface scan(Family f, int n, int p, const ScanOptions& opt) {
  if (n < 0) throw validation_error("n must be nonnegative");
  if (p != 0 && p != 1) throw validation_error("p must be 0 or 1");
  if (f == Family::singular && p != 0)
    throw validation_error("the singular family has no odd sector (p must be 0)");

  ScanSurface surf;
  surf.family = f;
  surf.n = n;
  surf.p = p;
  surf.axis1 = merge_axis(default_axis1(f), opt.axis1);
  surf.axis2 = merge_axis(default_axis2(f), opt.axis2);

  SolveOptions sopt;
  sopt.precision_digits = opt.precision_digits;
  sopt.seed = opt.seed;

  for (int i = 0; i < surf.axis1.steps; ++i) {
    const real v1 = axis_value(surf.axis1, i);
    for (int j = 0; j < surf.axis2.steps; ++j) {
      const real v2 = axis_value(surf.axis2, j);
      std::vector<std::pair<cplx, ScanClass>> reals, rest;
      try {
        const ModelInstance m = on_qes_locus(grid_instance(f, n, p, v1, v2));
        const PencilProblem pr = build_pencil(m);
        auto results = solve_pencil(pr, sopt);
        for (auto& r : results) {
          roots_from_coeffs(r, pr, sopt);
          switch (r.classification) {
            case Classification::real_eigenvalue:
              if (r.bae_mismatch)
                rest.emplace_back(r.eigenvalue, ScanClass::bae_mismatch);
              else
                reals.emplace_back(r.eigenvalue, ScanClass::real_layer);
              break;
            case Classification::complex_discarded:
              rest.emplace_back(r.eigenvalue, ScanClass::complex_discarded);
              break;
            case Classification::refinement_failed:
              rest.emplace_back(r.eigenvalue, ScanClass::refinement_failed);
              break;
          }
        }
      } catch (const validation_error&) {
        continue;  // invalid grid point (gamma = 0, delta = 0, ...): no records
      } catch (const numerical_error&) {
        continue;  // nothing admissible resolvable here: no records
      }
      auto pair_less = [](const std::pair<cplx, ScanClass>& x,
                          const std::pair<cplx, ScanClass>& y) {
        if (x.first.real() != y.first.real())
          return x.first.real() < y.first.real();
        if (x.first.imag() != y.first.imag())
          return x.first.imag() < y.first.imag();
        return static_cast<int>(x.second) < static_cast<int>(y.second);
      };
      std::sort(reals.begin(), reals.end(), pair_less);
      std::sort(rest.begin(), rest.end(), pair_less);
      int layer = 0;
      for (const auto* group : {&reals, &rest}) {
        for (const auto& [ev, cls] : *group) {
          ScanRecord rec;
          rec.axis1 = v1;
          rec.axis2 = v2;
          rec.layer = layer++;
          rec.value = ev.real();
          rec.cls = cls;
          surf.records.push_back(rec);
        }
      }
    }
  }
  return surf;
}

std::vector<RootCloud> root_cloud(const ModelInstance& m0,
                                  const SolveOptions& opt) {
  const ModelInstance m = on_qes_locus(m0);
  std::vector<RootCloud> clouds;

  if (family(m) == Family::kink) {
    // The BAEs at fixed nu do not involve the accessory parameter, so every
    // accessory eigenvalue whose roots satisfy them is a branch; conjugate
    // eigenvalue pairs are one branch plotted together.
    const auto& kp = std::get<KinkParams>(m);
    const PencilProblem pr = accessory_pencil(kp);
    auto results = solve_pencil(pr, opt);
    const OdeSpec base = ode_spec(m);
    struct Branch {
      cplx ev;
      std::vector<cplx> pts;
      bool failed;
      real bres;
      bool used{false};
    };
    std::vector<Branch> brs;
    for (auto& r : results) {
      roots_from_coeffs(r, pr, opt);
      const real bres =
          r.bae_checked ? r.bae_residual : max_bae_residual(base, r.roots);
      const bool failed = (r.classification == Classification::refinement_failed);
      if (!failed && !(bres <= real(1e-6))) continue;  // not a BAE solution
      brs.push_back(Branch{r.eigenvalue, r.roots.roots, failed, bres});
    }
    for (std::size_t i = 0; i < brs.size(); ++i) {
      if (brs[i].used) continue;
      brs[i].used = true;
      RootCloud c;
      c.points = brs[i].pts;
      c.refinement_failed = brs[i].failed;
      c.bae_residual = brs[i].bres;
      if (is_real_eigenvalue(brs[i].ev)) {
        c.branch = brs[i].ev.real();
      } else {
        const real tol = real(1e-6) * (1 + abs(brs[i].ev));
        std::size_t match = brs.size();
        real best = tol;
        for (std::size_t j = i + 1; j < brs.size(); ++j) {
          if (brs[j].used) continue;
          const real d = abs(brs[j].ev - conj(brs[i].ev));
          if (d <= best) {
            best = d;
            match = j;
          }
        }
        if (match < brs.size()) {
          brs[match].used = true;
          c.points.insert(c.points.end(), brs[match].pts.begin(),
                          brs[match].pts.end());
          c.branch = (brs[i].ev.real() + brs[match].ev.real()) / 2;
          c.refinement_failed = c.refinement_failed || brs[match].failed;
          if (brs[match].bres > c.bae_residual) c.bae_residual = brs[match].bres;
        } else {
          c.branch = brs[i].ev.real();  // unpaired complex branch; kept as is
        }
      }
      clouds.push_back(std::move(c));
    }
  } else {
    const PencilProblem pr = build_pencil(m);
    auto results = solve_pencil(pr, opt);
    for (auto& r : results) {
      roots_from_coeffs(r, pr, opt);
      const bool failed = (r.classification == Classification::refinement_failed);
      const bool admissible =
          r.classification == Classification::real_eigenvalue && !r.bae_mismatch;
      if (!failed && !admissible) continue;
      RootCloud c;
      c.branch = r.eigenvalue.real();
      c.points = r.roots.roots;
      c.refinement_failed = failed;
      c.bae_residual = r.bae_residual;
      clouds.push_back(std::move(c));
    }
  }

  for (auto& c : clouds) {
    c.family = family(m);
    c.n = level(m);
    c.p = parity(m);
    std::sort(c.points.begin(), c.points.end(), lex_less);
  }
  std::stable_sort(clouds.begin(), clouds.end(),
                   [](const RootCloud& x, const RootCloud& y) {
                     return x.branch < y.branch;
                   });
  return clouds;
}

std::string format_sig17(const real& x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", to_double(x));
  return buf;
}

std::string render(const ScanSurface& s, EmitFormat f) {
  std::string out;
  if (f == EmitFormat::csv) {
    out = "model,n,p,axis1,axis2,layer,value,classification\n";
    for (const auto& r : s.records) {
      out += family_name(s.family);
      out += ',' + std::to_string(s.n) + ',' + std::to_string(s.p) + ',';
      out += format_sig17(r.axis1) + ',' + format_sig17(r.axis2) + ',';
      out += std::to_string(r.layer) + ',' + format_sig17(r.value) + ',';
      out += scan_class_name(r.cls);
      out += '\n';
    }
    return out;
  }
  out = "{\"records\":[";
  bool first = true;
  for (const auto& r : s.records) {
    if (!first) out += ',';
    first = false;
    out += "{\"model\":\"";
    out += family_name(s.family);
    out += "\",\"n\":" + std::to_string(s.n) + ",\"p\":" + std::to_string(s.p);
    out += ",\"axis1\":" + format_sig17(r.axis1);
    out += ",\"axis2\":" + format_sig17(r.axis2);
    out += ",\"layer\":" + std::to_string(r.layer);
    out += ",\"value\":" + format_sig17(r.value);
    out += ",\"classification\":\"";
    out += scan_class_name(r.cls);
    out += "\"}";
  }
  out += "]}\n";
  return out;
}

std::string render(const std::vector<RootCloud>& clouds, EmitFormat f) {
  std::string out;
  if (f == EmitFormat::csv) {
    out = "model,n,p,branch,re,im\n";
    for (const auto& c : clouds) {
      for (const auto& z : c.points) {
        out += family_name(c.family);
        out += ',' + std::to_string(c.n) + ',' + std::to_string(c.p) + ',';
        out += format_sig17(c.branch) + ',';
        out += format_sig17(z.real()) + ',' + format_sig17(z.imag());
        out += '\n';
      }
    }
    return out;
  }
  out = "{\"records\":[";
  bool first = true;
  for (const auto& c : clouds) {
    for (const auto& z : c.points) {
      if (!first) out += ',';
      first = false;
      out += "{\"model\":\"";
      out += family_name(c.family);
      out += "\",\"n\":" + std::to_string(c.n) + ",\"p\":" + std::to_string(c.p);
      out += ",\"branch\":" + format_sig17(c.branch);
      out += ",\"re\":" + format_sig17(z.real());
      out += ",\"im\":" + format_sig17(z.imag());
      out += "}";
    }
  }
  out += "]}\n";
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace qes
