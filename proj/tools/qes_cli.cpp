// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the qes authors

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qes/bethe.h"
#include "qes/explorer.h"
#include "qes/models.h"
#include "qes/sl2.h"
#include "qes/spectral.h"

namespace {

using namespace qes;

struct Flags {
  std::string model = "sextic";
  int n = 0;
  int p = 0;
  double alpha = 0;
  double beta = 0;
  double gamma = 1;
  double omega = 1;
  double e = 1;
  double d = 0.5;
  double a = 1;
  double lambda = 0;
  double delta = 1;
  double mu = 1;
  double nu = -0.5;
  bool alpha_given = false;
  std::string instance_json;
  std::string format = "csv";
  std::string out;
  int precision = 30;
  long long seed = 0;
};

ModelInstance make_instance(const Flags& f) {
  if (!f.instance_json.empty()) return instance_from_json(f.instance_json);
  const Family fam = family_from_name(f.model);
  ModelInstance m;
  switch (fam) {
    case Family::sextic: {
      SexticParams s;
      s.alpha = real(f.alpha);
      s.beta = real(f.beta);
      s.gamma = real(f.gamma);
      s.p = f.p;
      s.n = f.n;
      m = s;
      break;
    }
    case Family::singular: {
      if (f.p != 0)
        throw validation_error("the singular family has no odd sector (p must be 0)");
      SingularParams s;
      s.omega = real(f.omega);
      s.e = real(f.e);
      s.d = real(f.d);
      s.n = f.n;
      m = s;
      break;
    }
    case Family::isotonic: {
      IsotonicParams s;
      s.omega = real(f.omega);
      s.beta = real(f.beta);
      s.a = real(f.a);
      s.p = f.p;
      s.n = f.n;
      m = s;
      break;
    }
    case Family::nonpoly: {
      NonPolyParams s;
      s.omega = real(f.omega);
      s.lambda = real(f.lambda);
      s.delta = real(f.delta);
      s.p = f.p;
      s.n = f.n;
      m = s;
      break;
    }
    case Family::kink: {
      KinkParams s;
      s.mu = real(f.mu);
      s.nu = real(f.nu);
      s.p = f.p;
      s.n = f.n;
      m = s;
      break;
    }
  }
  // Without an explicit --alpha the sextic instance sits on the solvable
  // locus; an explicit value is honored so `check` can probe off-locus.
  if (fam == Family::sextic && !f.alpha_given) m = on_qes_locus(m);
  validate(m);
  return m;
}

void emit(const std::string& text, const Flags& f) {
  if (f.out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_file(f.out, text);
  }
}

std::string json_escape(const std::string& s) {
  std::string r;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      r += '\\';
      r += c;
    } else {
      r += c;
    }
  }
  return r;
}

/// Simple name/value table shared by check and proposition.
struct KvTable {
  struct Row {
    std::string name;
    std::string value;
  };
  std::vector<Row> rows;

  void add(const std::string& name, const std::string& value) {
    rows.push_back({name, value});
  }
  void add(const std::string& name, const real& value) {
    add(name, format_sig17(value));
  }

  std::string render(const std::string& format) const {
    std::string out;
    if (format == "csv") {
      out = "name,value\n";
      for (const auto& r : rows) out += r.name + ',' + r.value + '\n';
      return out;
    }
    out = "{\"records\":[";
    bool first = true;
    for (const auto& r : rows) {
      if (!first) out += ',';
      first = false;
      out += "{\"name\":\"" + json_escape(r.name) + "\",\"value\":\"" +
             json_escape(r.value) + "\"}";
    }
    out += "]}\n";
    return out;
  }
};

const char* result_class_name(const SpectralResult& r) {
  switch (r.classification) {
    case Classification::real_eigenvalue:
      return r.bae_mismatch ? "bae-mismatch" : "real";
    case Classification::complex_discarded:
      return "complex-discarded";
    case Classification::refinement_failed:
      return "refinement-failed";
  }
  return "unknown";
}

int cmd_solve(const Flags& f) {
  const ModelInstance m = make_instance(f);
  const auto sols = closed_form_level(m);
  std::string out;
  if (f.format == "csv") {
    out = "model,n,p,branch,solved,value,energy,re,im\n";
    for (const auto& s : sols) {
      const std::string head =
          std::string(family_name(family(s.instance))) + ',' +
          std::to_string(level(s.instance)) + ',' +
          std::to_string(parity(s.instance)) + ',' + s.branch + ',' +
          s.solved_name + ',' + format_sig17(s.solved_value) + ',' +
          format_sig17(s.E) + ',';
      if (s.roots.roots.empty()) {
        out += head + ",\n";
      } else {
        for (const auto& z : s.roots.roots)
          out += head + format_sig17(z.real()) + ',' + format_sig17(z.imag()) + '\n';
      }
    }
  } else {
    out = "{\"solutions\":[";
    bool first = true;
    for (const auto& s : sols) {
      if (!first) out += ',';
      first = false;
      out += "{\"model\":\"";
      out += family_name(family(s.instance));
      out += "\",\"n\":" + std::to_string(level(s.instance));
      out += ",\"p\":" + std::to_string(parity(s.instance));
      out += ",\"branch\":\"" + json_escape(s.branch) + "\"";
      out += ",\"solved\":\"" + json_escape(s.solved_name) + "\"";
      out += ",\"value\":" + format_sig17(s.solved_value);
      out += ",\"energy\":" + format_sig17(s.E);
      out += ",\"roots\":[";
      bool fr = true;
      for (const auto& z : s.roots.roots) {
        if (!fr) out += ',';
        fr = false;
        out += "{\"re\":" + format_sig17(z.real()) +
               ",\"im\":" + format_sig17(z.imag()) + "}";
      }
      out += "]}";
    }
    out += "]}\n";
  }
  emit(out, f);
  return 0;
}

int cmd_bae(const Flags& f, int starts, double box) {
  const ModelInstance m = make_instance(f);
  const OdeSpec spec = ode_spec(m);
  BaeOptions bo;
  bo.starts = starts;
  bo.seed = static_cast<std::uint64_t>(f.seed);
  bo.precision_digits = f.precision;
  bo.box = real(box);
  const auto sols = solve_baes(spec, level(m), {}, bo);
  std::string out;
  if (f.format == "csv") {
    out = "model,n,p,solution,re,im,residual\n";
    for (std::size_t i = 0; i < sols.size(); ++i) {
      const std::string head = std::string(family_name(family(m))) + ',' +
                               std::to_string(level(m)) + ',' +
                               std::to_string(parity(m)) + ',' +
                               std::to_string(i) + ',';
      if (sols[i].roots.roots.empty()) {
        out += head + ",," + format_sig17(sols[i].residual_norm) + '\n';
      } else {
        for (const auto& z : sols[i].roots.roots)
          out += head + format_sig17(z.real()) + ',' + format_sig17(z.imag()) +
                 ',' + format_sig17(sols[i].residual_norm) + '\n';
      }
    }
  } else {
    out = "{\"solutions\":[";
    for (std::size_t i = 0; i < sols.size(); ++i) {
      if (i) out += ',';
      out += "{\"model\":\"";
      out += family_name(family(m));
      out += "\",\"n\":" + std::to_string(level(m));
      out += ",\"p\":" + std::to_string(parity(m));
      out += ",\"solution\":" + std::to_string(i);
      out += ",\"residual\":" + format_sig17(sols[i].residual_norm);
      out += ",\"c0\":{\"re\":" + format_sig17(sols[i].derived_c[2].real()) +
             ",\"im\":" + format_sig17(sols[i].derived_c[2].imag()) + "}";
      out += ",\"roots\":[";
      bool fr = true;
      for (const auto& z : sols[i].roots.roots) {
        if (!fr) out += ',';
        fr = false;
        out += "{\"re\":" + format_sig17(z.real()) +
               ",\"im\":" + format_sig17(z.imag()) + "}";
      }
      out += "]}";
    }
    out += "]}\n";
  }
  emit(out, f);
  return 0;
}

int cmd_spectrum(const Flags& f) {
  const ModelInstance m = make_instance(f);
  const PencilProblem pr = build_pencil(m);
  SolveOptions so;
  so.precision_digits = f.precision;
  so.seed = static_cast<unsigned long long>(f.seed);
  auto results = solve_pencil(pr, so);
  for (auto& r : results) roots_from_coeffs(r, pr, so);
  std::string out;
  if (f.format == "csv") {
    out = "model,n,p,index,re,im,classification,pencil_residual,bae_residual\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      out += family_name(family(m));
      out += ',' + std::to_string(level(m)) + ',' + std::to_string(parity(m));
      out += ',' + std::to_string(i);
      out += ',' + format_sig17(r.eigenvalue.real()) + ',' +
             format_sig17(r.eigenvalue.imag());
      out += ',';
      out += result_class_name(r);
      out += ',' + format_sig17(r.pencil_residual) + ',' +
             format_sig17(r.bae_checked ? r.bae_residual : real(0));
      out += '\n';
    }
  } else {
    out = "{\"eigenvalues\":[";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      if (i) out += ',';
      out += "{\"model\":\"";
      out += family_name(family(m));
      out += "\",\"n\":" + std::to_string(level(m));
      out += ",\"p\":" + std::to_string(parity(m));
      out += ",\"index\":" + std::to_string(i);
      out += ",\"re\":" + format_sig17(r.eigenvalue.real());
      out += ",\"im\":" + format_sig17(r.eigenvalue.imag());
      out += ",\"classification\":\"";
      out += result_class_name(r);
      out += "\",\"pencil_residual\":" + format_sig17(r.pencil_residual);
      out += ",\"bae_residual\":" +
             format_sig17(r.bae_checked ? r.bae_residual : real(0));
      out += "}";
    }
    out += "]}\n";
  }
  emit(out, f);
  return 0;
}

int cmd_scan(const Flags& f, const ScanOptions& so) {
  const Family fam = family_from_name(f.model);
  ScanOptions opts = so;
  opts.precision_digits = f.precision;
  opts.seed = static_cast<unsigned long long>(f.seed);
  const ScanSurface surf = scan(fam, f.n, f.p, opts);
  emit(render(surf, f.format == "csv" ? EmitFormat::csv : EmitFormat::json), f);
  return 0;
}

int cmd_roots(const Flags& f) {
  const ModelInstance m = make_instance(f);
  SolveOptions so;
  so.precision_digits = f.precision;
  so.seed = static_cast<unsigned long long>(f.seed);
  const auto clouds = root_cloud(m, so);
  emit(render(clouds, f.format == "csv" ? EmitFormat::csv : EmitFormat::json), f);
  return 0;
}

int cmd_check(const Flags& f) {
  const ModelInstance m = make_instance(f);
  const int n = level(m);
  const OdeSpec spec = ode_spec(m);
  KvTable t;
  bool ok = true;

  const ConditionReport rep = algebraization_conditions(spec, n);
  for (const auto& item : rep.items) {
    t.add(item.name + " residual", item.residual);
    t.add(item.name + " ok", item.ok ? "yes" : "no");
    ok = ok && item.ok;
  }

  const AlgebraizedForm form = algebraized_form(m);
  const real dev = verify_algebraization(form, spec, n);
  real scale(1);
  {
    const MatR M = ode_matrix(spec, n, n + 1);
    for (Eigen::Index i = 0; i < M.rows(); ++i)
      for (Eigen::Index j = 0; j < M.cols(); ++j)
        if (abs(M(i, j)) > scale) scale = abs(M(i, j));
  }
  const bool dev_ok = dev <= real(1e-9) * scale;
  t.add("algebraization_deviation", dev);
  t.add("algebraization ok", dev_ok ? "yes" : "no");
  ok = ok && dev_ok;

  // A concrete solution: pencil branches matching the given instance.
  const PencilProblem pr = build_pencil(m);
  SolveOptions so;
  so.precision_digits = f.precision;
  so.seed = static_cast<unsigned long long>(f.seed);
  auto results = solve_pencil(pr, so);
  std::optional<real> target;
  switch (pr.unknown) {
    case SpectralUnknown::energy: break;  // every branch is a solution
    case SpectralUnknown::omega:
      target = std::holds_alternative<SingularParams>(m)
                   ? std::get<SingularParams>(m).omega
                   : std::get<IsotonicParams>(m).omega;
      break;
    case SpectralUnknown::lambda: target = std::get<NonPolyParams>(m).lambda; break;
    case SpectralUnknown::nu: target = std::get<KinkParams>(m).nu; break;
    case SpectralUnknown::accessory: break;
  }
  int branches = 0;
  for (auto& r : results) {
    roots_from_coeffs(r, pr, so);
    if (r.classification != Classification::real_eigenvalue || r.bae_mismatch)
      continue;
    if (target &&
        !(abs(r.eigenvalue.real() - *target) <= real(1e-6) * (1 + abs(*target))))
      continue;
    ModelInstance inst = m;
    if (auto* kp = std::get_if<KinkParams>(&inst); kp && r.degree_deficient)
      kp->n = r.effective_degree;  // collapsed sector solves a lower level
    std::optional<real> energy_in;
    if (pr.unknown == SpectralUnknown::energy) energy_in = r.eigenvalue.real();
    const Wavefunction w = assemble_wavefunction(inst, r.roots, energy_in);
    const real sres = schrodinger_residual(w);
    const real cres = constraint_residual(inst, r.roots);
    const std::string tag = "branch " + std::to_string(branches);
    t.add(tag + " value", r.eigenvalue.real());
    t.add(tag + " energy", w.E);
    t.add(tag + " schrodinger_residual", sres);
    t.add(tag + " constraint_residual", cres);
    const bool bok = sres <= real(1e-8);
    t.add(tag + " ok", bok ? "yes" : "no");
    ok = ok && bok;
    ++branches;
  }
  t.add("branches", real(branches));
  if (branches == 0) ok = false;
  t.add("overall", ok ? "pass" : "fail");
  emit(t.render(f.format), f);
  if (!ok)
    throw validation_error(
        "check failed: the instance does not sit on a solvable locus (see the "
        "emitted report)");
  return 0;
}

int cmd_proposition(const Flags& f) {
  const Family fam = family_from_name(f.model);
  if (fam != Family::singular)
    throw validation_error("the odd-sector obstruction is specific to the singular family");
  SingularParams sp;
  sp.omega = real(f.omega);
  sp.e = real(f.e);
  sp.d = real(f.d);
  sp.n = f.n;
  KvTable t;
  t.add("obstruction p=0", odd_sector_obstruction(sp, 0));
  t.add("obstruction p=1", odd_sector_obstruction(sp, 1));
  t.add("verdict",
        "p=1 forces the constant 2p sqrt(2d) onto an x^{-1} term no gauge "
        "removes; only p=0 admits solutions");
  emit(t.render(f.format), f);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Flags f;
  int starts = 64;
  double box = 0;
  ScanOptions so;
  double ax1lo = 0, ax1hi = 0, ax2lo = 0, ax2hi = 0;

  CLI::App app{"Quasi-exactly solvable spectra: closed forms, Bethe-ansatz "
               "roots, matrix-pencil eigenvalues, parameter scans"};
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--model", f.model, "Model family")
      ->check(CLI::IsMember({"sextic", "singular", "isotonic", "nonpoly", "kink"}));
  app.add_option("--n", f.n, "Polynomial degree (solvable-sector size n)");
  app.add_option("--p", f.p, "Parity sector")->check(CLI::IsMember({0, 1}));
  auto* alpha_opt = app.add_option("--alpha", f.alpha, "Sextic x^2 coefficient");
  app.add_option("--beta", f.beta, "Sextic x^4 / isotonic well parameter");
  app.add_option("--gamma", f.gamma, "Sextic x^6 coefficient (> 0)");
  app.add_option("--omega", f.omega, "Oscillator frequency");
  app.add_option("--e", f.e, "Singular x^-4 strength");
  app.add_option("--d", f.d, "Singular x^-6 strength (> 0)");
  app.add_option("--a", f.a, "Isotonic displacement (> 0)");
  app.add_option("--lambda", f.lambda, "Non-polynomial coupling");
  app.add_option("--delta", f.delta, "Non-polynomial shape parameter (!= 0)");
  app.add_option("--mu", f.mu, "Kink mass scale (> 0)");
  app.add_option("--nu", f.nu, "Kink shape parameter");
  app.add_option("--instance", f.instance_json, "Model instance as JSON text");
  app.add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", f.out, "Output path (default: stdout)");
  app.add_option("--precision", f.precision, "Refinement digits (default 30)");
  app.add_option("--seed", f.seed, "RNG seed");

  auto* sub_solve = app.add_subcommand("solve", "Closed-form branches (n <= 1, kink n <= 2)");
  auto* sub_bae = app.add_subcommand("bae", "Multi-start Bethe-ansatz solver");
  auto* sub_spectrum = app.add_subcommand("spectrum", "Matrix-pencil eigenvalues");
  auto* sub_scan = app.add_subcommand("scan", "Two-parameter layer surface");
  auto* sub_roots = app.add_subcommand("roots", "Bethe-root clouds per branch");
  auto* sub_check = app.add_subcommand("check", "Degree-invariance conditions, algebraization identity, Schrodinger residual");
  auto* sub_prop = app.add_subcommand("proposition", "Odd-sector obstruction report (singular family)");

  sub_bae->add_option("--starts", starts, "Random multi-start budget");
  sub_bae->add_option("--box", box, "Real seed box half-width (0 = automatic)");
  sub_scan->add_option("--axis1-min", ax1lo, "First axis lower bound");
  sub_scan->add_option("--axis1-max", ax1hi, "First axis upper bound");
  sub_scan->add_option("--axis1-steps", so.axis1.steps, "First axis grid points");
  sub_scan->add_option("--axis2-min", ax2lo, "Second axis lower bound");
  sub_scan->add_option("--axis2-max", ax2hi, "Second axis upper bound");
  sub_scan->add_option("--axis2-steps", so.axis2.steps, "Second axis grid points");

  CLI11_PARSE(app, argc, argv);
  f.alpha_given = alpha_opt->count() > 0;
  so.axis1.lo = real(ax1lo);
  so.axis1.hi = real(ax1hi);
  so.axis2.lo = real(ax2lo);
  so.axis2.hi = real(ax2hi);

  try {
    if (sub_solve->parsed()) return cmd_solve(f);
    if (sub_bae->parsed()) return cmd_bae(f, starts, box);
    if (sub_spectrum->parsed()) return cmd_spectrum(f);
    if (sub_scan->parsed()) return cmd_scan(f, so);
    if (sub_roots->parsed()) return cmd_roots(f);
    if (sub_check->parsed()) return cmd_check(f);
    if (sub_prop->parsed()) return cmd_proposition(f);
  } catch (const validation_error& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 3;
  }
  return 0;
}
