// SPDX-License-Identifier: Apache-2.0
#include "qes/sl2.h"

#include <cstdlib>

namespace qes {

namespace {

using IMat = std::vector<std::vector<std::int64_t>>;

IMat zeros(int dim) { return IMat(dim, std::vector<std::int64_t>(dim, 0)); }

IMat matmul(const IMat& a, const IMat& b) {
  const int dim = static_cast<int>(a.size());
  IMat c = zeros(dim);
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) {
      if (a[i][k] == 0) continue;
      for (int j = 0; j < dim; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

MatR to_real_halved(const IMat& m) {
  const int dim = static_cast<int>(m.size());
  MatR out(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) out(i, j) = real(m[i][j]) / 2;
  return out;
}

}  // namespace

MatR Sl2Rep::Jplus() const { return to_real_halved(two_jplus); }
MatR Sl2Rep::Jzero() const { return to_real_halved(two_jzero); }
MatR Sl2Rep::Jminus() const { return to_real_halved(two_jminus); }

Sl2Rep build_rep(int n) {
  if (n < 0) throw validation_error("build_rep: level must be nonnegative");
  Sl2Rep rep;
  rep.n = n;
  const int dim = n + 1;
  rep.two_jplus = zeros(dim);
  rep.two_jzero = zeros(dim);
  rep.two_jminus = zeros(dim);
  for (int k = 0; k <= n; ++k) {
    rep.two_jzero[k][k] = 2 * k - n;
    if (k + 1 <= n) rep.two_jplus[k + 1][k] = 2 * (n - k);
    if (k - 1 >= 0) rep.two_jminus[k - 1][k] = 2 * k;
  }
  return rep;
}

std::int64_t commutator_defect(const Sl2Rep& rep) {
  const int dim = rep.n + 1;
  const IMat& p = rep.two_jplus;
  const IMat& z = rep.two_jzero;
  const IMat& m = rep.two_jminus;
  IMat zp = matmul(z, p), pz = matmul(p, z);
  IMat zm = matmul(z, m), mz = matmul(m, z);
  IMat pm = matmul(p, m), mp = matmul(m, p);
  std::int64_t defect = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      // [2J0,2Jp] - 2*(2Jp); [2J0,2Jm] + 2*(2Jm); [2Jp,2Jm] - 4*(2J0).
      defect = std::max<std::int64_t>(defect, std::llabs(zp[i][j] - pz[i][j] - 2 * p[i][j]));
      defect = std::max<std::int64_t>(defect, std::llabs(zm[i][j] - mz[i][j] + 2 * m[i][j]));
      defect = std::max<std::int64_t>(defect, std::llabs(pm[i][j] - mp[i][j] - 4 * z[i][j]));
    }
  return defect;
}

MatR assemble(const AlgebraizedForm& form) {
  const int dim = form.n + 1;
  Sl2Rep rep = build_rep(form.n);
  auto gen = [&](Gen g) -> MatR {
    switch (g) {
      case Gen::Jp: return rep.Jplus();
      case Gen::J0: return rep.Jzero();
      default: return rep.Jminus();
    }
  };
  MatR acc = MatR::Zero(dim, dim);
  for (const auto& term : form.terms) {
    if (term.word.empty() || term.word.size() > 2)
      throw validation_error("assemble: words must have length 1 or 2");
    MatR w = gen(term.word[0]);
    for (std::size_t i = 1; i < term.word.size(); ++i) w = (w * gen(term.word[i])).eval();
    acc += term.coeff * w;
  }
  for (int i = 0; i < dim; ++i) acc(i, i) += form.constant;
  return acc;
}

ConditionReport algebraization_conditions(const OdeSpec& spec, int n) {
  ConditionReport rep;
  auto fill = [&](int slot, const std::string& name, const real& lhs, const real& rhs) {
    auto& item = rep.items[slot];
    item.name = name;
    item.lhs = lhs;
    item.rhs = rhs;
    item.residual = lhs - rhs;
    real scale = std::max(real(1), std::max(abs(lhs), abs(rhs)));
    item.ok = abs(item.residual) <= real("1e-10") * scale;
  };
  const real rn(n);
  fill(0, "b3 = -2(n-1) a4", spec.b[3], real(-2) * (rn - 1) * spec.a[4]);
  fill(1, "c2 = n(n-1) a4", spec.c[2], rn * (rn - 1) * spec.a[4]);
  fill(2, "c1 = -n[(n-1) a3 + b2]", spec.c[1], -rn * ((rn - 1) * spec.a[3] + spec.b[2]));
  rep.ok = rep.items[0].ok && rep.items[1].ok && rep.items[2].ok;
  return rep;
}

real verify_algebraization(const AlgebraizedForm& form, const OdeSpec& spec, int n) {
  if (n != form.n)
    throw validation_error("verify_algebraization: level does not match the form dimension");
  MatR lhs = assemble(form);
  for (int i = 0; i <= n; ++i) lhs(i, i) -= form.epsilon;
  MatR rhs = ode_matrix(spec, n, n + 1);
  real dev(0);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) dev = std::max(dev, abs(lhs(i, j) - rhs(i, j)));
  return dev;
}

}  // namespace qes
