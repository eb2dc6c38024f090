// SPDX-License-Identifier: Apache-2.0
#include "qes/ode.h"

namespace qes {

Poly OdeSpec::X() const {
  return Poly(std::vector<cplx>{cplx(a[0]), cplx(a[1]), cplx(a[2]), cplx(a[3]), cplx(a[4])});
}
Poly OdeSpec::Y() const {
  return Poly(std::vector<cplx>{cplx(b[0]), cplx(b[1]), cplx(b[2]), cplx(b[3])});
}
Poly OdeSpec::Z() const { return Poly(std::vector<cplx>{cplx(c[0]), cplx(c[1]), cplx(c[2])}); }

Poly apply_ode(const OdeSpec& spec, const Poly& y) {
  return add(add(multiply(spec.X(), differentiate(y, 2)), multiply(spec.Y(), differentiate(y, 1))),
             multiply(spec.Z(), y));
}

MatR ode_matrix(const OdeSpec& spec, int n, int rows) {
  MatR m = MatR::Zero(rows, n + 1);
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k <= n; ++k) {
      real entry(0);
      const int ia = r - k + 2;
      const int ib = r - k + 1;
      const int ic = r - k;
      if (ia >= 0 && ia <= 4) entry += real(k) * real(k - 1) * spec.a[ia];
      if (ib >= 0 && ib <= 3) entry += real(k) * spec.b[ib];
      if (ic >= 0 && ic <= 2) entry += spec.c[ic];
      m(r, k) = entry;
    }
  }
  return m;
}

real degree_leak(const OdeSpec& spec, int n) {
  MatR full = ode_matrix(spec, n, n + 3);
  real leak(0);
  for (int r = n + 1; r <= n + 2; ++r)
    for (int k = 0; k <= n; ++k) leak = std::max(leak, abs(full(r, k)));
  return leak;
}

}  // namespace qes
