// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the qes authors

#include <benchmark/benchmark.h>

#include <random>

#include "qes/bethe.h"
#include "qes/explorer.h"
#include "qes/poly.h"
#include "qes/spectral.h"

namespace {

using namespace qes;

Poly random_monic(int deg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  std::vector<cplx> roots;
  roots.reserve(static_cast<std::size_t>(deg));
  for (int i = 0; i < deg; ++i) roots.emplace_back(real(U(rng)), real(U(rng)));
  RootSet rs;
  rs.roots = std::move(roots);
  return from_roots(rs);
}

void bm_find_roots(benchmark::State& state) {
  const int deg = static_cast<int>(state.range(0));
  const Poly p = random_monic(deg, 17);
  for (auto _ : state) {
    auto rs = find_roots(p, 30);
    benchmark::DoNotOptimize(rs.roots.data());
  }
}
BENCHMARK(bm_find_roots)->Arg(5)->Arg(10)->Arg(20)->Arg(30);

ModelInstance sextic_instance(int n) {
  SexticParams s;
  s.alpha = real(0);
  s.beta = real(1);
  s.gamma = real(4);
  s.p = 0;
  s.n = n;
  return on_qes_locus(ModelInstance(s));
}

void bm_solve_pencil(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PencilProblem pr = build_pencil(sextic_instance(n));
  for (auto _ : state) {
    auto res = solve_pencil(pr);
    benchmark::DoNotOptimize(res.data());
  }
}
BENCHMARK(bm_solve_pencil)->Arg(4)->Arg(8)->Arg(16)->Arg(30);

void bm_bae_residual(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ModelInstance m = sextic_instance(n);
  const PencilProblem pr = build_pencil(m);
  auto res = solve_pencil(pr);
  SolveOptions so;
  RootSet roots;
  for (auto& r : res) {
    if (r.classification == Classification::real_eigenvalue) {
      roots = roots_from_coeffs(r, pr, so);
      break;
    }
  }
  const OdeSpec spec = ode_spec(m);
  for (auto _ : state) {
    auto v = bae_residual(spec, roots);
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(bm_bae_residual)->Arg(10)->Arg(30);

}  // namespace

BENCHMARK_MAIN();
