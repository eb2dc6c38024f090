// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the qes authors
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "qes/explorer.h"

namespace {

using qes::cplx;
using qes::real;

qes::AxisSpec axis(const char* name, double lo, double hi, int steps) {
  qes::AxisSpec a;
  a.name = name;
  a.lo = real(lo);
  a.hi = real(hi);
  a.steps = steps;
  return a;
}

/// Layers grouped by grid point, in record order.
std::map<std::pair<double, double>, std::vector<qes::ScanRecord>> by_point(
    const qes::ScanSurface& s) {
  std::map<std::pair<double, double>, std::vector<qes::ScanRecord>> out;
  for (const auto& r : s.records)
    out[{qes::to_double(r.axis1), qes::to_double(r.axis2)}].push_back(r);
  return out;
}

}  // namespace

TEST_SUITE("explorer") {

TEST_CASE("sextic surface: full real layer stack, contiguous and ascending") {
  qes::ScanOptions opt;
  opt.axis1 = axis("beta", -1.0, 1.0, 3);
  opt.axis2 = axis("gamma", 0.5, 1.5, 2);
  qes::ScanSurface s = qes::scan(qes::Family::sextic, 2, 0, opt);
  auto groups = by_point(s);
  CHECK(groups.size() == 6);
  for (const auto& [pt, recs] : groups) {
    REQUIRE(recs.size() == 3);  // layer count is exactly n+1 here, never more
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(recs[i].layer == static_cast<int>(i));
      CHECK(recs[i].cls == qes::ScanClass::real_layer);
      if (i > 0) CHECK(recs[i].value > recs[i - 1].value);
    }
  }
}

TEST_CASE("invalid grid columns contribute no records") {
  qes::ScanOptions opt;
  opt.axis1 = axis("delta", -1.0, 1.0, 3);  // middle point is delta = 0
  opt.axis2 = axis("omega", 1.0, 2.0, 2);
  qes::ScanSurface s = qes::scan(qes::Family::nonpoly, 1, 0, opt);
  auto groups = by_point(s);
  for (const auto& [pt, recs] : groups) {
    CHECK(pt.first != 0.0);
    CHECK(recs.size() <= 2);
  }
  // Both nonzero-delta columns did produce layers.
  bool neg = false, pos = false;
  for (const auto& [pt, recs] : groups) (pt.first < 0 ? neg : pos) = true;
  CHECK(neg);
  CHECK(pos);
}

TEST_CASE("scan layers at a grid point reproduce the closed-form surds") {
  {
    qes::ScanOptions opt;
    opt.axis1 = axis("d", 0.5, 1.0, 2);
    opt.axis2 = axis("e", 1.0, 2.0, 2);
    qes::ScanSurface s = qes::scan(qes::Family::singular, 1, 0, opt);
    auto groups = by_point(s);
    auto it = groups.find({0.5, 1.0});
    REQUIRE(it != groups.end());
    qes::SingularParams sg;
    sg.e = real(1);
    sg.d = real(0.5);
    sg.n = 1;
    for (const auto& b : qes::closed_form_level(sg)) {
      bool found = false;
      for (const auto& r : it->second)
        if (r.cls == qes::ScanClass::real_layer &&
            abs(r.value - b.solved_value) <= real(1e-8) * (real(1) + abs(b.solved_value)))
          found = true;
      CHECK(found);
    }
  }
  {
    qes::ScanOptions opt;
    opt.axis1 = axis("delta", 0.8, 1.6, 2);
    opt.axis2 = axis("omega", 1.2, 2.4, 2);
    qes::ScanSurface s = qes::scan(qes::Family::nonpoly, 1, 1, opt);
    auto groups = by_point(s);
    auto it = groups.find({0.8, 1.2});
    REQUIRE(it != groups.end());
    qes::NonPolyParams np;
    np.omega = real(1.2);
    np.delta = real(0.8);
    np.n = 1;
    np.p = 1;
    for (const auto& b : qes::closed_form_level(np)) {
      bool found = false;
      for (const auto& r : it->second)
        if (r.cls == qes::ScanClass::real_layer &&
            abs(r.value - b.solved_value) <= real(1e-8) * (real(1) + abs(b.solved_value)))
          found = true;
      CHECK(found);
    }
  }
}

TEST_CASE("singular omega layers are invariant under the exact e-reflection") {
  // The mapped equation depends on e only through g = e/sqrt(2d), and the
  // layer polynomial is invariant under g -> -(2n+2) - g; at d = 1/2 and
  // n = 1 this sends e to -e - 4.
  auto layers_at = [](double e_val) {
    qes::SingularParams sg;
    sg.e = real(e_val);
    sg.d = real(0.5);
    sg.n = 1;
    auto results = qes::solve_pencil(qes::build_pencil(sg));
    std::vector<real> out;
    for (const auto& r : results)
      if (r.classification == qes::Classification::real_eigenvalue)
        out.push_back(r.eigenvalue.real());
    return out;
  };
  for (double e_val : {1.0, 2.5, -0.7}) {
    auto a = layers_at(e_val);
    auto b = layers_at(-e_val - 4.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(abs(a[i] - b[i]) <= real(1e-8) * (real(1) + abs(a[i])));
  }
}

TEST_CASE("root clouds of the sextic level 1 match the closed-form branches") {
  qes::SexticParams sx;
  sx.beta = real(0.9);
  sx.gamma = real(1.7);
  sx.n = 1;
  sx.p = 0;
  qes::ModelInstance m = qes::on_qes_locus(sx);
  auto clouds = qes::root_cloud(m);
  auto branches = qes::closed_form_level(m);
  REQUIRE(clouds.size() == 2);
  CHECK(clouds[0].branch < clouds[1].branch);  // sorted by branch value
  for (const auto& b : branches) {
    bool found = false;
    for (const auto& c : clouds) {
      if (abs(c.branch - b.E) > real(1e-8) * (real(1) + abs(b.E))) continue;
      REQUIRE(c.points.size() == 1);
      if (abs(c.points[0] - b.roots.roots[0]) <= real(1e-8)) found = true;
      CHECK(!c.refinement_failed);
      CHECK(c.bae_residual <= real(1e-6));
    }
    CHECK(found);
  }
}

TEST_CASE("kink clouds at nu = -1/3 contain the exact level-2 roots") {
  qes::KinkParams k;
  k.mu = real(1);
  k.nu = real(-1) / 3;
  k.n = 2;
  k.p = 0;
  auto clouds = qes::root_cloud(k);
  REQUIRE(!clouds.empty());
  const real r2 = sqrt(real(2));
  std::vector<cplx> expect{cplx((8 - 12 * r2) / 21), cplx((8 + 12 * r2) / 21)};
  bool found = false;
  for (const auto& c : clouds) {
    if (c.points.size() != 2) continue;
    if (qes::assignment_distance(c.points, expect) <= real(1e-8)) found = true;
  }
  CHECK(found);
  // Every cloud is closed under conjugation and satisfies the root equations.
  for (const auto& c : clouds) {
    CHECK(c.bae_residual <= real(1e-6));
    std::vector<cplx> conj_pts;
    for (const auto& z : c.points) conj_pts.push_back(conj(z));
    if (!c.points.empty())
      CHECK(qes::assignment_distance(c.points, conj_pts) <= real(1e-6));
  }
}

TEST_CASE("the kink family rejects layer scans") {
  CHECK_THROWS_AS((void)qes::scan(qes::Family::kink, 1, 0, {}), qes::validation_error);
  CHECK_THROWS_AS((void)qes::scan(qes::Family::sextic, -1, 0, {}), qes::validation_error);
  CHECK_THROWS_AS((void)qes::scan(qes::Family::sextic, 1, 2, {}), qes::validation_error);
  CHECK_THROWS_AS((void)qes::scan(qes::Family::singular, 1, 1, {}), qes::validation_error);
}

TEST_CASE("emitters: exact headers, header-only empty cloud, json mirror") {
  qes::SexticParams sx;
  sx.n = 0;
  sx.p = 0;
  sx.gamma = real(1);
  auto clouds = qes::root_cloud(qes::on_qes_locus(sx));
  std::string csv = qes::render(clouds, qes::EmitFormat::csv);
  CHECK(csv == "model,n,p,branch,re,im\n");  // level 0 has no roots at all
  std::string js = qes::render(clouds, qes::EmitFormat::json);
  CHECK(nlohmann::json::parse(js)["records"].size() == 0);

  qes::ScanOptions opt;
  opt.axis1 = axis("beta", -1.0, 1.0, 2);
  opt.axis2 = axis("gamma", 1.0, 2.0, 2);
  qes::ScanSurface s = qes::scan(qes::Family::sextic, 1, 0, opt);
  std::string scsv = qes::render(s, qes::EmitFormat::csv);
  CHECK(scsv.rfind("model,n,p,axis1,axis2,layer,value,classification\n", 0) == 0);
  auto parsed = nlohmann::json::parse(qes::render(s, qes::EmitFormat::json));
  REQUIRE(parsed["records"].size() == s.records.size());
  const auto& rec0 = parsed["records"][0];
  CHECK(rec0["model"] == "sextic");
  CHECK(rec0["n"] == 1);
  CHECK(rec0["p"] == 0);
  CHECK(rec0["layer"] == s.records[0].layer);
  CHECK(rec0["classification"] == qes::scan_class_name(s.records[0].cls));
  CHECK(rec0["value"].get<double>() == qes::to_double(s.records[0].value));
}

TEST_CASE("seventeen significant digits round-trip to the exact double") {
  for (double v : {1.0 / 3.0, 12.575877125495688, -2.2250738585072014e-308,
                   1e-17, 0.0, -5.5, 98765.432109876543, 3817.3948855701358}) {
    std::string t = qes::format_sig17(real(v));
    CHECK(std::strtod(t.c_str(), nullptr) == v);
  }
}

TEST_CASE("scan and render are byte-identical across repeated runs") {
  qes::ScanOptions opt;
  opt.axis1 = axis("d", 0.5, 1.5, 2);
  opt.axis2 = axis("e", -1.0, 1.0, 2);
  opt.seed = 7;
  std::string a = qes::render(qes::scan(qes::Family::singular, 2, 0, opt),
                              qes::EmitFormat::csv);
  std::string b = qes::render(qes::scan(qes::Family::singular, 2, 0, opt),
                              qes::EmitFormat::csv);
  CHECK(a == b);
  qes::KinkParams k;
  k.nu = real(-0.5);
  k.n = 2;
  k.p = 1;
  qes::SolveOptions sopt;
  sopt.seed = 7;
  std::string ca = qes::render(qes::root_cloud(k, sopt), qes::EmitFormat::csv);
  std::string cb = qes::render(qes::root_cloud(k, sopt), qes::EmitFormat::csv);
  CHECK(ca == cb);
  CHECK(ca.rfind("model,n,p,branch,re,im\n", 0) == 0);
  CHECK(ca.size() > std::string("model,n,p,branch,re,im\n").size());
}

TEST_CASE("locus substitution pins alpha to the solvable value") {
  qes::SexticParams sx;
  sx.beta = real(2);
  sx.gamma = real(4);
  sx.n = 2;
  sx.p = 1;
  auto m = qes::on_qes_locus(sx);
  const auto& got = std::get<qes::SexticParams>(m);
  // beta^2/(4 gamma) - (3 + 4n + 2p) sqrt(gamma) = 1/4 - 26.
  CHECK(abs(got.alpha - (real(0.25) - real(26))) <= real(1e-25));
  CHECK(qes::degree_leak(qes::ode_spec(m), 2) <= real(1e-18));
}

}  // TEST_SUITE
