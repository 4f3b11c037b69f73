#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "corrdyn/errors.hpp"
#include "corrdyn/roots.hpp"
#include "test_util.hpp"

using namespace corrdyn;
using namespace corrdyn::testutil;

namespace {

HomUnivariate from_affine_roots(const std::vector<cdouble>& roots, cdouble lead = 1.0) {
  std::vector<cdouble> c{lead};
  for (const auto& r : roots) {
    std::vector<cdouble> next(c.size() + 1, cdouble(0.0));
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= c[k] * r;
    }
    c = std::move(next);
  }
  HomUnivariate p;
  p.degree = static_cast<int>(c.size()) - 1;
  p.c = std::move(c);
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("roots");

TEST_CASE("reference root sets") {
  HomUnivariate p1;  // z^2 - 1
  p1.degree = 2;
  p1.c = {-1.0, 0.0, 1.0};
  auto r1 = roots_homogeneous(p1);
  REQUIRE(r1.roots.size() == 2);
  CHECK(r1.total_multiplicity() == 2);

  HomUnivariate p2;  // z^2 (double root at 0)
  p2.degree = 2;
  p2.c = {0.0, 0.0, 1.0};
  auto r2 = roots_homogeneous(p2);
  REQUIRE(r2.roots.size() == 1);
  CHECK(r2.roots[0].multiplicity == 2);
  CHECK(chordal(r2.roots[0].point, ProjPoint::affine(0.0)) < 1e-12);

  HomUnivariate p3;  // z1 z0: one root at 0, one at infinity
  p3.degree = 2;
  p3.c = {0.0, 1.0, 0.0};
  auto r3 = roots_homogeneous(p3);
  REQUIRE(r3.roots.size() == 2);
  CHECK(r3.total_multiplicity() == 2);
  bool has0 = false, hasInf = false;
  for (const auto& r : r3.roots) {
    if (chordal(r.point, ProjPoint::affine(0.0)) < 1e-12) has0 = true;
    if (chordal(r.point, ProjPoint::infinity()) < 1e-12) hasInf = true;
  }
  CHECK(has0);
  CHECK(hasInf);
}

TEST_CASE("zero polynomial raises") {
  HomUnivariate z;
  z.degree = 3;
  z.c = {0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(roots_homogeneous(z), ZeroPolynomial);
}

TEST_CASE("reconstruction of planted simple roots") {
  SplitMix64 g(2024);
  for (int trial = 0; trial < 300; ++trial) {
    int d = 2 + static_cast<int>(g.next() % 9);
    std::vector<cdouble> roots;
    int guard = 0;
    while (static_cast<int>(roots.size()) < d && guard < 1000) {
      ++guard;
      cdouble cand = rand_unit_disk(g, 2.0);
      bool ok = true;
      for (const auto& r : roots)
        if (chordal(ProjPoint::affine(cand), ProjPoint::affine(r)) < 0.05) ok = false;
      if (ok) roots.push_back(cand);
    }
    if (static_cast<int>(roots.size()) < d) continue;
    auto rs = roots_homogeneous(from_affine_roots(roots));
    CHECK(rs.total_multiplicity() == d);
    for (const auto& r : roots) {
      double best = 2.0;
      for (const auto& e : rs.roots)
        best = std::min(best, chordal(e.point, ProjPoint::affine(r)));
      CHECK(best < 1e-7);
    }
  }
}

TEST_CASE("multiplicity conservation with planted double and triple roots") {
  SplitMix64 g(515);
  int total_trials = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    int style = static_cast<int>(g.next() % 3);
    std::vector<cdouble> roots;
    cdouble base = rand_unit_disk(g, 1.5);
    cdouble other = base + cdouble(1.0, 0.7);
    if (style == 0) {
      int d = 1 + static_cast<int>(g.next() % 6);
      for (int k = 0; k < d; ++k) roots.push_back(rand_unit_disk(g, 2.0));
    } else if (style == 1) {
      roots = {base, base, other};
    } else {
      roots = {base, base, base, other};
    }
    auto rs = roots_homogeneous(from_affine_roots(roots));
    CHECK(rs.total_multiplicity() == static_cast<int>(roots.size()));
    ++total_trials;
  }
  CHECK(total_trials == 10000);
}

TEST_CASE("planted multiple roots are recovered as clusters") {
  SplitMix64 g(8181);
  for (int trial = 0; trial < 200; ++trial) {
    cdouble a = rand_unit_disk(g, 1.2);
    cdouble b = a + std::polar(1.0 + g.next_double(), 6.28 * g.next_double());
    auto rs = roots_homogeneous(from_affine_roots({a, a, a, b}));
    bool found_triple = false;
    for (const auto& e : rs.roots)
      if (e.multiplicity == 3 && chordal(e.point, ProjPoint::affine(a)) < 1e-7)
        found_triple = true;
    CHECK(found_triple);
  }
}

TEST_CASE("scale invariance") {
  SplitMix64 g(321);
  for (int trial = 0; trial < 200; ++trial) {
    int d = 2 + static_cast<int>(g.next() % 6);
    HomUnivariate p;
    p.degree = d;
    p.c.resize(d + 1);
    for (auto& v : p.c) v = cdouble(2.0 * g.next_double() - 1.0, 2.0 * g.next_double() - 1.0);
    double mag = std::pow(10.0, -6.0 + 12.0 * g.next_double());
    cdouble lam = std::polar(mag, 6.28 * g.next_double());
    HomUnivariate q = p;
    for (auto& v : q.c) v *= lam;
    auto rp = roots_homogeneous(p);
    auto rq = roots_homogeneous(q);
    REQUIRE(rp.roots.size() == rq.roots.size());
    for (std::size_t k = 0; k < rp.roots.size(); ++k) {
      CHECK(chordal(rp.roots[k].point, rq.roots[k].point) < 1e-12);
      CHECK(rp.roots[k].multiplicity == rq.roots[k].multiplicity);
    }
  }
}

TEST_CASE("simple-root residuals after normalization") {
  SplitMix64 g(6262);
  for (int trial = 0; trial < 200; ++trial) {
    int d = 2 + static_cast<int>(g.next() % 7);
    HomUnivariate p;
    p.degree = d;
    p.c.resize(d + 1);
    for (auto& v : p.c) v = cdouble(2.0 * g.next_double() - 1.0, 2.0 * g.next_double() - 1.0);
    double mx = 0.0;
    for (auto& v : p.c) mx = std::max(mx, std::abs(v));
    for (auto& v : p.c) v /= mx;
    auto rs = roots_homogeneous(p);
    for (const auto& e : rs.roots)
      if (e.multiplicity == 1) CHECK(std::abs(hom_eval(p, e.point)) < 1e-7);
  }
}

TEST_SUITE_END();
