#pragma once

#include <complex>
#include <vector>

#include "corrdyn/chain.hpp"
#include "corrdyn/poly.hpp"
#include "corrdyn/rng.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn::testutil {

struct Term {
  int i, j;
  cdouble v;
};

// Bihomogeneous polynomial from monomial terms: v * z1^i z0^(dz-i) w1^j w0^(dw-j).
inline BihomPoly make_poly(int dz, int dw, std::initializer_list<Term> terms) {
  std::vector<cdouble> c((dz + 1) * (dw + 1), cdouble(0.0));
  for (const auto& t : terms) c[t.i * (dw + 1) + t.j] = t.v;
  return BihomPoly::from_coeffs(dz, dw, std::move(c));
}

// Affine-notation building blocks used throughout the suite.
// w - z^2 : bidegree (2,1), w1 z0^2 - w0 z1^2
inline BihomPoly poly_w_minus_z2() {
  return make_poly(2, 1, {{0, 1, 1.0}, {2, 0, -1.0}});
}
// z w - 1 : bidegree (1,1), z1 w1 - z0 w0
inline BihomPoly poly_zw_minus_1() {
  return make_poly(1, 1, {{1, 1, 1.0}, {0, 0, -1.0}});
}
// z^2 w^2 - 1
inline BihomPoly poly_z2w2_minus_1() {
  return make_poly(2, 2, {{2, 2, 1.0}, {0, 0, -1.0}});
}
// z - w^2 : bidegree (1,2), z1 w0^2 - z0 w1^2
inline BihomPoly poly_z_minus_w2() {
  return make_poly(1, 2, {{1, 0, 1.0}, {0, 2, -1.0}});
}
// z - w^3
inline BihomPoly poly_z_minus_w3() {
  return make_poly(1, 3, {{1, 0, 1.0}, {0, 3, -1.0}});
}

inline Chain chain_of(BihomPoly p, int mult = 1) {
  return Chain::from_components({{std::move(p), mult}}, true);
}

// Proportionality up to a unit scalar after max-modulus normalization.
inline double unit_scalar_distance(const BihomPoly& a, const BihomPoly& b) {
  if (a.dz != b.dz || a.dw != b.dw) return 2.0;
  int pivot = 0;
  double best = 0.0;
  for (int k = 0; k < static_cast<int>(a.c.size()); ++k)
    if (std::abs(a.c[k]) > best) {
      best = std::abs(a.c[k]);
      pivot = k;
    }
  if (std::abs(b.c[pivot]) == 0.0) return 2.0;
  cdouble phase = b.c[pivot] / a.c[pivot];
  phase /= std::abs(phase);
  double err = 0.0;
  for (int k = 0; k < static_cast<int>(a.c.size()); ++k)
    err = std::max(err, std::abs(a.c[k] * phase - b.c[k]));
  return err;
}

inline cdouble rand_unit_disk(SplitMix64& g, double radius = 1.0) {
  for (;;) {
    double x = 2.0 * g.next_double() - 1.0;
    double y = 2.0 * g.next_double() - 1.0;
    if (x * x + y * y <= 1.0) return cdouble(radius * x, radius * y);
  }
}

// Uniform point on the sphere (FS measure), deterministic given the stream.
inline ProjPoint rand_sphere_point(SplitMix64& g) {
  double t = 2.0 * g.next_double() - 1.0;
  double phi = 2.0 * std::numbers::pi * g.next_double();
  double r = std::sqrt(std::max(0.0, 1.0 - t * t));
  return ProjPoint::from_sphere({r * std::cos(phi), r * std::sin(phi), t});
}

inline BihomPoly rand_dense_poly(SplitMix64& g, int dz, int dw) {
  std::vector<cdouble> c((dz + 1) * (dw + 1));
  for (auto& v : c) v = cdouble(2.0 * g.next_double() - 1.0, 2.0 * g.next_double() - 1.0);
  return BihomPoly::from_coeffs(dz, dw, std::move(c));
}

}  // namespace corrdyn::testutil
