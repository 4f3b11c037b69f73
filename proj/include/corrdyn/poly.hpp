#pragma once

#include <vector>

#include "corrdyn/sphere.hpp"

namespace corrdyn {

// Homogeneous univariate polynomial on P^1: c[k] multiplies x1^k x0^(d-k),
// i.e. the affine polynomial sum c_k x^k with possible roots at infinity
// recorded by vanishing leading coefficients.
struct HomUnivariate {
  int degree = 0;
  std::vector<cdouble> c;  // size degree+1

  static HomUnivariate constant(cdouble v) { return {0, {v}}; }
};

cdouble hom_eval(const HomUnivariate& p, const ProjPoint& x);

// Bihomogeneous bivariate polynomial: coeff(i, j) multiplies
// z1^i z0^(dz-i) w1^j w0^(dw-j). Stored trimmed to exact bidegree and
// normalized to max coefficient modulus 1.
struct BihomPoly {
  int dz = 0;
  int dw = 0;
  std::vector<cdouble> c;  // row-major (dz+1) x (dw+1)

  cdouble& at(int i, int j) { return c[i * (dw + 1) + j]; }
  const cdouble& at(int i, int j) const { return c[i * (dw + 1) + j]; }

  // Trims trailing zero rows/columns (relative threshold), normalizes.
  // Throws ZeroPolynomial when everything is below threshold.
  static BihomPoly from_coeffs(int dz, int dw, std::vector<cdouble> coeffs);

  // Normalizes but keeps the declared bidegree verbatim (for exact inputs
  // whose coefficient spread would defeat the relative trim threshold).
  // Throws if the top row or top column is identically zero.
  static BihomPoly from_coeffs_trusted(int dz, int dw, std::vector<cdouble> coeffs);

  BihomPoly transposed() const;
  // Chart change z -> 1/z (swap of the homogeneous z coordinates).
  BihomPoly flipped_z() const;

  double max_coeff() const;
};

cdouble eval(const BihomPoly& p, const ProjPoint& z, const ProjPoint& w);

// Restriction to a fiber: the polynomial in z whose roots are
// {z : (z, w) on the curve}; formal degree dz. Throws IdenticallyZeroFiber.
HomUnivariate fiber_poly_z(const BihomPoly& p, const ProjPoint& w);
HomUnivariate fiber_poly_w(const BihomPoly& p, const ProjPoint& z);

// Res_y(P1(z, .), P2(., w)) eliminating P1's w slot against P2's z slot,
// computed by evaluation-interpolation on roots-of-unity grids with numeric
// Sylvester determinants. Throws DegenerateResultant when identically zero.
BihomPoly resultant_mid(const BihomPoly& p1, const BihomPoly& p2);

// Affine-chart partial derivatives, re-homogenized (degree drops by one).
BihomPoly partial_z(const BihomPoly& p);
BihomPoly partial_w(const BihomPoly& p);

// Homogeneous partials in the z coordinates (degree dz-1 in z); the affine
// partial_z equals hom_partial_z1.
BihomPoly hom_partial_z0(const BihomPoly& p);
BihomPoly hom_partial_z1(const BihomPoly& p);

// Polynomial in w whose roots contain every w where the z-fiber of p has a
// repeated root in P^1 (including at z = infinity): the binary-form
// discriminant Res_z(d/dz0 p, d/dz1 p). Returns the constant 1 when dz <= 1.
HomUnivariate discriminant_w(const BihomPoly& p);

// True iff the curve contains a vertical line {z*} x P^1 or a horizontal
// line P^1 x {w*} (forbidden for correspondence components).
bool has_line_factor(const BihomPoly& p, double tol = 1e-8);

// Graph builders for maps given by one-variable polynomial coefficients
// (ascending order): w = p(z) and z = q(w).
BihomPoly graph_w_of_z(const std::vector<cdouble>& p);
BihomPoly graph_z_of_w(const std::vector<cdouble>& q);

}  // namespace corrdyn
