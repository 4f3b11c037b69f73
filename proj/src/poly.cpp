#include "corrdyn/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "corrdyn/errors.hpp"

namespace corrdyn {

namespace {
constexpr double kPi = std::numbers::pi;

// Complex determinant by LU with partial pivoting.
cdouble det_lu(std::vector<cdouble>& m, int n) {
  cdouble det(1.0);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(m[k * n + k]);
    for (int r = k + 1; r < n; ++r) {
      double v = std::abs(m[r * n + k]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) return cdouble(0.0);
    if (piv != k) {
      for (int c = 0; c < n; ++c) std::swap(m[k * n + c], m[piv * n + c]);
      det = -det;
    }
    det *= m[k * n + k];
    cdouble inv = 1.0 / m[k * n + k];
    for (int r = k + 1; r < n; ++r) {
      cdouble f = m[r * n + k] * inv;
      if (f == cdouble(0.0)) continue;
      for (int c = k + 1; c < n; ++c) m[r * n + c] -= f * m[k * n + c];
    }
  }
  return det;
}

// Sylvester determinant of p (degree m, asc coeffs) and q (degree n, asc).
cdouble sylvester_det(const std::vector<cdouble>& p, int m,
                      const std::vector<cdouble>& q, int n) {
  int size = m + n;
  std::vector<cdouble> mat(size * size, cdouble(0.0));
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) mat[r * size + r + k] = p[m - k];
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) mat[(n + r) * size + r + k] = q[n - k];
  return det_lu(mat, size);
}

}  // namespace

cdouble hom_eval(const HomUnivariate& p, const ProjPoint& x) {
  // sum_k c[k] b^k a^(d-k)
  cdouble acc(0.0);
  cdouble bp(1.0);
  std::vector<cdouble> bpow(p.degree + 1);
  for (int k = 0; k <= p.degree; ++k) {
    bpow[k] = bp;
    bp *= x.b;
  }
  cdouble ap(1.0);
  for (int k = p.degree; k >= 0; --k) {
    acc += p.c[k] * bpow[k] * ap;
    ap *= x.a;
  }
  return acc;
}

BihomPoly BihomPoly::from_coeffs(int dz, int dw, std::vector<cdouble> coeffs) {
  if (static_cast<int>(coeffs.size()) != (dz + 1) * (dw + 1))
    throw std::invalid_argument("BihomPoly: coefficient count does not match bidegree");
  double mx = 0.0;
  for (const auto& v : coeffs) mx = std::max(mx, std::abs(v));
  if (!(mx > 0.0)) throw ZeroPolynomial("BihomPoly: zero polynomial");
  double thr = kCoeffTrimRel * mx;
  auto alive_row = [&](int i) {
    for (int j = 0; j <= dw; ++j)
      if (std::abs(coeffs[i * (dw + 1) + j]) > thr) return true;
    return false;
  };
  auto alive_col = [&](int j) {
    for (int i = 0; i <= dz; ++i)
      if (std::abs(coeffs[i * (dw + 1) + j]) > thr) return true;
    return false;
  };
  int tz = dz, tw = dw;
  while (tz > 0 && !alive_row(tz)) --tz;
  while (tw > 0 && !alive_col(tw)) --tw;
  BihomPoly out;
  out.dz = tz;
  out.dw = tw;
  out.c.resize((tz + 1) * (tw + 1));
  // Skip the division when already normalized so re-normalization is
  // bit-stable (file round-trips must not drift).
  bool unit = std::abs(mx - 1.0) <= 1e-12;
  for (int i = 0; i <= tz; ++i)
    for (int j = 0; j <= tw; ++j) {
      cdouble v = coeffs[i * (dw + 1) + j];
      out.c[i * (tw + 1) + j] = std::abs(v) > thr ? (unit ? v : v / mx) : cdouble(0.0);
    }
  return out;
}

BihomPoly BihomPoly::from_coeffs_trusted(int dz, int dw, std::vector<cdouble> coeffs) {
  if (static_cast<int>(coeffs.size()) != (dz + 1) * (dw + 1))
    throw std::invalid_argument("BihomPoly: coefficient count does not match bidegree");
  double mx = 0.0;
  for (const auto& v : coeffs) mx = std::max(mx, std::abs(v));
  if (!(mx > 0.0)) throw ZeroPolynomial("BihomPoly: zero polynomial");
  auto row_alive = [&](int i) {
    for (int j = 0; j <= dw; ++j)
      if (std::abs(coeffs[i * (dw + 1) + j]) > 0.0) return true;
    return false;
  };
  auto col_alive = [&](int j) {
    for (int i = 0; i <= dz; ++i)
      if (std::abs(coeffs[i * (dw + 1) + j]) > 0.0) return true;
    return false;
  };
  if (!row_alive(dz) || !col_alive(dw))
    throw ZeroPolynomial("BihomPoly: declared bidegree has an empty top row or column");
  BihomPoly out;
  out.dz = dz;
  out.dw = dw;
  out.c = std::move(coeffs);
  if (std::abs(mx - 1.0) > 1e-12)
    for (auto& v : out.c) v /= mx;
  return out;
}

BihomPoly BihomPoly::transposed() const {
  BihomPoly out;
  out.dz = dw;
  out.dw = dz;
  out.c.resize(c.size());
  for (int i = 0; i <= dz; ++i)
    for (int j = 0; j <= dw; ++j) out.c[j * (dz + 1) + i] = at(i, j);
  return out;
}

BihomPoly BihomPoly::flipped_z() const {
  BihomPoly out = *this;
  for (int i = 0; i <= dz; ++i)
    for (int j = 0; j <= dw; ++j) out.c[(dz - i) * (dw + 1) + j] = at(i, j);
  return out;
}

double BihomPoly::max_coeff() const {
  double mx = 0.0;
  for (const auto& v : c) mx = std::max(mx, std::abs(v));
  return mx;
}

cdouble eval(const BihomPoly& p, const ProjPoint& z, const ProjPoint& w) {
  std::vector<cdouble> zb(p.dz + 1), za(p.dz + 1), wb(p.dw + 1), wa(p.dw + 1);
  zb[0] = za[0] = wb[0] = wa[0] = cdouble(1.0);
  for (int i = 1; i <= p.dz; ++i) {
    zb[i] = zb[i - 1] * z.b;
    za[i] = za[i - 1] * z.a;
  }
  for (int j = 1; j <= p.dw; ++j) {
    wb[j] = wb[j - 1] * w.b;
    wa[j] = wa[j - 1] * w.a;
  }
  cdouble acc(0.0);
  for (int i = 0; i <= p.dz; ++i) {
    cdouble zi = zb[i] * za[p.dz - i];
    for (int j = 0; j <= p.dw; ++j) acc += p.at(i, j) * zi * wb[j] * wa[p.dw - j];
  }
  return acc;
}

HomUnivariate fiber_poly_z(const BihomPoly& p, const ProjPoint& w) {
  HomUnivariate out;
  out.degree = p.dz;
  out.c.assign(p.dz + 1, cdouble(0.0));
  std::vector<cdouble> wb(p.dw + 1), wa(p.dw + 1);
  wb[0] = wa[0] = cdouble(1.0);
  for (int j = 1; j <= p.dw; ++j) {
    wb[j] = wb[j - 1] * w.b;
    wa[j] = wa[j - 1] * w.a;
  }
  // The fiber is identically zero only if every coefficient row cancels
  // relative to its own achievable magnitude (rows may carry wildly
  // different scales).
  bool all_cancelled = true;
  for (int i = 0; i <= p.dz; ++i) {
    cdouble acc(0.0);
    double rs = 0.0;
    for (int j = 0; j <= p.dw; ++j) {
      cdouble term = p.at(i, j) * wb[j] * wa[p.dw - j];
      acc += term;
      rs += std::abs(term);
    }
    out.c[i] = acc;
    if (std::abs(acc) > 1e-12 * rs && rs > 0.0) all_cancelled = false;
  }
  if (all_cancelled)
    throw IdenticallyZeroFiber("fiber polynomial identically zero (line component)");
  return out;
}

HomUnivariate fiber_poly_w(const BihomPoly& p, const ProjPoint& z) {
  return fiber_poly_z(p.transposed(), z);
}

BihomPoly resultant_mid(const BihomPoly& p1, const BihomPoly& p2) {
  if (p1.dw < 1 || p2.dz < 1)
    throw std::invalid_argument("resultant_mid: middle-variable degrees must be >= 1");
  const int m = p1.dw;  // degree of P1 in the eliminated variable
  const int n = p2.dz;  // degree of P2 in the eliminated variable
  const int dz_bound = p1.dz * n;
  const int dw_bound = p2.dw * m;
  // Oversampled roots-of-unity grids (factor 2), radius 1.
  const int Nz = 2 * (dz_bound + 1);
  const int Nw = 2 * (dw_bound + 1);

  std::vector<cdouble> znodes(Nz), wnodes(Nw);
  for (int k = 0; k < Nz; ++k)
    znodes[k] = std::polar(1.0, 2.0 * kPi * k / Nz);
  for (int l = 0; l < Nw; ++l)
    wnodes[l] = std::polar(1.0, 2.0 * kPi * l / Nw);

  // Middle-variable coefficient vectors at the affine nodes.
  // P1(z, y): a_i(z) = sum_s c1[s][i] z^s; P2(y, w): b_i(w) = sum_t c2[i][t] w^t.
  std::vector<std::vector<cdouble>> acoef(Nz, std::vector<cdouble>(m + 1));
  for (int k = 0; k < Nz; ++k) {
    cdouble zp(1.0);
    for (int i = 0; i <= m; ++i) acoef[k][i] = cdouble(0.0);
    for (int s = 0; s <= p1.dz; ++s) {
      for (int i = 0; i <= m; ++i) acoef[k][i] += p1.at(s, i) * zp;
      zp *= znodes[k];
    }
  }
  std::vector<std::vector<cdouble>> bcoef(Nw, std::vector<cdouble>(n + 1));
  for (int l = 0; l < Nw; ++l) {
    cdouble wp(1.0);
    for (int i = 0; i <= n; ++i) bcoef[l][i] = cdouble(0.0);
    for (int t = 0; t <= p2.dw; ++t) {
      for (int i = 0; i <= n; ++i) bcoef[l][i] += p2.at(i, t) * wp;
      wp *= wnodes[l];
    }
  }

  std::vector<cdouble> values(Nz * Nw);
  double vmax = 0.0;
  for (int k = 0; k < Nz; ++k)
    for (int l = 0; l < Nw; ++l) {
      cdouble d = sylvester_det(acoef[k], m, bcoef[l], n);
      values[k * Nw + l] = d;
      vmax = std::max(vmax, std::abs(d));
    }
  if (vmax <= 1e-12)
    throw DegenerateResultant("resultant identically zero (shared component)");

  // Separable inverse DFT: first along w, then along z.
  std::vector<cdouble> partial(Nz * (dw_bound + 1));
  for (int k = 0; k < Nz; ++k)
    for (int b = 0; b <= dw_bound; ++b) {
      cdouble acc(0.0);
      for (int l = 0; l < Nw; ++l)
        acc += values[k * Nw + l] * std::polar(1.0, -2.0 * kPi * b * l / Nw);
      partial[k * (dw_bound + 1) + b] = acc / static_cast<double>(Nw);
    }
  std::vector<cdouble> coeffs((dz_bound + 1) * (dw_bound + 1));
  for (int a = 0; a <= dz_bound; ++a)
    for (int b = 0; b <= dw_bound; ++b) {
      cdouble acc(0.0);
      for (int k = 0; k < Nz; ++k)
        acc += partial[k * (dw_bound + 1) + b] * std::polar(1.0, -2.0 * kPi * a * k / Nz);
      coeffs[a * (dw_bound + 1) + b] = acc / static_cast<double>(Nz);
    }
  return BihomPoly::from_coeffs(dz_bound, dw_bound, std::move(coeffs));
}

BihomPoly hom_partial_z1(const BihomPoly& p) {
  if (p.dz < 1) throw std::invalid_argument("hom_partial_z1: dz must be >= 1");
  std::vector<cdouble> out(p.dz * (p.dw + 1), cdouble(0.0));
  for (int i = 0; i < p.dz; ++i)
    for (int j = 0; j <= p.dw; ++j)
      out[i * (p.dw + 1) + j] = static_cast<double>(i + 1) * p.at(i + 1, j);
  return BihomPoly::from_coeffs(p.dz - 1, p.dw, std::move(out));
}

BihomPoly hom_partial_z0(const BihomPoly& p) {
  if (p.dz < 1) throw std::invalid_argument("hom_partial_z0: dz must be >= 1");
  std::vector<cdouble> out(p.dz * (p.dw + 1), cdouble(0.0));
  for (int i = 0; i < p.dz; ++i)
    for (int j = 0; j <= p.dw; ++j)
      out[i * (p.dw + 1) + j] = static_cast<double>(p.dz - i) * p.at(i, j);
  return BihomPoly::from_coeffs(p.dz - 1, p.dw, std::move(out));
}

BihomPoly partial_z(const BihomPoly& p) { return hom_partial_z1(p); }

BihomPoly partial_w(const BihomPoly& p) {
  return hom_partial_z1(p.transposed()).transposed();
}

HomUnivariate discriminant_w(const BihomPoly& p) {
  if (p.dz <= 1) return HomUnivariate::constant(cdouble(1.0));
  BihomPoly d0 = hom_partial_z0(p);
  BihomPoly d1 = hom_partial_z1(p);
  // Both have formal z-degree dz-1; if trimming dropped either one below it,
  // pad the coefficient rows back up so the Sylvester structure is correct.
  const int dd = p.dz - 1;
  auto rows = [&](const BihomPoly& q) {
    std::vector<std::vector<cdouble>> r(dd + 1, std::vector<cdouble>(q.dw + 1, cdouble(0.0)));
    for (int i = 0; i <= q.dz && i <= dd; ++i)
      for (int j = 0; j <= q.dw; ++j) r[i][j] = q.at(i, j);
    return r;
  };
  auto r0 = rows(d0), r1 = rows(d1);
  const int wdeg = (2 * p.dz - 2) * p.dw;
  const int Nw = 2 * (wdeg + 1);
  std::vector<cdouble> vals(Nw);
  double vmax = 0.0;
  for (int l = 0; l < Nw; ++l) {
    cdouble w = std::polar(1.0, 2.0 * kPi * l / Nw);
    std::vector<cdouble> a(dd + 1, cdouble(0.0)), b(dd + 1, cdouble(0.0));
    cdouble wp(1.0);
    for (int t = 0; t <= p.dw; ++t) {
      for (int i = 0; i <= dd; ++i) {
        if (t < static_cast<int>(r0[i].size())) a[i] += r0[i][t] * wp;
        if (t < static_cast<int>(r1[i].size())) b[i] += r1[i][t] * wp;
      }
      wp *= w;
    }
    vals[l] = sylvester_det(a, dd, b, dd);
    vmax = std::max(vmax, std::abs(vals[l]));
  }
  if (vmax <= 1e-12)
    throw DegenerateResultant("discriminant identically zero (repeated component factor)");
  HomUnivariate out;
  out.degree = wdeg;
  out.c.assign(wdeg + 1, cdouble(0.0));
  for (int b = 0; b <= wdeg; ++b) {
    cdouble acc(0.0);
    for (int l = 0; l < Nw; ++l)
      acc += vals[l] * std::polar(1.0, -2.0 * kPi * b * l / Nw);
    out.c[b] = acc / static_cast<double>(Nw);
  }
  double mx = 0.0;
  for (auto& v : out.c) mx = std::max(mx, std::abs(v));
  for (auto& v : out.c)
    if (std::abs(v) <= kCoeffTrimRel * mx) v = cdouble(0.0);
  for (auto& v : out.c) v /= mx;
  return out;
}

BihomPoly graph_w_of_z(const std::vector<cdouble>& p) {
  int dp = static_cast<int>(p.size()) - 1;
  while (dp > 0 && std::abs(p[dp]) == 0.0) --dp;
  std::vector<cdouble> c((dp + 1) * 2, cdouble(0.0));
  c[0 * 2 + 1] = cdouble(1.0);  // w1 z0^dp
  for (int i = 0; i <= dp; ++i) c[i * 2 + 0] -= p[i];
  return BihomPoly::from_coeffs_trusted(dp, 1, std::move(c));
}

BihomPoly graph_z_of_w(const std::vector<cdouble>& q) {
  return graph_w_of_z(q).transposed();
}

}  // namespace corrdyn
