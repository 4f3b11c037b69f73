#include "corrdyn/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "corrdyn/errors.hpp"

namespace corrdyn {

namespace {

constexpr double kLeadZeroRel = 1e-10;

// p and p' at x by Horner.
void eval_with_deriv(const std::vector<cdouble>& c, cdouble x, cdouble& p, cdouble& dp) {
  int d = static_cast<int>(c.size()) - 1;
  p = c[d];
  dp = cdouble(0.0);
  for (int k = d - 1; k >= 0; --k) {
    dp = dp * x + p;
    p = p * x + c[k];
  }
}

double scale_at(const std::vector<cdouble>& c, double ax) {
  double s = 0.0, xp = 1.0;
  for (const auto& v : c) {
    s += std::abs(v) * xp;
    xp *= ax;
  }
  return s;
}

std::vector<cdouble> aberth(const std::vector<cdouble>& c) {
  int d = static_cast<int>(c.size()) - 1;
  std::vector<cdouble> x(d);
  if (d == 1) {
    x[0] = -c[0] / c[1];
    return x;
  }
  if (d == 2) {
    cdouble a = c[2], b = c[1], cc = c[0];
    cdouble sq = std::sqrt(b * b - 4.0 * a * cc);
    if ((std::conj(b) * sq).real() < 0.0) sq = -sq;
    cdouble q = -0.5 * (b + sq);
    x[0] = q / a;
    x[1] = std::abs(q) > 0.0 ? cc / q : cdouble(0.0);
    return x;
  }

  double lead = std::abs(c[d]);
  double ratio = 0.0;
  for (int k = 0; k < d; ++k) ratio = std::max(ratio, std::abs(c[k]) / lead);
  double r0 = std::pow(std::max(ratio, 1e-12), 1.0 / d);
  r0 = std::clamp(r0, 1e-3, 1e3);
  for (int k = 0; k < d; ++k) {
    double th = 2.0 * std::numbers::pi * k / d + 0.4 / d;
    x[k] = std::polar(r0 * (1.0 + 0.05 * k / d), th);
  }

  std::vector<bool> done(d, false);
  for (int it = 0; it < 400; ++it) {
    bool all = true;
    double shift = 0.0;
    for (int i = 0; i < d; ++i) {
      if (done[i]) continue;
      cdouble p, dp;
      eval_with_deriv(c, x[i], p, dp);
      double sc = scale_at(c, std::abs(x[i]));
      if (std::abs(p) <= 1e-15 * std::max(sc, 1e-280)) {
        done[i] = true;
        continue;
      }
      cdouble nw;
      if (std::abs(dp) > 0.0) {
        nw = p / dp;
      } else {
        nw = cdouble(1e-3, 1e-3) * (1.0 + std::abs(x[i]));
      }
      cdouble s(0.0);
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        cdouble diff = x[i] - x[j];
        if (std::abs(diff) < 1e-300)
          diff = cdouble(1e-12, 1e-12) * (1.0 + std::abs(x[i]));
        s += 1.0 / diff;
      }
      cdouble den = cdouble(1.0) - nw * s;
      cdouble w = std::abs(den) > 1e-12 ? nw / den : nw;
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) w = nw;
      x[i] -= w;
      double step = std::abs(w);
      shift = std::max(shift, step / (1.0 + std::abs(x[i])));
      if (step <= 1e-14 * (1.0 + std::abs(x[i]))) done[i] = true;
      else all = false;
    }
    if (all || shift <= 1e-15) break;
  }
  return x;
}

struct Approx {
  ProjPoint point;
  int multiplicity;
  double incl_radius;  // chordal inclusion radius (0 for exact deflated roots)
};

std::vector<cdouble> differentiate(std::vector<cdouble> q, int times) {
  for (int k = 0; k < times; ++k) {
    for (std::size_t i = 1; i < q.size(); ++i) q[i - 1] = q[i] * static_cast<double>(i);
    q.pop_back();
  }
  return q;
}

cdouble newton_polish(const std::vector<cdouble>& q, cdouble x) {
  for (int it = 0; it < 40; ++it) {
    cdouble pv, dv;
    eval_with_deriv(q, x, pv, dv);
    if (std::abs(dv) == 0.0) break;
    cdouble step = pv / dv;
    x -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) break;
  }
  return x;
}

// An m-fold root of p is a simple root of p^(m-1); Newton there recovers it to
// machine precision from the cluster centroid. Large roots are polished in the
// reciprocal chart.
ProjPoint polish_multiple(const std::vector<cdouble>& cc, const ProjPoint& center, int m) {
  cdouble x = center.affine_value();
  if (std::abs(x) <= 2.0) {
    cdouble y = newton_polish(differentiate(cc, m - 1), x);
    ProjPoint out = ProjPoint::affine(y);
    return chordal(out, center) < 1e-3 ? out : center;
  }
  std::vector<cdouble> rev(cc.rbegin(), cc.rend());
  cdouble y = newton_polish(differentiate(rev, m - 1), 1.0 / x);
  if (std::abs(y) < 1e-300) return center;
  ProjPoint out = ProjPoint(y, cdouble(1.0));
  return chordal(out, center) < 1e-3 ? out : center;
}

}  // namespace

RootSet roots_homogeneous(const HomUnivariate& p, double cluster_radius) {
  double scale = 0.0;
  for (const auto& v : p.c) scale = std::max(scale, std::abs(v));
  if (!(scale > 0.0)) throw ZeroPolynomial("roots_homogeneous: zero polynomial");

  std::vector<cdouble> c(p.c);
  for (auto& v : c) v /= scale;

  int d = p.degree;
  if (d == 1) {
    // exact homogeneous solution; no deflation threshold so fibers over
    // points far out in a chart keep their true (huge but finite) roots
    RootSet out;
    out.roots.push_back({ProjPoint(c[1], -c[0]), 1});
    return out;
  }
  double thr = kLeadZeroRel;
  int hi = d;
  while (hi > 0 && std::abs(c[hi]) <= thr) --hi;
  int lo = 0;
  while (lo < hi && std::abs(c[lo]) <= thr) ++lo;
  int mult_inf = d - hi;
  int mult_zero = lo;

  std::vector<Approx> approx;
  if (mult_zero > 0) approx.push_back({ProjPoint::affine(cdouble(0.0)), mult_zero, 0.0});
  if (mult_inf > 0) approx.push_back({ProjPoint::infinity(), mult_inf, 0.0});

  int da = hi - lo;
  if (da > 0) {
    std::vector<cdouble> cc(c.begin() + lo, c.begin() + hi + 1);
    std::vector<cdouble> xs = aberth(cc);
    for (const auto& x : xs) {
      cdouble pv, dv;
      eval_with_deriv(cc, x, pv, dv);
      double newton = std::abs(dv) > 0.0 ? std::abs(pv / dv) : 1.0;
      double incl = std::min(0.02, 3.0 * da * newton / (1.0 + std::norm(x)));
      approx.push_back({ProjPoint::affine(x), 1, incl});
    }
  } else if (approx.empty()) {
    // degree 0 after deflation with no deflated roots: constant polynomial
    return RootSet{};
  }

  // Cluster: union-find with radius max(cluster_radius, r_i + r_j).
  int m = static_cast<int>(approx.size());
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      double lim = std::max(cluster_radius, approx[i].incl_radius + approx[j].incl_radius);
      if (chordal(approx[i].point, approx[j].point) <= lim) parent[find(i)] = find(j);
    }

  std::vector<std::vector<int>> clusters(m);
  for (int i = 0; i < m; ++i) clusters[find(i)].push_back(i);

  RootSet out;
  for (const auto& cl : clusters) {
    if (cl.empty()) continue;
    int mult = 0;
    std::array<double, 3> mean{0.0, 0.0, 0.0};
    for (int i : cl) {
      mult += approx[i].multiplicity;
      auto sc = approx[i].point.sphere_coords();
      for (int k = 0; k < 3; ++k) mean[k] += approx[i].multiplicity * sc[k];
    }
    double nrm = std::sqrt(mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]);
    ProjPoint rep = approx[cl[0]].point;
    if (nrm > 1e-12) {
      for (auto& v : mean) v /= nrm;
      rep = ProjPoint::from_sphere(mean);
    }
    // exact deflated 0/infinity roots pin the representative
    bool pinned = false;
    for (int i : cl)
      if (approx[i].incl_radius == 0.0 &&
          approx[i].multiplicity >= mult - approx[i].multiplicity) {
        rep = approx[i].point;
        pinned = true;
      }
    if (!pinned && mult >= 2 && da > 0) rep = polish_multiple(
        std::vector<cdouble>(c.begin() + lo, c.begin() + hi + 1), rep, mult);
    out.roots.push_back({rep, mult});
  }

  std::sort(out.roots.begin(), out.roots.end(), [](const auto& l, const auto& r) {
    auto a = l.point.sphere_coords(), b = r.point.sphere_coords();
    if (a[2] != b[2]) return a[2] < b[2];
    if (a[0] != b[0]) return a[0] < b[0];
    return a[1] < b[1];
  });
  return out;
}

bool has_line_factor(const BihomPoly& p, double tol) {
  // A vertical line factor through z* forces every w-column to vanish at z*,
  // so z* must be a root of the first nonzero column polynomial.
  auto check_dir = [&](const BihomPoly& q) {
    HomUnivariate col;
    col.degree = q.dz;
    col.c.assign(q.dz + 1, cdouble(0.0));
    int jcol = -1;
    for (int j = 0; j <= q.dw && jcol < 0; ++j) {
      double mx = 0.0;
      for (int i = 0; i <= q.dz; ++i) mx = std::max(mx, std::abs(q.at(i, j)));
      if (mx > tol) jcol = j;
    }
    if (jcol < 0) return true;  // zero polynomial: degenerate anyway
    for (int i = 0; i <= q.dz; ++i) col.c[i] = q.at(i, jcol);
    RootSet cand;
    try {
      cand = roots_homogeneous(col, 1e-4);
    } catch (const ZeroPolynomial&) {
      return true;
    }
    for (const auto& r : cand.roots) {
      bool all_zero = true;
      try {
        HomUnivariate fib = fiber_poly_w(q, r.point);
        for (const auto& v : fib.c)
          if (std::abs(v) > tol) {
            all_zero = false;
            break;
          }
      } catch (const IdenticallyZeroFiber&) {
        all_zero = true;
      }
      if (all_zero) return true;
    }
    return false;
  };
  return check_dir(p) || check_dir(p.transposed());
}

}  // namespace corrdyn
