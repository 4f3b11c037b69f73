#include "corrdyn/chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "corrdyn/errors.hpp"

namespace corrdyn {

namespace {

// Unit-scalar proximity of two normalized coefficient arrays: align phases on
// the largest coefficient of the first and compare.
bool same_up_to_unit_scalar(const BihomPoly& a, const BihomPoly& b, double tol) {
  if (a.dz != b.dz || a.dw != b.dw) return false;
  int pivot = 0;
  double best = 0.0;
  for (int k = 0; k < static_cast<int>(a.c.size()); ++k) {
    if (std::abs(a.c[k]) > best) {
      best = std::abs(a.c[k]);
      pivot = k;
    }
  }
  if (std::abs(b.c[pivot]) < 0.5 * best) return false;
  cdouble phase = (b.c[pivot] / a.c[pivot]);
  double mag = std::abs(phase);
  if (mag < 1e-12) return false;
  phase /= mag;  // unit scalar only; magnitudes already normalized
  double err = 0.0;
  for (int k = 0; k < static_cast<int>(a.c.size()); ++k)
    err = std::max(err, std::abs(a.c[k] * phase - b.c[k]));
  return err <= tol;
}

void validate_component(const BihomPoly& p, const std::string& where) {
  if (p.dz < 1 || p.dw < 1)
    throw ChainInvariantViolation(where + ": component degenerates to a line family (dz=" +
                                  std::to_string(p.dz) + ", dw=" + std::to_string(p.dw) + ")");
}

void append_fiber(RootSet& acc, const RootSet& fiber, int mult) {
  for (const auto& r : fiber.roots) {
    bool merged = false;
    for (auto& e : acc.roots) {
      if (points_equal(e.point, r.point, kClusterRadius)) {
        e.multiplicity += mult * r.multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) acc.roots.push_back({r.point, mult * r.multiplicity});
  }
}

}  // namespace

Chain Chain::from_components(std::vector<Component> comps, bool merge_duplicates) {
  if (comps.empty()) throw ChainInvariantViolation("chain: no components");
  Chain out;
  for (auto& comp : comps) {
    if (comp.mult < 1) throw ChainInvariantViolation("chain: multiplicity must be positive");
    validate_component(comp.poly, "chain");
    if (merge_duplicates) {
      bool merged = false;
      for (auto& existing : out.comps_) {
        if (same_up_to_unit_scalar(existing.poly, comp.poly, kComponentDupTol)) {
          existing.mult += comp.mult;
          merged = true;
          break;
        }
      }
      if (merged) continue;
    }
    out.comps_.push_back(std::move(comp));
  }
  return out;
}

Chain transpose(const Chain& c) {
  std::vector<Chain::Component> comps;
  comps.reserve(c.components().size());
  for (const auto& comp : c.components())
    comps.push_back({comp.poly.transposed(), comp.mult});
  return Chain::from_components(std::move(comps), false);
}

DegreePair degrees(const Chain& c) {
  DegreePair d;
  for (const auto& comp : c.components()) {
    d.d1 += comp.mult * comp.poly.dz;
    d.d0 += comp.mult * comp.poly.dw;
  }
  return d;
}

RootSet forward(const Chain& c, const ProjPoint& z) {
  RootSet acc;
  for (const auto& comp : c.components()) {
    try {
      append_fiber(acc, roots_homogeneous(fiber_poly_w(comp.poly, z)), comp.mult);
    } catch (const IdenticallyZeroFiber& e) {
      throw ChainInvariantViolation(std::string("forward: ") + e.what());
    }
  }
  return acc;
}

RootSet backward(const Chain& c, const ProjPoint& w) {
  RootSet acc;
  for (const auto& comp : c.components()) {
    try {
      append_fiber(acc, roots_homogeneous(fiber_poly_z(comp.poly, w)), comp.mult);
    } catch (const IdenticallyZeroFiber& e) {
      throw ChainInvariantViolation(std::string("backward: ") + e.what());
    }
  }
  return acc;
}

Chain compose(const Chain& c1, const Chain& c2) {
  std::vector<Chain::Component> comps;
  for (std::size_t j = 0; j < c1.components().size(); ++j) {
    for (std::size_t l = 0; l < c2.components().size(); ++l) {
      const auto& a = c1.components()[j];
      const auto& b = c2.components()[l];
      BihomPoly r;
      try {
        r = resultant_mid(a.poly, b.poly);
      } catch (const DegenerateResultant& e) {
        throw ChainInvariantViolation("compose: degenerate resultant for component pair (" +
                                      std::to_string(j) + "," + std::to_string(l) + "): " +
                                      e.what());
      }
      if (r.dz < 1 || r.dw < 1 || has_line_factor(r))
        throw ChainInvariantViolation("compose: line factor in component pair (" +
                                      std::to_string(j) + "," + std::to_string(l) + ")");
      comps.push_back({std::move(r), a.mult * b.mult});
    }
  }
  return Chain::from_components(std::move(comps), false);
}

Chain iterate(const Chain& c, int n, long size_budget) {
  if (n < 1) throw ConfigError("iterate: n must be >= 1");
  DegreePair d = degrees(c);
  double projected = std::pow(static_cast<double>(d.d0), n) *
                     std::pow(static_cast<double>(d.d1), n);
  if (projected > static_cast<double>(size_budget))
    throw SizeBudgetExceeded("iterate: bidegree product " + std::to_string(projected) +
                             " exceeds budget " + std::to_string(size_budget));
  Chain acc = c;
  for (int k = 1; k < n; ++k) acc = compose(acc, c);
  return acc;
}

cdouble pullback_functional(const Chain& c,
                            const std::function<cdouble(const ProjPoint&)>& phi,
                            const ProjPoint& x) {
  cdouble acc(0.0);
  for (const auto& comp : c.components()) {
    RootSet fiber = roots_homogeneous(fiber_poly_z(comp.poly, x));
    for (const auto& r : fiber.roots)
      acc += static_cast<double>(comp.mult * r.multiplicity) * phi(r.point);
  }
  return acc;
}

std::vector<ProjPoint> critical_value_candidates(const Chain& c) {
  std::vector<ProjPoint> out;
  for (const auto& comp : c.components()) {
    HomUnivariate disc = discriminant_w(comp.poly);
    if (disc.degree == 0) continue;
    RootSet rs = roots_homogeneous(disc);
    for (const auto& r : rs.roots) {
      bool dup = false;
      for (const auto& p : out)
        if (points_equal(p, r.point, kClusterRadius)) {
          dup = true;
          break;
        }
      if (!dup) out.push_back(r.point);
    }
  }
  return out;
}

double min_distance_to(const std::vector<ProjPoint>& pts, const ProjPoint& p) {
  double best = 2.0;
  for (const auto& q : pts) best = std::min(best, chordal(q, p));
  return best;
}

}  // namespace corrdyn
