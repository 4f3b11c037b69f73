#pragma once

#include <vector>

#include "corrdyn/poly.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

// Roots with multiplicity; multiplicities always sum to the formal degree
// (roots at infinity included). Distinct points are pairwise >= the cluster
// radius apart.
struct RootSet {
  struct Entry {
    ProjPoint point;
    int multiplicity;
  };
  std::vector<Entry> roots;

  int total_multiplicity() const {
    int s = 0;
    for (const auto& r : roots) s += r.multiplicity;
    return s;
  }
};

// Homogeneous root finder: exact-threshold deflation of roots at 0 and
// infinity, Aberth-Ehrlich simultaneous iteration for the affine part,
// multiplicity by clustering (inclusion-radius aware). Deterministic.
RootSet roots_homogeneous(const HomUnivariate& p,
                          double cluster_radius = kClusterRadius);

}  // namespace corrdyn
