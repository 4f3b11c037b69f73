#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "corrdyn/poly.hpp"
#include "corrdyn/roots.hpp"

namespace corrdyn {

struct DegreePair {
  int d0 = 0;  // topological degree of the transpose (forward-image count)
  int d1 = 0;  // topological degree (preimage count)
};

// A holomorphic chain on P^1 x P^1: bihomogeneous components with positive
// integer multiplicities. Components must have dz >= 1 and dw >= 1 (no
// vertical or horizontal line families).
class Chain {
 public:
  struct Component {
    BihomPoly poly;
    int mult = 1;
  };

  // merge_duplicates collapses components that are unit-scalar multiples of
  // each other (used for exact user input only, never for composed output).
  static Chain from_components(std::vector<Component> comps, bool merge_duplicates);

  const std::vector<Component>& components() const { return comps_; }

 private:
  std::vector<Component> comps_;
};

Chain transpose(const Chain& c);
DegreePair degrees(const Chain& c);

// Forward images {w : (z, w) on the chain}, total multiplicity d0.
RootSet forward(const Chain& c, const ProjPoint& z);
// Preimages {zeta : (zeta, w) on the chain}, total multiplicity d1.
RootSet backward(const Chain& c, const ProjPoint& w);

// Chain of F2 after F1 via pairwise middle-variable resultants.
Chain compose(const Chain& c1, const Chain& c2);

Chain iterate(const Chain& c, int n, long size_budget = 4096);

// Pullback functional: sum over the fiber of preimages of x of phi, with
// component and root multiplicities. Linear in phi; maps 1 to d1.
cdouble pullback_functional(const Chain& c,
                            const std::function<cdouble(const ProjPoint&)>& phi,
                            const ProjPoint& x);

// Finite superset of the critical values: discriminant roots of every
// component (degeneracies at infinity included).
std::vector<ProjPoint> critical_value_candidates(const Chain& c);

double min_distance_to(const std::vector<ProjPoint>& pts, const ProjPoint& p);

}  // namespace corrdyn
