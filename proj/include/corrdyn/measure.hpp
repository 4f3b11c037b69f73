#pragma once

#include <cstdint>
#include <vector>

#include "corrdyn/chain.hpp"
#include "corrdyn/relation.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

struct WeightedPointCloud {
  struct Atom {
    ProjPoint point;
    double weight;
  };
  std::vector<Atom> atoms;
  double total_weight() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight;
    return s;
  }
};

// Exact normalized pullback of a point mass through `depth` backward levels:
// d1^depth leaves counted with multiplicity, weights summing to 1.
WeightedPointCloud pullback_tree(const Chain& c, const ProjPoint& z, int depth,
                                 long leaf_budget = 1000000);

// Unbiased sampler of the same distribution: at each level a fiber root is
// chosen with probability proportional to its multiplicity. Deterministic
// given (master seed, sample index).
ProjPoint sample_backward_orbit(const Chain& c, const ProjPoint& z, int depth,
                                std::uint64_t master_seed, std::uint64_t sample_index);

// Mass per atlas cell; total mass 1.
struct SphereHistogram {
  const AtlasGrid* grid = nullptr;
  std::vector<double> mass;

  double integrate(const std::function<double(const ProjPoint&)>& phi) const;
};

SphereHistogram estimate_measure(const Chain& c, const ProjPoint& z, int depth,
                                 long nsamples, const AtlasGrid& grid,
                                 std::uint64_t master_seed);

SphereHistogram histogram_of_cloud(const WeightedPointCloud& cloud, const AtlasGrid& grid);

// 64 spherical bumps exp(-chordal(z, a_i)^2 / (2 sigma^2)) on a Fibonacci
// lattice, sigma = 0.3, plus the constant 1 at index 0. Fixed and versioned;
// changing it breaks the report format.
class TestDictionary {
 public:
  static constexpr int kVersion = 1;
  static constexpr int kBumps = 64;
  static constexpr double kSigma = 0.3;

  TestDictionary();
  int size() const { return kBumps + 1; }
  double eval(int i, const ProjPoint& p) const;
  const ProjPoint& center(int i) const { return centers_[i - 1]; }  // i >= 1

 private:
  std::vector<ProjPoint> centers_;
};

const TestDictionary& test_dictionary();

// max_i |∫ φ_i dh1 − ∫ φ_i dh2| over the dictionary (cell-center quadrature).
double weakstar_distance(const SphereHistogram& h1, const SphereHistogram& h2,
                         const TestDictionary& dict = test_dictionary());

// Function on a block sampled at cell centers.
struct GridFunction {
  CellSet block;
  std::vector<int> cells;       // sorted member ids
  std::vector<cdouble> values;  // aligned with `cells`

  static GridFunction constant(const CellSet& block, cdouble v);
  static GridFunction sample(const CellSet& block,
                             const std::function<cdouble(const ProjPoint&)>& f);
  double sup_abs() const;
  double oscillation() const;  // max over Re/Im of (sup - inf)
  cdouble mean() const;
};

// Normalized pullback operator on block functions: averages the function
// over backward fibers (bilinear interpolation off cell centers, clamped to
// the block and to each chart). Constants are fixed; sup-nonexpansive.
GridFunction pf_apply(const Chain& c, const GridFunction& f);

struct PfLimit {
  cdouble limit;                  // mean of the final iterate
  std::vector<double> oscillation;  // per-iterate sup-inf
  bool converged = false;
  int iterations = 0;
};

PfLimit pf_converge(const Chain& c, const GridFunction& f0, int n_max, double tol);

// max over the dictionary of |d1^{-1} ∫ Λ[φ] dh − ∫ φ dh| (exactly 0 for the
// constant function).
double check_pullback_invariance(const Chain& c, const SphereHistogram& h,
                                 const TestDictionary& dict = test_dictionary());

}  // namespace corrdyn
