#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace corrdyn {

using cdouble = std::complex<double>;

// Default tolerances shared across modules.
constexpr double kPointEqTol = 1e-9;      // chordal point equality
constexpr double kClusterRadius = 1e-6;   // root cluster merge radius (chordal)
constexpr double kCoeffTrimRel = 1e-10;   // relative degree-trim threshold
constexpr double kFiberZeroTol = 1e-14;   // identically-zero fiber threshold
constexpr double kComponentDupTol = 1e-8; // duplicate chain component tolerance
constexpr double kResidualTol = 1e-7;     // on-curve residual bound
constexpr double kCriticalMargin = 1e-3;  // distance kept from critical candidates
constexpr double kPathStepBound = 0.05;   // max chordal step for branch tracking

// A point of the projective line, [a : b] with affine value b/a.
// Canonical form: the larger-modulus coordinate is exactly 1 (coordinate a
// wins ties), so hashing and dedup are deterministic and renormalizing is
// bit-stable.
struct ProjPoint {
  cdouble a{1.0, 0.0};
  cdouble b{0.0, 0.0};

  ProjPoint() = default;
  ProjPoint(cdouble a_raw, cdouble b_raw);

  static ProjPoint affine(cdouble z) { return ProjPoint(cdouble(1.0), z); }
  static ProjPoint infinity() { return ProjPoint(cdouble(0.0), cdouble(1.0)); }

  bool is_infinity() const { return std::abs(a) == 0.0; }
  // b/a; +-inf components at the point at infinity.
  cdouble affine_value() const { return b / a; }

  // Position on the unit 2-sphere in R^3; chordal distance is half the
  // Euclidean distance between these.
  std::array<double, 3> sphere_coords() const;
  static ProjPoint from_sphere(const std::array<double, 3>& v);
};

double chordal(const ProjPoint& p, const ProjPoint& q);

inline bool points_equal(const ProjPoint& p, const ProjPoint& q,
                         double tol = kPointEqTol) {
  return chordal(p, q) <= tol;
}

// Fubini-Study area density per unit Lebesgue area in an affine chart,
// normalized to total mass 1 over the sphere.
double fs_density(cdouble z);

enum class Chart : std::uint8_t { Zero = 0, One = 1 };

// Chart of a point (ties |z| = 1 resolve to Chart::Zero) and its coordinate
// in that chart; the coordinate always has modulus <= 1.
std::pair<Chart, cdouble> chart_coord(const ProjPoint& p);
ProjPoint point_from_chart(Chart chart, cdouble zeta);

// Fixed two-chart atlas: each chart carries an n x n grid over the square
// [-1,1]^2 circumscribing the closed unit disk of its affine coordinate.
// Chart 0 holds |z| <= 1, chart 1 holds |z| > 1 via the coordinate 1/z.
class AtlasGrid {
 public:
  explicit AtlasGrid(int resolution);

  int resolution() const { return n_; }
  int cell_count() const { return 2 * n_ * n_; }

  int locate(const ProjPoint& p) const;
  int cell_index(Chart chart, int i, int j) const {
    return (chart == Chart::One ? n_ * n_ : 0) + j * n_ + i;
  }
  Chart cell_chart(int id) const { return id < n_ * n_ ? Chart::Zero : Chart::One; }
  std::pair<int, int> cell_ij(int id) const {
    int r = id % (n_ * n_);
    return {r % n_, r / n_};
  }

  // Square bounds of a cell in its chart coordinate.
  std::array<double, 4> cell_bounds(int id) const;  // {x0, x1, y0, y1}

  // Representative point inside the cell's sphere region (clamped into the
  // unit disk near the seam). For zero-weight cells this is the raw square
  // midpoint.
  ProjPoint cell_center(int id) const;

  // Fubini-Study mass of cell ∩ chart region; sums to 1 over all cells.
  double cell_weight(int id) const { return weights_[id]; }
  const std::vector<double>& weights() const { return weights_; }

  // A cell is reachable iff its region has positive area.
  bool cell_valid(int id) const { return weights_[id] > 0.0; }

  // 1-ring adjacency among valid cells: 8-neighbors in-chart plus angular
  // cross-chart matches along the seam |z| = 1.
  const std::vector<int>& neighbors(int id) const { return adjacency_[id]; }

  bool same_grid(const AtlasGrid& other) const { return this == &other; }

 private:
  int n_;
  std::vector<double> weights_;
  std::vector<std::vector<int>> adjacency_;

  void build_weights();
  void build_adjacency();
};

// Exact FS mass of an axis box intersected with the closed unit disk
// (boundary integral in closed form). Exposed for tests.
double fs_box_disk_mass(double x0, double x1, double y0, double y1);

}  // namespace corrdyn
