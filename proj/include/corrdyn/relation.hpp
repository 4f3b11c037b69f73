#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corrdyn/chain.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

enum class Direction { Forward, Backward };

// Set of atlas cells (bitmap over the grid). Only valid (positive-weight)
// cells are ever members.
class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(const AtlasGrid& grid)
      : grid_(&grid), bits_(grid.cell_count(), 0) {}

  const AtlasGrid& grid() const { return *grid_; }
  bool empty() const;
  int count() const;
  bool contains(int id) const { return bits_[id] != 0; }
  void insert(int id);
  void erase(int id) { bits_[id] = 0; }

  std::vector<int> members() const;

  bool subset_of(const CellSet& other) const;
  bool operator==(const CellSet& other) const { return bits_ == other.bits_; }

  CellSet unite(const CellSet& other) const;
  CellSet intersect(const CellSet& other) const;

  // S plus its 1-ring (cross-chart seam neighbors included).
  CellSet closure() const;
  // S minus member cells adjacent to a non-member.
  CellSet interior() const;
  CellSet dilate(int rings) const;

  // Cells whose square region intersects the predicate region given by an
  // affine-modulus band [rlo, rhi] (rhi may be +inf to include infinity).
  static CellSet from_modulus_band(const AtlasGrid& grid, double rlo, double rhi);
  static CellSet from_point(const AtlasGrid& grid, const ProjPoint& p);

  // Run-length encoding of the bitmap (pairs of [start, length]).
  std::vector<std::pair<int, int>> run_length() const;

 private:
  const AtlasGrid* grid_ = nullptr;
  std::vector<std::uint8_t> bits_;

  void check_same(const CellSet& other) const;
};

// Relation image of a cell set: for every member cell, fibers of a
// samples-per-cell lattice (corners included) are located and the result is
// dilated by a padding ring. Monotone in s.
CellSet image_cells(const Chain& c, const CellSet& s, Direction dir,
                    int samples_per_cell = 9, int padding = 1);

struct BlockCheck {
  bool certified = false;
  int offending_cell = -1;  // image cell outside interior(s) when refuted
};

// Attractor block test: image_cells(closure(s)) inside interior(s).
BlockCheck attractor_block_check(const Chain& c, const CellSet& s, Direction dir,
                                 int samples_per_cell = 9, int padding = 1);

// Nested intersection K_{n+1} = image(K_n) ∩ K_n down to a fixpoint. The
// input must be a certified block. Throws NotABlock / reports no fixpoint.
struct OmegaResult {
  CellSet cells;
  int iterations = 0;
  bool fixpoint = false;
};
OmegaResult omega_limit_cells(const Chain& c, const CellSet& block, Direction dir,
                              int max_iters = 256, int samples_per_cell = 9,
                              int padding = 1);

enum class WitnessVerdict { Converged, Diverged, Stalled };

// Greedy backward branch sequence toward a target point.
struct WitnessTrace {
  std::vector<ProjPoint> points;    // a_0 = start w, then greedy backward picks
  std::vector<double> distances;    // chordal distance to the target
  std::vector<double> residuals;    // on-curve residual of consecutive pairs
  WitnessVerdict verdict = WitnessVerdict::Stalled;
};
WitnessTrace strong_repeller_witness(const Chain& c, const ProjPoint& w,
                                     const ProjPoint& target, int steps);

// First dilation of the seed that certifies as a block (k = 1..max_dilation),
// with the omega limit re-checked to sit inside the interior.
std::optional<CellSet> find_attractor_block(const Chain& c, const CellSet& seed,
                                            Direction dir, int max_dilation,
                                            int samples_per_cell = 9, int padding = 1);

const char* to_string(WitnessVerdict v);

}  // namespace corrdyn
