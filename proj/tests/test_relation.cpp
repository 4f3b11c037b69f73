#include <doctest.h>

#include <cmath>
#include <limits>

#include "corrdyn/errors.hpp"
#include "corrdyn/relation.hpp"
#include "test_util.hpp"

using namespace corrdyn;
using namespace corrdyn::testutil;

namespace {

// cells covering {|w| >= r} plus infinity
CellSet outer_region(const AtlasGrid& g, double r) {
  return CellSet::from_modulus_band(g, r, std::numeric_limits<double>::infinity());
}

double max_affine_modulus_of_region(const AtlasGrid& g, int id) {
  auto bb = g.cell_bounds(id);
  double rmax = std::hypot(std::max(std::abs(bb[0]), std::abs(bb[1])),
                           std::max(std::abs(bb[2]), std::abs(bb[3])));
  double px = (bb[0] <= 0.0 && 0.0 <= bb[1]) ? 0.0
                                             : std::min(std::abs(bb[0]), std::abs(bb[1]));
  double py = (bb[2] <= 0.0 && 0.0 <= bb[3]) ? 0.0
                                             : std::min(std::abs(bb[2]), std::abs(bb[3]));
  double rmin = std::hypot(px, py);
  if (g.cell_chart(id) == Chart::Zero) return std::min(rmax, 1.0);
  return rmin > 0.0 ? 1.0 / rmin : std::numeric_limits<double>::infinity();
}

}  // namespace

TEST_SUITE_BEGIN("relation");

TEST_CASE("image of empty set is empty") {
  AtlasGrid grid(32);
  CellSet empty(grid);
  CHECK(image_cells(chain_of(poly_w_minus_z2()), empty, Direction::Forward).empty());
}

TEST_CASE("backward image of the outer region under squaring stays outer") {
  AtlasGrid grid(64);
  Chain c = chain_of(poly_z_minus_w2());  // backward relation squares the point
  CellSet s = outer_region(grid, 2.0);
  CellSet img = image_cells(c, s, Direction::Backward);
  // member cells extend to 1/|w| <= 1/2 + corner diagonal; squaring those
  // moduli plus one mark and one padding diagonal bounds the image cells
  double diag = std::sqrt(2.0) * 2.0 / 64.0;
  double bound = (0.5 + diag) * (0.5 + diag) + 2.0 * diag;  // in the 1/w chart
  for (int id : img.members()) {
    auto bb = grid.cell_bounds(id);
    CHECK(grid.cell_chart(id) == Chart::One);
    double rmin_coord = std::hypot(
        (bb[0] <= 0.0 && 0.0 <= bb[1]) ? 0.0 : std::min(std::abs(bb[0]), std::abs(bb[1])),
        (bb[2] <= 0.0 && 0.0 <= bb[3]) ? 0.0 : std::min(std::abs(bb[2]), std::abs(bb[3])));
    CHECK(rmin_coord <= bound);  // i.e. the cell meets {|w| >= 1/bound} u {inf}
  }
  CHECK(1.0 / bound > 4.0 * (1.0 - 13.0 * diag));  // tends to |w| >= 4 as h -> 0
}

TEST_CASE("forward image of a small disk under squaring contracts") {
  AtlasGrid grid(64);
  Chain c = chain_of(poly_w_minus_z2());
  CellSet s = CellSet::from_modulus_band(grid, 0.0, 0.5);
  CellSet img = image_cells(c, s, Direction::Forward);
  double slack = 3.0 * std::sqrt(2.0) * 2.0 / 64.0;
  for (int id : img.members()) {
    CHECK(grid.cell_chart(id) == Chart::Zero);
    CHECK(max_affine_modulus_of_region(grid, id) <= 0.27 + slack);
  }
}

TEST_CASE("image_cells is monotone in the input set") {
  AtlasGrid grid(32);
  Chain c = chain_of(poly_w_minus_z2());
  SplitMix64 g(505);
  for (int trial = 0; trial < 6; ++trial) {
    double r1 = 0.2 + 0.5 * g.next_double();
    double r2 = r1 + 0.4 * g.next_double();
    CellSet s1 = CellSet::from_modulus_band(grid, 0.3 * r1, r1);
    CellSet s2 = CellSet::from_modulus_band(grid, 0.2 * r1, r2);
    REQUIRE(s1.subset_of(s2));
    for (Direction dir : {Direction::Forward, Direction::Backward}) {
      CHECK(image_cells(c, s1, dir).subset_of(image_cells(c, s2, dir)));
    }
  }
}

TEST_CASE("attractor block verdicts for the squaring family") {
  AtlasGrid grid(128);
  // backward relation of z - w^2 squares the point: outer region is a block
  Chain par = chain_of(poly_z_minus_w2());
  CellSet outer = outer_region(grid, 2.0);
  CHECK(attractor_block_check(par, outer, Direction::Backward).certified);

  // squaring contracts the half-disk
  Chain sq = chain_of(poly_w_minus_z2());
  CellSet half = CellSet::from_modulus_band(grid, 0.0, 0.5);
  CHECK(attractor_block_check(sq, half, Direction::Forward).certified);

  // the annulus is pushed off itself on both sides
  CellSet annulus = CellSet::from_modulus_band(grid, 0.9, 1.1);
  BlockCheck bad = attractor_block_check(sq, annulus, Direction::Forward);
  CHECK_FALSE(bad.certified);
  CHECK(bad.offending_cell >= 0);
}

TEST_CASE("certification survives grid refinement") {
  for (int n : {64, 128}) {
    AtlasGrid grid(n);
    CHECK(attractor_block_check(chain_of(poly_z_minus_w2()), outer_region(grid, 2.0),
                                Direction::Backward)
              .certified);
    CHECK(attractor_block_check(chain_of(poly_w_minus_z2()),
                                CellSet::from_modulus_band(grid, 0.0, 0.5),
                                Direction::Forward)
              .certified);
    CHECK(attractor_block_check(chain_of(poly_w_minus_z2()),
                                CellSet::from_modulus_band(grid, 0.45, 2.2),
                                Direction::Backward)
              .certified);
  }
}

TEST_CASE("omega limit sets of certified blocks") {
  AtlasGrid grid(64);
  Chain sq = chain_of(poly_w_minus_z2());
  CellSet half = CellSet::from_modulus_band(grid, 0.0, 0.5);
  OmegaResult om = omega_limit_cells(sq, half, Direction::Forward);
  CHECK(om.fixpoint);
  ProjPoint zero = ProjPoint::affine(0.0);
  for (int id : om.cells.members())
    CHECK(chordal(grid.cell_center(id), zero) < 0.12);
  CellSet img = image_cells(sq, om.cells, Direction::Forward);
  CHECK(img.subset_of(om.cells.dilate(1)));

  Chain par = chain_of(poly_z_minus_w2());
  CellSet outer = outer_region(grid, 2.0);
  OmegaResult om2 = omega_limit_cells(par, outer, Direction::Backward);
  CHECK(om2.fixpoint);
  for (int id : om2.cells.members())
    CHECK(chordal(grid.cell_center(id), ProjPoint::infinity()) < 0.1);

  // Julia set of squaring: a backward block around the unit circle shrinks to it
  CellSet ring = CellSet::from_modulus_band(grid, 0.45, 2.2);
  OmegaResult om3 = omega_limit_cells(sq, ring, Direction::Backward);
  CHECK(om3.fixpoint);
  for (int id : om3.cells.members()) {
    ProjPoint ctr = grid.cell_center(id);
    double r = std::abs(ctr.affine_value());
    CHECK(r > 0.75);
    CHECK(r < 1.35);
  }
  CHECK(image_cells(sq, om3.cells, Direction::Backward).subset_of(om3.cells.dilate(1)));

  CellSet annulus = CellSet::from_modulus_band(grid, 0.9, 1.1);
  CHECK_THROWS_AS(omega_limit_cells(sq, annulus, Direction::Forward), NotABlock);
}

TEST_CASE("strong repeller witnesses") {
  Chain par = chain_of(poly_z_minus_w2());
  WitnessTrace t1 = strong_repeller_witness(par, ProjPoint::affine(2.0),
                                            ProjPoint::infinity(), 12);
  CHECK(t1.verdict == WitnessVerdict::Converged);
  CHECK(t1.distances.back() <= 1e-6);

  Chain sq = chain_of(poly_w_minus_z2());
  WitnessTrace t2 = strong_repeller_witness(sq, ProjPoint::affine(3.0),
                                            ProjPoint::affine(1.0), 40);
  CHECK(t2.verdict == WitnessVerdict::Converged);

  WitnessTrace t3 = strong_repeller_witness(sq, ProjPoint::affine(0.0),
                                            ProjPoint::affine(1.0), 20);
  CHECK(t3.verdict == WitnessVerdict::Stalled);

  for (const auto& tr : {t1, t2, t3})
    for (double r : tr.residuals) CHECK(r <= 1e-7);
}

TEST_CASE("find_attractor_block") {
  AtlasGrid grid(64);
  Chain par = chain_of(poly_z_minus_w2());
  CellSet seedInf = CellSet::from_point(grid, ProjPoint::infinity());
  auto blk = find_attractor_block(par, seedInf, Direction::Backward, 16);
  REQUIRE(blk.has_value());
  CHECK(attractor_block_check(par, *blk, Direction::Backward).certified);

  Chain sq = chain_of(poly_w_minus_z2());
  CellSet seed0 = CellSet::from_point(grid, ProjPoint::affine(0.0));
  auto blk2 = find_attractor_block(sq, seed0, Direction::Forward, 16);
  REQUIRE(blk2.has_value());
  for (int id : blk2->members()) CHECK(max_affine_modulus_of_region(grid, id) < 1.0);

  // no forward attractor block around the repelling fixed point 1
  CellSet seed1 = CellSet::from_point(grid, ProjPoint::affine(1.0));
  CHECK_FALSE(find_attractor_block(sq, seed1, Direction::Forward, 4).has_value());
}

TEST_SUITE_END();
