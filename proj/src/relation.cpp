#include "corrdyn/relation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "corrdyn/errors.hpp"
#include "corrdyn/parallel.hpp"

namespace corrdyn {

void CellSet::check_same(const CellSet& other) const {
  if (grid_ == nullptr || other.grid_ == nullptr || grid_ != other.grid_)
    throw GridMismatch("cell sets live on different grids");
}

bool CellSet::empty() const {
  for (auto b : bits_)
    if (b) return false;
  return true;
}

int CellSet::count() const {
  int n = 0;
  for (auto b : bits_) n += b != 0;
  return n;
}

void CellSet::insert(int id) {
  if (grid_->cell_valid(id)) bits_[id] = 1;
}

std::vector<int> CellSet::members() const {
  std::vector<int> out;
  for (int id = 0; id < static_cast<int>(bits_.size()); ++id)
    if (bits_[id]) out.push_back(id);
  return out;
}

bool CellSet::subset_of(const CellSet& other) const {
  check_same(other);
  for (int id = 0; id < static_cast<int>(bits_.size()); ++id)
    if (bits_[id] && !other.bits_[id]) return false;
  return true;
}

CellSet CellSet::unite(const CellSet& other) const {
  check_same(other);
  CellSet out(*grid_);
  for (int id = 0; id < static_cast<int>(bits_.size()); ++id)
    out.bits_[id] = bits_[id] | other.bits_[id];
  return out;
}

CellSet CellSet::intersect(const CellSet& other) const {
  check_same(other);
  CellSet out(*grid_);
  for (int id = 0; id < static_cast<int>(bits_.size()); ++id)
    out.bits_[id] = bits_[id] & other.bits_[id];
  return out;
}

CellSet CellSet::closure() const {
  CellSet out = *this;
  for (int id = 0; id < static_cast<int>(bits_.size()); ++id) {
    if (!bits_[id]) continue;
    for (int nb : grid_->neighbors(id)) out.bits_[nb] = 1;
  }
  return out;
}

CellSet CellSet::interior() const {
  CellSet out = *this;
  for (int id = 0; id < static_cast<int>(bits_.size()); ++id) {
    if (!bits_[id]) continue;
    for (int nb : grid_->neighbors(id)) {
      if (!bits_[nb]) {
        out.bits_[id] = 0;
        break;
      }
    }
  }
  return out;
}

CellSet CellSet::dilate(int rings) const {
  CellSet out = *this;
  for (int k = 0; k < rings; ++k) out = out.closure();
  return out;
}

CellSet CellSet::from_modulus_band(const AtlasGrid& grid, double rlo, double rhi) {
  CellSet out(grid);
  for (int id = 0; id < grid.cell_count(); ++id) {
    if (!grid.cell_valid(id)) continue;
    auto bb = grid.cell_bounds(id);
    // min/max modulus of the chart coordinate over the square
    double px = (bb[0] <= 0.0 && 0.0 <= bb[1]) ? 0.0
                                               : std::min(std::abs(bb[0]), std::abs(bb[1]));
    double py = (bb[2] <= 0.0 && 0.0 <= bb[3]) ? 0.0
                                               : std::min(std::abs(bb[2]), std::abs(bb[3]));
    double rmin = std::hypot(px, py);
    double rmax = std::hypot(std::max(std::abs(bb[0]), std::abs(bb[1])),
                             std::max(std::abs(bb[2]), std::abs(bb[3])));
    if (rmin > 1.0) continue;  // cell region clipped to the chart disk
    double lo, hi;
    if (grid.cell_chart(id) == Chart::Zero) {
      lo = rmin;
      hi = std::min(rmax, 1.0);
    } else {
      double cmax = std::min(rmax, 1.0);
      lo = 1.0 / cmax;
      hi = rmin > 0.0 ? 1.0 / rmin : std::numeric_limits<double>::infinity();
    }
    if (hi >= rlo && lo <= rhi) out.insert(id);
  }
  return out;
}

CellSet CellSet::from_point(const AtlasGrid& grid, const ProjPoint& p) {
  CellSet out(grid);
  out.insert(grid.locate(p));
  return out;
}

std::vector<std::pair<int, int>> CellSet::run_length() const {
  std::vector<std::pair<int, int>> out;
  int start = -1;
  for (int id = 0; id < static_cast<int>(bits_.size()); ++id) {
    if (bits_[id] && start < 0) start = id;
    if (!bits_[id] && start >= 0) {
      out.push_back({start, id - start});
      start = -1;
    }
  }
  if (start >= 0) out.push_back({start, static_cast<int>(bits_.size()) - start});
  return out;
}

CellSet image_cells(const Chain& c, const CellSet& s, Direction dir,
                    int samples_per_cell, int padding) {
  if (samples_per_cell < 4) throw ConfigError("image_cells: samples_per_cell must be >= 4");
  if (padding < 1) throw ConfigError("image_cells: padding must be >= 1");
  const AtlasGrid& grid = s.grid();
  std::vector<int> cells = s.members();
  int k = 2;
  while (k * k < samples_per_cell) ++k;

  // per-cell hit lists; merging is order-independent
  std::vector<std::vector<int>> hits(cells.size());
  parallel_for(cells.size(), [&](std::size_t idx) {
    int id = cells[idx];
    auto bb = grid.cell_bounds(id);
    Chart chart = grid.cell_chart(id);
    std::vector<int>& out = hits[idx];
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        double tx = static_cast<double>(a) / (k - 1);
        double ty = static_cast<double>(b) / (k - 1);
        cdouble zeta(bb[0] + tx * (bb[1] - bb[0]), bb[2] + ty * (bb[3] - bb[2]));
        ProjPoint p = point_from_chart(chart, zeta);
        RootSet fiber = dir == Direction::Forward ? forward(c, p) : backward(c, p);
        for (const auto& r : fiber.roots) out.push_back(grid.locate(r.point));
      }
    }
  });

  CellSet marked(grid);
  for (const auto& h : hits)
    for (int id : h) marked.insert(id);
  return marked.dilate(padding);
}

BlockCheck attractor_block_check(const Chain& c, const CellSet& s, Direction dir,
                                 int samples_per_cell, int padding) {
  CellSet img = image_cells(c, s.closure(), dir, samples_per_cell, padding);
  CellSet inter = s.interior();
  for (int id : img.members()) {
    if (!inter.contains(id)) return {false, id};
  }
  return {true, -1};
}

OmegaResult omega_limit_cells(const Chain& c, const CellSet& block, Direction dir,
                              int max_iters, int samples_per_cell, int padding) {
  BlockCheck chk = attractor_block_check(c, block, dir, samples_per_cell, padding);
  if (!chk.certified)
    throw NotABlock("omega_limit_cells: input set is not a certified attractor block");
  OmegaResult out;
  CellSet k = block;
  for (int it = 0; it < max_iters; ++it) {
    CellSet next = image_cells(c, k, dir, samples_per_cell, padding).intersect(k);
    ++out.iterations;
    if (next == k) {
      out.cells = std::move(next);
      out.fixpoint = true;
      return out;
    }
    k = std::move(next);
  }
  out.cells = std::move(k);
  out.fixpoint = false;
  return out;
}

WitnessTrace strong_repeller_witness(const Chain& c, const ProjPoint& w,
                                     const ProjPoint& target, int steps) {
  if (steps < 1) throw ConfigError("strong_repeller_witness: steps must be >= 1");
  WitnessTrace tr;
  tr.points.push_back(w);
  tr.distances.push_back(chordal(w, target));
  ProjPoint cur = w;
  for (int n = 0; n < steps; ++n) {
    RootSet fiber = backward(c, cur);
    const ProjPoint* best = nullptr;
    double bestd = 2.0;
    for (const auto& r : fiber.roots) {
      double d = chordal(r.point, target);
      if (d < bestd) {
        bestd = d;
        best = &r.point;
      }
    }
    double res = 1.0;
    for (const auto& comp : c.components())
      res = std::min(res, std::abs(eval(comp.poly, *best, cur)));
    tr.residuals.push_back(res);
    cur = *best;
    tr.points.push_back(cur);
    tr.distances.push_back(bestd);
  }
  int n = static_cast<int>(tr.distances.size()) - 1;
  int tail = (steps + 1) / 2;
  bool monotone = true;
  for (int i = n - tail; i < n; ++i)
    if (tr.distances[i + 1] > tr.distances[i] * (1.0 + 1e-12) + 1e-15) monotone = false;
  if (tr.distances[n] <= 1e-6 && monotone) tr.verdict = WitnessVerdict::Converged;
  else if (tr.distances[n] > 1.5 * tr.distances[0] + 1e-3)
    tr.verdict = WitnessVerdict::Diverged;
  else tr.verdict = WitnessVerdict::Stalled;
  return tr;
}

std::optional<CellSet> find_attractor_block(const Chain& c, const CellSet& seed,
                                            Direction dir, int max_dilation,
                                            int samples_per_cell, int padding) {
  if (seed.empty()) throw ConfigError("find_attractor_block: empty seed");
  CellSet grown = seed;
  for (int k = 1; k <= max_dilation; ++k) {
    grown = grown.closure();
    BlockCheck chk = attractor_block_check(c, grown, dir, samples_per_cell, padding);
    if (chk.certified) {
      OmegaResult om = omega_limit_cells(c, grown, dir, 256, samples_per_cell, padding);
      if (om.cells.subset_of(grown.interior())) return grown;
    }
  }
  return std::nullopt;
}

const char* to_string(WitnessVerdict v) {
  switch (v) {
    case WitnessVerdict::Converged: return "Converged";
    case WitnessVerdict::Diverged: return "Diverged";
    default: return "Stalled";
  }
}

}  // namespace corrdyn
