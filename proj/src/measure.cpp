#include "corrdyn/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "corrdyn/errors.hpp"
#include "corrdyn/parallel.hpp"
#include "corrdyn/rng.hpp"

namespace corrdyn {

WeightedPointCloud pullback_tree(const Chain& c, const ProjPoint& z, int depth,
                                 long leaf_budget) {
  DegreePair d = degrees(c);
  double leaves = std::pow(static_cast<double>(d.d1), depth);
  if (leaves > static_cast<double>(leaf_budget))
    throw SizeBudgetExceeded("pullback_tree: d1^depth exceeds the leaf budget");
  WeightedPointCloud cloud;
  cloud.atoms.push_back({z, 1.0});
  for (int level = 0; level < depth; ++level) {
    WeightedPointCloud next;
    next.atoms.reserve(cloud.atoms.size() * d.d1);
    for (const auto& atom : cloud.atoms) {
      RootSet fiber = backward(c, atom.point);
      for (const auto& r : fiber.roots) {
        double w = atom.weight * r.multiplicity / d.d1;
        next.atoms.push_back({r.point, w});
      }
    }
    cloud = std::move(next);
  }
  return cloud;
}

ProjPoint sample_backward_orbit(const Chain& c, const ProjPoint& z, int depth,
                                std::uint64_t master_seed, std::uint64_t sample_index) {
  SplitMix64 g(mix_seed(master_seed, sample_index));
  DegreePair d = degrees(c);
  ProjPoint cur = z;
  for (int level = 0; level < depth; ++level) {
    RootSet fiber = backward(c, cur);
    double u = g.next_double() * d.d1;
    double acc = 0.0;
    const ProjPoint* pick = &fiber.roots.back().point;
    for (const auto& r : fiber.roots) {
      acc += r.multiplicity;
      if (u < acc) {
        pick = &r.point;
        break;
      }
    }
    cur = *pick;
  }
  return cur;
}

double SphereHistogram::integrate(const std::function<double(const ProjPoint&)>& phi) const {
  double s = 0.0;
  for (int id = 0; id < static_cast<int>(mass.size()); ++id) {
    if (mass[id] == 0.0) continue;
    s += mass[id] * phi(grid->cell_center(id));
  }
  return s;
}

SphereHistogram estimate_measure(const Chain& c, const ProjPoint& z, int depth,
                                 long nsamples, const AtlasGrid& grid,
                                 std::uint64_t master_seed) {
  if (nsamples < 1) throw ConfigError("estimate_measure: nsamples must be >= 1");
  int workers = worker_count();
  std::size_t nchunks = std::max<std::size_t>(1, static_cast<std::size_t>(workers));
  std::vector<std::vector<std::int64_t>> counts(
      nchunks, std::vector<std::int64_t>(grid.cell_count(), 0));
  long chunk = (nsamples + static_cast<long>(nchunks) - 1) / static_cast<long>(nchunks);
  parallel_for(nchunks, [&](std::size_t w) {
    long lo = static_cast<long>(w) * chunk;
    long hi = std::min(nsamples, lo + chunk);
    for (long i = lo; i < hi; ++i) {
      ProjPoint p = sample_backward_orbit(c, z, depth, master_seed,
                                          static_cast<std::uint64_t>(i));
      ++counts[w][grid.locate(p)];
    }
  });
  SphereHistogram h;
  h.grid = &grid;
  h.mass.assign(grid.cell_count(), 0.0);
  for (int id = 0; id < grid.cell_count(); ++id) {
    std::int64_t total = 0;
    for (const auto& cnt : counts) total += cnt[id];
    h.mass[id] = static_cast<double>(total) / static_cast<double>(nsamples);
  }
  return h;
}

SphereHistogram histogram_of_cloud(const WeightedPointCloud& cloud, const AtlasGrid& grid) {
  SphereHistogram h;
  h.grid = &grid;
  h.mass.assign(grid.cell_count(), 0.0);
  for (const auto& atom : cloud.atoms) h.mass[grid.locate(atom.point)] += atom.weight;
  return h;
}

TestDictionary::TestDictionary() {
  centers_.reserve(kBumps);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < kBumps; ++i) {
    double t = 1.0 - 2.0 * (i + 0.5) / kBumps;
    double r = std::sqrt(std::max(0.0, 1.0 - t * t));
    double phi = golden * i;
    centers_.push_back(ProjPoint::from_sphere({r * std::cos(phi), r * std::sin(phi), t}));
  }
}

double TestDictionary::eval(int i, const ProjPoint& p) const {
  if (i == 0) return 1.0;
  double d = chordal(p, centers_[i - 1]);
  return std::exp(-d * d / (2.0 * kSigma * kSigma));
}

const TestDictionary& test_dictionary() {
  static TestDictionary dict;
  return dict;
}

double weakstar_distance(const SphereHistogram& h1, const SphereHistogram& h2,
                         const TestDictionary& dict) {
  if (h1.grid == nullptr || h1.grid != h2.grid)
    throw GridMismatch("weakstar_distance: histograms on different grids");
  double best = 0.0;
  for (int i = 0; i < dict.size(); ++i) {
    auto phi = [&](const ProjPoint& p) { return dict.eval(i, p); };
    best = std::max(best, std::abs(h1.integrate(phi) - h2.integrate(phi)));
  }
  return best;
}

GridFunction GridFunction::constant(const CellSet& block, cdouble v) {
  GridFunction f;
  f.block = block;
  f.cells = block.members();
  f.values.assign(f.cells.size(), v);
  return f;
}

GridFunction GridFunction::sample(const CellSet& block,
                                  const std::function<cdouble(const ProjPoint&)>& fn) {
  GridFunction f;
  f.block = block;
  f.cells = block.members();
  f.values.resize(f.cells.size());
  for (std::size_t k = 0; k < f.cells.size(); ++k)
    f.values[k] = fn(block.grid().cell_center(f.cells[k]));
  return f;
}

double GridFunction::sup_abs() const {
  double s = 0.0;
  for (const auto& v : values) s = std::max(s, std::abs(v));
  return s;
}

double GridFunction::oscillation() const {
  if (values.empty()) return 0.0;
  double rlo = values[0].real(), rhi = rlo, ilo = values[0].imag(), ihi = ilo;
  for (const auto& v : values) {
    rlo = std::min(rlo, v.real());
    rhi = std::max(rhi, v.real());
    ilo = std::min(ilo, v.imag());
    ihi = std::max(ihi, v.imag());
  }
  return std::max(rhi - rlo, ihi - ilo);
}

cdouble GridFunction::mean() const {
  cdouble s(0.0);
  for (const auto& v : values) s += v;
  return values.empty() ? s : s / static_cast<double>(values.size());
}

namespace {

// Bilinear interpolation of a block function at an arbitrary point, within
// the point's own chart; stencil cells outside the block fall back to the
// point's own cell value (clamped interpolation).
struct BlockInterp {
  const GridFunction& f;
  std::vector<int> index;  // cell id -> position in f.values, or -1

  explicit BlockInterp(const GridFunction& fn)
      : f(fn), index(fn.block.grid().cell_count(), -1) {
    for (std::size_t k = 0; k < fn.cells.size(); ++k)
      index[fn.cells[k]] = static_cast<int>(k);
  }

  cdouble eval(const ProjPoint& p) const {
    const AtlasGrid& grid = f.block.grid();
    int n = grid.resolution();
    auto [chart, zeta] = chart_coord(p);
    int own = grid.locate(p);
    if (index[own] < 0)
      throw FiberEscapedBlock("pf_apply: fiber point left the block", own);
    cdouble fallback = f.values[index[own]];
    // lattice of square midpoints
    double u = (zeta.real() + 1.0) * 0.5 * n - 0.5;
    double v = (zeta.imag() + 1.0) * 0.5 * n - 0.5;
    int i0 = static_cast<int>(std::floor(u));
    int j0 = static_cast<int>(std::floor(v));
    double fu = u - i0, fv = v - j0;
    cdouble acc(0.0);
    for (int dj = 0; dj <= 1; ++dj)
      for (int di = 0; di <= 1; ++di) {
        double wgt = (di ? fu : 1.0 - fu) * (dj ? fv : 1.0 - fv);
        int ii = std::clamp(i0 + di, 0, n - 1);
        int jj = std::clamp(j0 + dj, 0, n - 1);
        int id = grid.cell_index(chart, ii, jj);
        int pos = index[id];
        acc += wgt * (pos >= 0 ? f.values[pos] : fallback);
      }
    return acc;
  }
};

}  // namespace

GridFunction pf_apply(const Chain& c, const GridFunction& f) {
  DegreePair d = degrees(c);
  BlockInterp interp(f);
  const AtlasGrid& grid = f.block.grid();
  GridFunction out;
  out.block = f.block;
  out.cells = f.cells;
  out.values.assign(f.cells.size(), cdouble(0.0));
  parallel_for(f.cells.size(), [&](std::size_t k) {
    ProjPoint x = grid.cell_center(f.cells[k]);
    cdouble acc(0.0);
    for (const auto& comp : c.components()) {
      RootSet fiber = roots_homogeneous(fiber_poly_z(comp.poly, x));
      for (const auto& r : fiber.roots)
        acc += static_cast<double>(comp.mult * r.multiplicity) * interp.eval(r.point);
    }
    out.values[k] = acc / static_cast<double>(d.d1);
  });
  return out;
}

PfLimit pf_converge(const Chain& c, const GridFunction& f0, int n_max, double tol) {
  PfLimit out;
  GridFunction f = f0;
  out.oscillation.push_back(f.oscillation());
  for (int n = 0; n < n_max; ++n) {
    if (out.oscillation.back() <= tol) {
      out.converged = true;
      break;
    }
    f = pf_apply(c, f);
    ++out.iterations;
    out.oscillation.push_back(f.oscillation());
  }
  if (out.oscillation.back() <= tol) out.converged = true;
  out.limit = f.mean();
  return out;
}

double check_pullback_invariance(const Chain& c, const SphereHistogram& h,
                                 const TestDictionary& dict) {
  if (h.grid == nullptr) throw GridMismatch("check_pullback_invariance: empty histogram");
  DegreePair d = degrees(c);
  double worst = 0.0;
  for (int i = 0; i < dict.size(); ++i) {
    auto phi = [&](const ProjPoint& p) { return dict.eval(i, p); };
    double defect_acc = 0.0;
    for (int id = 0; id < static_cast<int>(h.mass.size()); ++id) {
      if (h.mass[id] == 0.0) continue;
      ProjPoint x = h.grid->cell_center(id);
      cdouble lam = pullback_functional(
          c, [&](const ProjPoint& p) { return cdouble(phi(p)); }, x);
      defect_acc += h.mass[id] * (lam.real() / d.d1 - phi(x));
    }
    worst = std::max(worst, std::abs(defect_acc));
  }
  return worst;
}

}  // namespace corrdyn
