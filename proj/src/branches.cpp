#include "corrdyn/branches.hpp"

#include <algorithm>
#include <cmath>

#include "corrdyn/errors.hpp"

namespace corrdyn {

namespace {

const ProjPoint& nearest_root(const RootSet& fiber, const ProjPoint& target,
                              double* dist_out = nullptr) {
  const ProjPoint* best = &fiber.roots.front().point;
  double bestd = 2.0;
  for (const auto& r : fiber.roots) {
    double d = chordal(r.point, target);
    if (d < bestd) {
      bestd = d;
      best = &r.point;
    }
  }
  if (dist_out) *dist_out = bestd;
  return *best;
}

}  // namespace

BranchGerm continue_branch(const Chain& c, int component, const ProjPoint& start_root,
                           const std::vector<ProjPoint>& base_path,
                           const ContinueOptions& opt) {
  if (component < 0 || component >= static_cast<int>(c.components().size()))
    throw ConfigError("continue_branch: component index out of range");
  if (base_path.empty()) throw ConfigError("continue_branch: empty base path");
  const BihomPoly& poly = c.components()[component].poly;

  if (opt.critical_margin > 0.0) {
    auto candidates = critical_value_candidates(c);
    for (const auto& w : base_path)
      if (min_distance_to(candidates, w) < opt.critical_margin)
        throw CriticalProximity("continue_branch: base path within margin of a critical-value candidate");
  }

  BranchGerm germ;
  germ.component = component;
  RootSet first = roots_homogeneous(fiber_poly_z(poly, base_path.front()));
  double d0 = 0.0;
  germ.value = nearest_root(first, start_root, &d0);
  if (d0 > 0.05)
    throw RootJumpDetected("continue_branch: start_root is not a fiber root over the first base point");
  germ.step_log.push_back(germ.value);

  double lip = 2.0;
  for (std::size_t k = 1; k < base_path.size(); ++k) {
    double step = chordal(base_path[k], base_path[k - 1]);
    if (step > opt.step_bound * (1.0 + 1e-9))
      throw RootJumpDetected("continue_branch: base step exceeds the step bound (under-resolved path)");
    RootSet fiber = roots_homogeneous(fiber_poly_z(poly, base_path[k]));
    double moved = 0.0;
    const ProjPoint& next = nearest_root(fiber, germ.value, &moved);
    double bound = opt.jump_factor * std::max(lip, 0.5) * step + 1e-9;
    if (moved > bound)
      throw RootJumpDetected("continue_branch: nearest-root step exceeds the continuity bound");
    if (step > 1e-12) lip = std::clamp(moved / step, 0.5, 50.0);
    germ.value = next;
    germ.step_log.push_back(germ.value);
  }
  return germ;
}

std::vector<PathRecord> enumerate_paths(const Chain& c, const ProjPoint& z0, int N,
                                        long budget) {
  DegreePair d = degrees(c);
  if (std::pow(static_cast<double>(d.d0), N) > static_cast<double>(budget))
    throw SizeBudgetExceeded("enumerate_paths: d0^N exceeds the budget");
  std::vector<PathRecord> frontier;
  PathRecord root;
  root.points.push_back(z0);
  frontier.push_back(std::move(root));
  for (int step = 0; step < N; ++step) {
    std::vector<PathRecord> next;
    for (const auto& rec : frontier) {
      const ProjPoint& cur = rec.points.back();
      for (std::size_t j = 0; j < c.components().size(); ++j) {
        const auto& comp = c.components()[j];
        RootSet fiber = roots_homogeneous(fiber_poly_w(comp.poly, cur));
        for (const auto& r : fiber.roots) {
          PathRecord ext = rec;
          ext.points.push_back(r.point);
          ext.components.push_back(static_cast<int>(j));
          ext.weight = rec.weight * comp.mult * r.multiplicity;
          next.push_back(std::move(ext));
        }
      }
    }
    frontier = std::move(next);
  }
  return frontier;
}

namespace {

// Probe ladder: branch values at offsets (1/4, 1/2, 3/4, 1) x the probe
// vector, continued outward from the reference path so root selection stays
// on the branch.
constexpr int kLadder = 4;

struct ProbeState {
  std::array<ProjPoint, kLadder> values;
  bool alive = true;
};

struct PathState {
  ProjPoint ref;
  std::array<ProbeState, 4> probes;
  bool alive = true;
};

cdouble chart_value(const ProjPoint& p, bool reciprocal) {
  return reciprocal ? p.a / p.b : p.b / p.a;
}

}  // namespace

MartyResult marty_indicator(const Chain& c, const ProjPoint& z0, int depth,
                            const MartyConfig& cfg) {
  MartyResult res;
  res.per_depth.assign(depth + 1, 0.0);

  // forward fibers degenerate at critical values of the transpose
  auto fwd_candidates = critical_value_candidates(transpose(c));
  if (min_distance_to(fwd_candidates, z0) < cfg.critical_margin) {
    res.flag = NormalityFlag::Inconclusive;
    return res;
  }

  DegreePair d = degrees(c);
  if (std::pow(static_cast<double>(d.d0), depth) > static_cast<double>(cfg.path_budget))
    throw SizeBudgetExceeded("marty_indicator: d0^depth exceeds the path budget");

  // probe points in z0's own chart
  auto [chart0, zeta0] = chart_coord(z0);
  double delta = cfg.probe_radius * (1.0 + std::norm(zeta0));
  const cdouble dirs[4] = {cdouble(1, 0), cdouble(-1, 0), cdouble(0, 1), cdouble(0, -1)};

  PathState init;
  init.ref = z0;
  for (int pi = 0; pi < 4; ++pi) {
    for (int l = 0; l < kLadder; ++l) {
      double frac = static_cast<double>(l + 1) / kLadder;
      init.probes[pi].values[l] = point_from_chart(chart0, zeta0 + frac * delta * dirs[pi]);
    }
  }
  std::vector<PathState> paths{init};

  bool any_incomplete = false;
  for (int n = 1; n <= depth; ++n) {
    std::vector<PathState> next;
    for (const auto& st : paths) {
      if (!st.alive) continue;
      for (std::size_t j = 0; j < c.components().size(); ++j) {
        const BihomPoly& poly = c.components()[j].poly;
        RootSet fiber;
        try {
          fiber = roots_homogeneous(fiber_poly_w(poly, st.ref));
        } catch (const IdenticallyZeroFiber&) {
          any_incomplete = true;
          continue;
        }
        for (const auto& r : fiber.roots) {
          PathState ext;
          ext.ref = r.point;
          ext.alive = true;
          if (min_distance_to(fwd_candidates, ext.ref) < cfg.critical_margin) {
            any_incomplete = true;
            continue;
          }
          for (int pi = 0; pi < 4; ++pi) {
            ProbeState& ps = ext.probes[pi];
            ps = st.probes[pi];
            if (!ps.alive) continue;
            ProjPoint inner = ext.ref;  // continuation anchored at the reference
            for (int l = 0; l < kLadder; ++l) {
              RootSet pf;
              try {
                pf = roots_homogeneous(fiber_poly_w(poly, st.probes[pi].values[l]));
              } catch (const IdenticallyZeroFiber&) {
                ps.alive = false;
                break;
              }
              double dist = 0.0;
              const ProjPoint& sel = nearest_root(pf, inner, &dist);
              if (fiber.roots.size() > 1 && dist > 0.25) {
                ps.alive = false;  // cannot resolve the branch at this offset
                break;
              }
              ps.values[l] = sel;
              inner = sel;
            }
          }
          next.push_back(std::move(ext));
        }
      }
    }
    paths = std::move(next);

    // spherical-derivative estimates at this depth
    double best = 0.0;
    bool have = false;
    for (const auto& st : paths) {
      bool reciprocal = std::abs(st.ref.b) > std::abs(st.ref.a);
      cdouble v = chart_value(st.ref, reciprocal);
      if (!st.probes[0].alive || !st.probes[1].alive || !st.probes[2].alive ||
          !st.probes[3].alive) {
        any_incomplete = true;
        continue;
      }
      cdouble g0 = chart_value(st.probes[0].values[kLadder - 1], reciprocal);
      cdouble g1 = chart_value(st.probes[1].values[kLadder - 1], reciprocal);
      cdouble g2 = chart_value(st.probes[2].values[kLadder - 1], reciprocal);
      cdouble g3 = chart_value(st.probes[3].values[kLadder - 1], reciprocal);
      double est = std::max(std::abs(g0 - g1), std::abs(g2 - g3)) / (2.0 * delta);
      double score = est / (1.0 + std::norm(v));
      if (!std::isfinite(score)) score = cfg.score_cap;
      score = std::min(score, cfg.score_cap);
      best = std::max(best, score);
      have = true;
    }
    if (!have) {
      any_incomplete = true;
      res.per_depth.resize(n);
      break;
    }
    res.per_depth[n] = best;
    res.score = std::max(res.score, best);
  }

  int got = static_cast<int>(res.per_depth.size()) - 1;
  // NonNormal: growth by >= growth_factor over each of the last increments
  if (got >= cfg.growth_window + 1) {
    bool grows = true;
    for (int n = got - cfg.growth_window + 1; n <= got; ++n) {
      double prev = res.per_depth[n - 1], curv = res.per_depth[n];
      bool cap_pair = prev >= 0.99 * cfg.score_cap && curv >= 0.99 * cfg.score_cap;
      if (!cap_pair && !(prev > 0.0 && curv >= cfg.growth_factor * prev * (1.0 - 1e-9)))
        grows = false;
    }
    if (grows) {
      res.flag = NormalityFlag::NonNormal;
      return res;
    }
  }
  if (got == depth && !any_incomplete) {
    int mid = (depth + 1) / 2;
    bool bounded = true;
    for (int n = mid; n <= depth; ++n)
      if (res.per_depth[n] > cfg.bound_factor * res.per_depth[mid] + 1e-300)
        bounded = false;
    if (bounded) {
      res.flag = NormalityFlag::Normal;
      return res;
    }
  }
  res.flag = NormalityFlag::Inconclusive;
  return res;
}

const char* to_string(NormalityFlag f) {
  switch (f) {
    case NormalityFlag::Normal: return "Normal";
    case NormalityFlag::NonNormal: return "NonNormal";
    default: return "Inconclusive";
  }
}

}  // namespace corrdyn
