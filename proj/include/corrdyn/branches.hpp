#pragma once

#include <vector>

#include "corrdyn/chain.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

// Tracked local inverse of the second projection on one component: follows a
// z-fiber root while the base point w walks a path.
struct BranchGerm {
  int component = 0;
  ProjPoint value;                   // current tracked root
  std::vector<ProjPoint> step_log;   // value at every base point
};

struct ContinueOptions {
  double critical_margin = kCriticalMargin;  // 0 waives the candidate check
  double step_bound = kPathStepBound;
  double jump_factor = 3.0;
};

// Root tracking along base_path (points in the w slot), starting from
// start_root over base_path.front(). Throws CriticalProximity when the path
// comes within the margin of a critical-value candidate and RootJumpDetected
// when the nearest-root step exceeds the continuity bound.
BranchGerm continue_branch(const Chain& c, int component, const ProjPoint& start_root,
                           const std::vector<ProjPoint>& base_path,
                           const ContinueOptions& opt = {});

// One forward iteration path: points z_0..z_N with the component index used
// at every step and the multiplicity weight it carries.
struct PathRecord {
  std::vector<ProjPoint> points;
  std::vector<int> components;
  long weight = 1;
};

// All forward paths of length N from z0; total weight d0^N.
std::vector<PathRecord> enumerate_paths(const Chain& c, const ProjPoint& z0, int N,
                                        long budget = 100000);

enum class NormalityFlag { Normal, NonNormal, Inconclusive };

struct MartyConfig {
  double probe_radius = 0.03;   // chordal probe offset
  double critical_margin = kCriticalMargin;
  double bound_factor = 4.0;    // Normal: tail bounded by mid-depth value x this
  double growth_factor = 2.0;   // NonNormal: growth per step over the window
  int growth_window = 3;
  long path_budget = 100000;
  double score_cap = 1e250;
};

struct MartyResult {
  double score = 0.0;                  // max over depths and paths
  NormalityFlag flag = NormalityFlag::Inconclusive;
  std::vector<double> per_depth;       // max spherical-derivative estimate per depth
};

// Numerical normality surrogate: spherical derivatives of the n-th coordinate
// maps of all iteration paths, estimated by central differences of branches
// continued from four probe points around z0.
MartyResult marty_indicator(const Chain& c, const ProjPoint& z0, int depth,
                            const MartyConfig& cfg = {});

const char* to_string(NormalityFlag f);

}  // namespace corrdyn
