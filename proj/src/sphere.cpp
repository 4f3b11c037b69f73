#include "corrdyn/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace corrdyn {

namespace {
constexpr double kTieRel = 1e-12;
constexpr double kPi = std::numbers::pi;
}  // namespace

ProjPoint::ProjPoint(cdouble a_raw, cdouble b_raw) {
  double ma = std::abs(a_raw), mb = std::abs(b_raw);
  if (!(ma > 0.0) && !(mb > 0.0)) {
    throw std::invalid_argument("ProjPoint: both homogeneous coordinates are zero");
  }
  // Pivot on the larger coordinate; coordinate a wins near-ties so the
  // representative is stable under renormalization.
  bool pivot_a = ma >= mb * (1.0 - kTieRel);
  cdouble pivot = pivot_a ? a_raw : b_raw;
  a = a_raw / pivot;
  b = b_raw / pivot;
  if (pivot_a) a = cdouble(1.0, 0.0);
  else b = cdouble(1.0, 0.0);
}

std::array<double, 3> ProjPoint::sphere_coords() const {
  double na = std::norm(a), nb = std::norm(b);
  double s = na + nb;
  cdouble ab = std::conj(a) * b;
  return {2.0 * ab.real() / s, 2.0 * ab.imag() / s, (nb - na) / s};
}

ProjPoint ProjPoint::from_sphere(const std::array<double, 3>& v) {
  double t = std::clamp(v[2], -1.0, 1.0);
  cdouble xy(v[0], v[1]);
  if (t <= 0.0) {
    double a0 = std::sqrt((1.0 - t) / 2.0);
    return ProjPoint(cdouble(a0), xy / (2.0 * a0));
  }
  double b0 = std::sqrt((1.0 + t) / 2.0);
  return ProjPoint(std::conj(xy) / (2.0 * b0), cdouble(b0));
}

double chordal(const ProjPoint& p, const ProjPoint& q) {
  double num = std::abs(p.a * q.b - p.b * q.a);
  double den = std::sqrt(std::norm(p.a) + std::norm(p.b)) *
               std::sqrt(std::norm(q.a) + std::norm(q.b));
  return std::min(1.0, num / den);
}

double fs_density(cdouble z) {
  double r2 = std::norm(z);
  double d = 1.0 + r2;
  return 1.0 / (kPi * d * d);
}

std::pair<Chart, cdouble> chart_coord(const ProjPoint& p) {
  if (std::abs(p.b) <= std::abs(p.a)) return {Chart::Zero, p.b / p.a};
  return {Chart::One, p.a / p.b};
}

ProjPoint point_from_chart(Chart chart, cdouble zeta) {
  if (chart == Chart::Zero) return ProjPoint(cdouble(1.0), zeta);
  return ProjPoint(zeta, cdouble(1.0));
}

// ---------------------------------------------------------------------------
// FS mass of box ∩ disk, by an origin-fan decomposition of the box boundary.
//
// For each boundary piece u→v (pieces split at circle crossings), the fan
// triangle (0, u, v) intersected with the disk is either the full triangle
// (piece inside the disk) or the circular sector over its angle span (piece
// outside). The triangle case has a closed form: with
// ω = (x dy − y dx) / (2π (1 + x² + y²)), dω is the FS density and the two
// radial legs of the fan triangle contribute nothing, so the triangle mass is
// the ω-integral along u→v alone (x y' − y x' is constant on a segment). The
// sector over angle Δθ carries mass Δθ / 4π. Signed contributions over the
// CCW boundary sum to the clipped mass.
// ---------------------------------------------------------------------------

namespace {

double segment_mass(double ax, double ay, double bx, double by) {
  double dx = bx - ax, dy = by - ay;
  double cross = ax * dy - ay * dx;
  if (cross == 0.0) return 0.0;
  double A = dx * dx + dy * dy;
  double B = 2.0 * (ax * dx + ay * dy);
  double C = 1.0 + ax * ax + ay * ay;
  double disc = 4.0 * A * C - B * B;  // = 4(|d|² + cross²) > 0
  double s = std::sqrt(disc);
  double integral = 2.0 / s * (std::atan((2.0 * A + B) / s) - std::atan(B / s));
  return cross * integral / (2.0 * kPi);
}

double sector_mass(double ax, double ay, double bx, double by) {
  double cross = ax * by - ay * bx;
  double dot = ax * bx + ay * by;
  return std::atan2(cross, dot) / (4.0 * kPi);
}

}  // namespace

double fs_box_disk_mass(double x0, double x1, double y0, double y1) {
  const double cx[4] = {x0, x1, x1, x0};
  const double cy[4] = {y0, y0, y1, y1};

  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    double ax = cx[e], ay = cy[e];
    double bx = cx[(e + 1) % 4], by = cy[(e + 1) % 4];
    double dx = bx - ax, dy = by - ay;
    // |p + t d|² = 1
    double A = dx * dx + dy * dy;
    double B = 2.0 * (ax * dx + ay * dy);
    double C = ax * ax + ay * ay - 1.0;
    double ts[2];
    int nt = 0;
    double disc = B * B - 4.0 * A * C;
    if (A > 0.0 && disc > 0.0) {
      double sd = std::sqrt(disc);
      double t1 = (-B - sd) / (2.0 * A), t2 = (-B + sd) / (2.0 * A);
      if (t1 > 1e-14 && t1 < 1.0 - 1e-14) ts[nt++] = t1;
      if (t2 > 1e-14 && t2 < 1.0 - 1e-14 && t2 - t1 > 1e-14) ts[nt++] = t2;
    }
    double prev_t = 0.0;
    double px = ax, py = ay;
    for (int k = 0; k <= nt; ++k) {
      double t = (k < nt) ? ts[k] : 1.0;
      double qx = ax + t * dx, qy = ay + t * dy;
      double mt = 0.5 * (prev_t + t);
      double mx = ax + mt * dx, my = ay + mt * dy;
      if (mx * mx + my * my < 1.0) {
        total += segment_mass(px, py, qx, qy);
      } else {
        total += sector_mass(px, py, qx, qy);
      }
      prev_t = t;
      px = qx;
      py = qy;
    }
  }
  return std::max(0.0, total);
}

// ---------------------------------------------------------------------------
// AtlasGrid
// ---------------------------------------------------------------------------

AtlasGrid::AtlasGrid(int resolution) : n_(resolution) {
  if (n_ < 1) throw std::invalid_argument("AtlasGrid: resolution must be positive");
  build_weights();
  build_adjacency();
}

int AtlasGrid::locate(const ProjPoint& p) const {
  auto [chart, zeta] = chart_coord(p);
  auto idx = [&](double v) {
    int i = static_cast<int>(std::floor((v + 1.0) * 0.5 * n_));
    return std::clamp(i, 0, n_ - 1);
  };
  return cell_index(chart, idx(zeta.real()), idx(zeta.imag()));
}

std::array<double, 4> AtlasGrid::cell_bounds(int id) const {
  auto [i, j] = cell_ij(id);
  double h = 2.0 / n_;
  return {-1.0 + i * h, -1.0 + (i + 1) * h, -1.0 + j * h, -1.0 + (j + 1) * h};
}

ProjPoint AtlasGrid::cell_center(int id) const {
  auto bb = cell_bounds(id);
  Chart chart = cell_chart(id);
  double mx = 0.5 * (bb[0] + bb[1]);
  double my = 0.5 * (bb[2] + bb[3]);
  double r = std::hypot(mx, my);
  double rmax = chart == Chart::Zero ? 1.0 : 1.0 - 1e-9;
  if (r > rmax && r > 0.0) {
    // Pull the midpoint radially back into the disk so the representative
    // stays in this cell's own chart region.
    mx *= rmax / r;
    my *= rmax / r;
  }
  return point_from_chart(chart, cdouble(mx, my));
}

void AtlasGrid::build_weights() {
  weights_.assign(cell_count(), 0.0);
  for (int id = 0; id < cell_count(); ++id) {
    auto bb = cell_bounds(id);
    double w = fs_box_disk_mass(bb[0], bb[1], bb[2], bb[3]);
    // cancellation in the sector sum can leave a few ulps on cells that are
    // entirely outside the disk; those must stay unreachable
    weights_[id] = w > 1e-14 ? w : 0.0;
  }
}

void AtlasGrid::build_adjacency() {
  adjacency_.assign(cell_count(), {});
  std::vector<std::set<int>> adj(cell_count());
  int nsq = n_ * n_;
  for (int id = 0; id < cell_count(); ++id) {
    if (!cell_valid(id)) continue;
    auto [i, j] = cell_ij(id);
    int base = id < nsq ? 0 : nsq;
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        int ni = i + di, nj = j + dj;
        if (ni < 0 || ni >= n_ || nj < 0 || nj >= n_) continue;
        int nid = base + nj * n_ + ni;
        if (cell_valid(nid)) adj[id].insert(nid);
      }
    }
  }
  // Seam matching: the sphere point with chart-0 coordinate e^{iθ} has
  // chart-1 coordinate e^{-iθ}; walk the circle densely and link the two
  // charts' boundary cells.
  int samples = 16 * n_;
  auto ring_cell = [&](Chart chart, double x, double y) {
    auto idx = [&](double v) {
      int k = static_cast<int>(std::floor((v + 1.0) * 0.5 * n_));
      return std::clamp(k, 0, n_ - 1);
    };
    return cell_index(chart, idx(x), idx(y));
  };
  int prev0 = -1, prev1 = -1;
  for (int s = 0; s <= samples; ++s) {
    double th = 2.0 * kPi * s / samples;
    // stay strictly inside each disk so the located cells are the valid ones
    double rr = 1.0 - 1e-9;
    int c0 = ring_cell(Chart::Zero, rr * std::cos(th), rr * std::sin(th));
    int c1 = ring_cell(Chart::One, rr * std::cos(th), -rr * std::sin(th));
    if (cell_valid(c0) && cell_valid(c1)) {
      adj[c0].insert(c1);
      adj[c1].insert(c0);
    }
    if (prev0 >= 0 && cell_valid(prev0) && cell_valid(c1)) {
      adj[prev0].insert(c1);
      adj[c1].insert(prev0);
    }
    if (prev1 >= 0 && cell_valid(prev1) && cell_valid(c0)) {
      adj[prev1].insert(c0);
      adj[c0].insert(prev1);
    }
    prev0 = c0;
    prev1 = c1;
  }
  for (int id = 0; id < cell_count(); ++id) {
    adjacency_[id].assign(adj[id].begin(), adj[id].end());
  }
}

}  // namespace corrdyn
