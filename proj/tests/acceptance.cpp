// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured numbers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "corrdyn/branches.hpp"
#include "corrdyn/chainio.hpp"
#include "corrdyn/cli.hpp"
#include "corrdyn/measure.hpp"
#include "corrdyn/relation.hpp"
#include "corrdyn/rng.hpp"
#include "test_util.hpp"

using namespace corrdyn;
using namespace corrdyn::testutil;
using nlohmann::json;
namespace fs = std::filesystem;

#ifndef CORRDYN_CLI_PATH
#define CORRDYN_CLI_PATH "./corrdyn"
#endif

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
}

fs::path work_dir() {
  fs::path p = fs::temp_directory_path() / "corrdyn_acceptance";
  fs::create_directories(p);
  return p;
}

// Runs the CLI binary; returns exit code, fills the parsed report.
int run_cli(const std::string& args, json* rep_out, const std::string& env = "") {
  fs::path out = work_dir() / "cli_stdout.json";
  std::string cmd = env + " " + std::string(CORRDYN_CLI_PATH) + " " + args + " > " +
                    out.string() + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  if (rep_out) {
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    *rep_out = json::parse(ss.str(), nullptr, false);
  }
  return WEXITSTATUS(rc);
}

std::string write_chain(const Chain& c, const std::string& name) {
  fs::path p = work_dir() / name;
  save_chain_file(c, p.string());
  return p.string();
}

double band_mass(const SphereHistogram& h, double rlo, double rhi) {
  CellSet band = CellSet::from_modulus_band(*h.grid, rlo, rhi);
  double m = 0.0;
  for (int id : band.members()) m += h.mass[id];
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("acceptance");

TEST_CASE("criterion 1: resultant composition") {
  Timer t1;
  Chain sq = chain_of(poly_w_minus_z2());
  Chain c2 = compose(sq, sq);
  double err = unit_scalar_distance(make_poly(4, 1, {{0, 1, 1.0}, {4, 0, -1.0}}),
                                    c2.components()[0].poly);
  double t_sq = t1.seconds();

  Timer t2;
  Chain inv = chain_of(poly_zw_minus_1());
  Chain ident = compose(inv, inv);
  double err2 = unit_scalar_distance(make_poly(1, 1, {{1, 0, 1.0}, {0, 1, -1.0}}),
                                     ident.components()[0].poly);
  SplitMix64 g(1001);
  double worst_round = 0.0;
  for (int k = 0; k < 100; ++k) {
    ProjPoint z = rand_sphere_point(g);
    ProjPoint once = forward(inv, z).roots[0].point;
    ProjPoint twice = forward(inv, once).roots[0].point;
    worst_round = std::max(worst_round, chordal(twice, z));
  }
  double t_inv = t2.seconds();

  bool pass = err <= 1e-9 && err2 <= 1e-9 && worst_round <= 1e-9 && t_sq < 1.0 &&
              t_inv < 1.0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "squaring^2 coeff err %.2e, involution^2 coeff err %.2e, 100-point "
                "round-trip %.2e, times %.2fs/%.2fs",
                err, err2, worst_round, t_sq, t_inv);
  report(1, pass, buf);
  CHECK(pass);
}

TEST_CASE("criterion 2: degree multiplicativity and transpose identity") {
  std::vector<Chain> suite{
      chain_of(poly_w_minus_z2()),
      chain_of(poly_zw_minus_1()),
      chain_of(poly_z2w2_minus_1()),
      chain_of(poly_z_minus_w3()),
      Chain::from_components({{poly_w_minus_z2(), 1}, {poly_zw_minus_1(), 1}}, true)};
  bool degrees_ok = true, transpose_ok = true;
  for (const auto& c : suite) {
    DegreePair d = degrees(c);
    for (int n = 1; n <= 3; ++n) {
      double proj = std::pow(double(d.d0), n) * std::pow(double(d.d1), n);
      if (proj > 4096.0) continue;
      Chain it = iterate(c, n);
      DegreePair dn = degrees(it);
      if (dn.d0 != std::llround(std::pow(double(d.d0), n)) ||
          dn.d1 != std::llround(std::pow(double(d.d1), n)))
        degrees_ok = false;
      Chain lhs = transpose(it);
      Chain rhs = iterate(transpose(c), n);
      if (lhs.components().size() != rhs.components().size()) {
        transpose_ok = false;
        continue;
      }
      std::vector<bool> used(rhs.components().size(), false);
      for (const auto& lc : lhs.components()) {
        bool matched = false;
        for (std::size_t k = 0; k < rhs.components().size(); ++k) {
          if (used[k] || lc.mult != rhs.components()[k].mult) continue;
          if (unit_scalar_distance(lc.poly, rhs.components()[k].poly) < 1e-8) {
            used[k] = true;
            matched = true;
            break;
          }
        }
        if (!matched) transpose_ok = false;
      }
    }
  }
  bool pass = degrees_ok && transpose_ok;
  report(2, pass,
         std::string("five-chain suite, n <= 3: exact degree law ") +
             (degrees_ok ? "holds" : "FAILS") + ", transpose identity " +
             (transpose_ok ? "holds" : "FAILS"));
  CHECK(pass);
}

TEST_CASE("criterion 3: fiber completeness") {
  Timer t;
  SplitMix64 g(33033);
  int exceptions = 0;
  double worst_residual = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    int ncomp = 1 + static_cast<int>(g.next() % 2);
    std::vector<Chain::Component> comps;
    for (int j = 0; j < ncomp; ++j)
      comps.push_back({rand_dense_poly(g, 1 + (g.next() % 3), 1 + (g.next() % 3)), 1});
    Chain c = Chain::from_components(comps, false);
    DegreePair d = degrees(c);
    for (int k = 0; k < 100; ++k) {
      ProjPoint z = rand_sphere_point(g);
      RootSet fwd = forward(c, z), bwd = backward(c, z);
      if (fwd.total_multiplicity() != d.d0) ++exceptions;
      if (bwd.total_multiplicity() != d.d1) ++exceptions;
      for (const auto& comp : c.components()) {
        for (const auto& r : roots_homogeneous(fiber_poly_w(comp.poly, z)).roots)
          worst_residual = std::max(worst_residual, std::abs(eval(comp.poly, z, r.point)));
        for (const auto& r : roots_homogeneous(fiber_poly_z(comp.poly, z)).roots)
          worst_residual = std::max(worst_residual, std::abs(eval(comp.poly, r.point, z)));
      }
    }
  }
  double secs = t.seconds();
  bool pass = exceptions == 0 && worst_residual <= 1e-7 && secs < 10.0;
  char buf[192];
  std::snprintf(buf, sizeof buf,
                "10 chains x 100 points: %d exceptions, worst residual %.2e, %.2fs",
                exceptions, worst_residual, secs);
  report(3, pass, buf);
  CHECK(pass);
}

// shared between criteria 4 and 5
static SphereHistogram g_crit4_hist;
static AtlasGrid* g_grid128 = nullptr;

TEST_CASE("criterion 4: Brolin-type equidistribution for the squaring chain") {
  Timer t;
  static AtlasGrid grid(128);
  g_grid128 = &grid;
  Chain sq = chain_of(poly_w_minus_z2());
  const long n = 100000;
  const std::uint64_t seed = 20260809;
  SphereHistogram h = estimate_measure(sq, ProjPoint::affine(3.0), 20, n, grid, seed);
  g_crit4_hist = h;
  double annulus = band_mass(h, 0.9, 1.1);

  std::array<cdouble, 4> mom{cdouble(0), cdouble(0), cdouble(0), cdouble(0)};
  for (long i = 0; i < n; ++i) {
    cdouble z =
        sample_backward_orbit(sq, ProjPoint::affine(3.0), 20, seed, i).affine_value();
    cdouble zm = z;
    for (int m = 0; m < 4; ++m) {
      mom[m] += zm;
      zm *= z;
    }
  }
  double worst_moment = 0.0;
  for (int m = 0; m < 4; ++m)
    worst_moment = std::max(worst_moment, std::abs(mom[m]) / double(n));

  SphereHistogram h2 =
      estimate_measure(sq, ProjPoint::affine(cdouble(0.5, 0.5)), 20, n, grid, seed + 1);
  double ws = weakstar_distance(h, h2);
  double secs = t.seconds();
  bool pass = annulus >= 0.99 && worst_moment <= 0.05 && ws <= 0.05 && secs < 30.0;
  char buf[192];
  std::snprintf(buf, sizeof buf,
                "annulus mass %.4f, worst |moment| %.4f, cross-start weak* %.4f, %.1fs",
                annulus, worst_moment, ws, secs);
  report(4, pass, buf);
  CHECK(pass);
}

TEST_CASE("criterion 5: F*-invariance of the estimated measure") {
  REQUIRE(g_crit4_hist.grid != nullptr);
  Chain sq = chain_of(poly_w_minus_z2());
  double defect = check_pullback_invariance(sq, g_crit4_hist);
  bool pass = defect <= 0.02;
  char buf[96];
  std::snprintf(buf, sizeof buf, "max invariance defect over 65 functions: %.4f", defect);
  report(5, pass, buf);
  CHECK(pass);
}

TEST_CASE("criterion 6: escape dynamics of the d0 > d1 chain") {
  Chain par = chain_of(poly_z_minus_w2());
  REQUIRE(g_grid128 != nullptr);
  AtlasGrid& grid = *g_grid128;

  SphereHistogram h =
      estimate_measure(par, ProjPoint::affine(cdouble(1.5, 0.2)), 8, 5000, grid, 17);
  double inf_mass = 0.0;
  for (int id = 0; id < grid.cell_count(); ++id)
    if (h.mass[id] > 0.0 &&
        chordal(grid.cell_center(id), ProjPoint::infinity()) < 0.05)
      inf_mass += h.mass[id];

  CellSet outer =
      CellSet::from_modulus_band(grid, 2.0, std::numeric_limits<double>::infinity());
  BlockCheck chk = attractor_block_check(par, outer, Direction::Backward);

  bool omega_ok = false;
  int omega_cells = 0;
  if (chk.certified) {
    OmegaResult om = omega_limit_cells(par, outer, Direction::Backward);
    omega_cells = om.cells.count();
    omega_ok = om.fixpoint && omega_cells > 0;
    for (int id : om.cells.members())
      if (chordal(grid.cell_center(id), ProjPoint::infinity()) > 0.1) omega_ok = false;
  }

  const TestDictionary& dict = test_dictionary();
  bool pf_ok = true;
  double worst_osc = 0.0;
  for (int i = 0; i < dict.size() && pf_ok; ++i) {
    GridFunction f0 = GridFunction::sample(outer, [&](const ProjPoint& p) {
      return cdouble(dict.eval(i, p), 0.0);
    });
    PfLimit lim = pf_converge(par, f0, 25, 1e-3);
    worst_osc = std::max(worst_osc, lim.oscillation.back());
    if (!lim.converged || lim.oscillation.back() > 1e-3) pf_ok = false;
  }

  bool pass = inf_mass >= 0.999 && chk.certified && omega_ok && pf_ok;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "mass near infinity %.5f, outer block %s, omega %d cells within 0.1 "
                "of infinity: %s, pf oscillation <= 1e-3 by n=25: %s (worst %.2e)",
                inf_mass, chk.certified ? "Certified" : "REFUTED", omega_cells,
                omega_ok ? "yes" : "NO", pf_ok ? "yes" : "NO", worst_osc);
  report(6, pass, buf);
  CHECK(pass);
}

TEST_CASE("criterion 7: strong-repeller witnesses") {
  Chain sq = chain_of(poly_w_minus_z2());
  WitnessTrace t1 =
      strong_repeller_witness(sq, ProjPoint::affine(3.0), ProjPoint::affine(1.0), 40);
  Chain par = chain_of(poly_z_minus_w2());
  WitnessTrace t2 =
      strong_repeller_witness(par, ProjPoint::affine(2.0), ProjPoint::infinity(), 12);
  bool pass = t1.verdict == WitnessVerdict::Converged && t1.distances.back() <= 1e-6 &&
              t2.verdict == WitnessVerdict::Converged && t2.distances.back() <= 1e-6;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "squaring witness: %s (%.2e in 40 steps); escape witness: %s (%.2e in "
                "12 steps)",
                to_string(t1.verdict), t1.distances.back(), to_string(t2.verdict),
                t2.distances.back());
  report(7, pass, buf);
  CHECK(pass);
}

TEST_CASE("criterion 8: support vs normality for the squaring chain") {
  Timer t;
  Chain sq = chain_of(poly_w_minus_z2());

  // statistical check on 500 seeded sphere samples
  SplitMix64 g(31415);
  int far_total = 0, far_normal = 0, near_total = 0, near_nonnormal = 0;
  for (int k = 0; k < 500; ++k) {
    ProjPoint p = rand_sphere_point(g);
    double dist = 2.0;
    for (int s = 0; s < 512; ++s)
      dist = std::min(dist, chordal(p, ProjPoint::affine(std::polar(
                                           1.0, 2.0 * std::numbers::pi * s / 512.0))));
    if (dist > 0.1) {
      ++far_total;
      if (marty_indicator(sq, p, 12).flag == NormalityFlag::Normal) ++far_normal;
    } else if (dist < 0.02) {
      ++near_total;
      if (marty_indicator(sq, p, 12).flag == NormalityFlag::NonNormal) ++near_nonnormal;
    }
  }

  // grid overlay via the CLI
  std::string chain_path = write_chain(sq, "w_minus_z2.json");
  fs::path out = work_dir() / "crit8";
  json rep;
  int rc = run_cli("normality --chain " + chain_path + " --out " + out.string() +
                       " --grid 128 --normality-depth 12 --depth 20 --samples 100000 "
                       "--start 3,0 --seed 424242",
                   &rep);
  int overlap = rc == 0 ? rep["results"]["overlap_support_normal"].get<int>() : -1;
  int support = rc == 0 ? rep["results"]["support_cells"].get<int>() : -1;
  double secs = t.seconds();

  bool stat_ok = far_total > 0 && far_normal == far_total && near_total >= 0 &&
                 near_nonnormal * 100 >= near_total * 95;
  bool pass = stat_ok && rc == 0 && overlap == 0 && secs < 60.0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "far Normal %d/%d, near NonNormal %d/%d, support cells %d, "
                "support-Normal overlap %d, %.1fs",
                far_normal, far_total, near_nonnormal, near_total, support, overlap,
                secs);
  report(8, pass, buf);
  CHECK(pass);
}

TEST_CASE("criterion 9: construction pipeline verdict (frozen)") {
  Timer t;
  fs::path out = work_dir() / "crit9";
  json rep;
  int rc = run_cli(
      "construct61 --p [0,0,1] --q [1.5,-1.5,1] --max-n 6 --grid 128 --max-dilation 8 "
      "--samples 20000 --depth 16 --seed 99 --out " +
          out.string(),
      &rep);
  double secs = t.seconds();
  std::string verdict = rc == 0 ? rep["results"]["verdict"].get<std::string>() : "error";
  bool has_diag = rc == 0 && rep["results"].contains("search") &&
                  !rep["results"]["search"].empty() &&
                  rep["results"].contains("witness");

  // Frozen regression expectation from the first verified run: the attracting
  // fixed point of Q at 1 does not pull the whole unit circle (the point -1
  // escapes under Q), so no annular block can satisfy the q-image condition
  // and the pipeline reports NotCertified with per-N diagnostics.
  bool frozen_ok = verdict == "NotCertified";
  bool q_diag_ok = false;
  if (has_diag) {
    q_diag_ok = true;
    for (const auto& jn : rep["results"]["search"]) {
      if (jn.contains("block_search") &&
          jn["block_search"].value("q_image_certified", true))
        q_diag_ok = false;
    }
  }
  std::string witness_verdict =
      has_diag ? rep["results"]["witness"].value("verdict", "?") : "?";

  bool pass = rc == 0 && frozen_ok && has_diag && q_diag_ok && secs < 120.0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "verdict %s (frozen: NotCertified), q-image refuted at every N: %s, "
                "witness %s, %.1fs",
                verdict.c_str(), q_diag_ok ? "yes" : "NO", witness_verdict.c_str(), secs);
  report(9, pass, buf);
  CHECK(pass);
}

TEST_CASE("criterion 9b: construction pipeline config errors") {
  json rep;
  int rc = run_cli("construct61 --p [0,0,1] --q [0,1] --out " +
                       (work_dir() / "crit9b").string(),
                   &rep);
  bool pass = rc == 2;
  report(9, pass, "deg Q = 1 rejected with ConfigError exit code 2 (sub-check)");
  CHECK(pass);
}

TEST_CASE("criterion 10: determinism across worker counts") {
  Timer t;
  Chain sq = chain_of(poly_w_minus_z2());
  std::string sq_path = write_chain(sq, "w_minus_z2.json");
  Chain par = chain_of(poly_z_minus_w2());
  std::string par_path = write_chain(par, "z_minus_w2.json");

  struct Run {
    std::string name;
    std::string args;
  };
  std::vector<Run> runs = {
      {"measure",
       "measure --chain " + sq_path +
           " --grid 128 --depth 20 --samples 100000 --start 3,0 --start 0.5,0.5 "
           "--seed 20260809"},
      {"blocks",
       "blocks --chain " + par_path +
           " --grid 128 --region outer:2 --direction bwd --witness-from 2,0 "
           "--witness-to inf --witness-steps 12 --seed 7"},
      {"normality",
       "normality --chain " + sq_path +
           " --grid 128 --normality-depth 12 --depth 20 --samples 100000 --start 3,0 "
           "--seed 424242"},
      {"construct61",
       "construct61 --p [0,0,1] --q [1.5,-1.5,1] --max-n 3 --grid 64 --max-dilation 6 "
       "--samples 20000 --depth 16 --seed 99"},
  };
  bool pass = true;
  std::string detail;
  for (const auto& r : runs) {
    json rep1, rep2;
    fs::path o1 = work_dir() / ("det1_" + r.name);
    fs::path o2 = work_dir() / ("det2_" + r.name);
    int rc1 = run_cli(r.args + " --out " + o1.string(), &rep1, "CORRDYN_THREADS=1");
    int rc2 = run_cli(r.args + " --out " + o2.string(), &rep2, "CORRDYN_THREADS=3");
    bool same = rc1 == rc2 && !rep1.is_discarded() && !rep2.is_discarded() &&
                rep1["results"].dump() == rep2["results"].dump();
    if (!same) pass = false;
    detail += r.name + (same ? " ok; " : " DIFFERS; ");
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s(%.0fs)", detail.c_str(), t.seconds());
  report(10, pass, buf);
  CHECK(pass);
}

TEST_SUITE_END();
