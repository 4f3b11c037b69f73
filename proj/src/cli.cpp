#include "corrdyn/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "corrdyn/branches.hpp"
#include "corrdyn/chainio.hpp"
#include "corrdyn/errors.hpp"
#include "corrdyn/measure.hpp"
#include "corrdyn/parallel.hpp"
#include "corrdyn/rng.hpp"

namespace corrdyn::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    auto d = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double, std::milli>(d).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

json point_json(const ProjPoint& p) {
  return json::array({p.a.real(), p.a.imag(), p.b.real(), p.b.imag()});
}

json config_echo(const Options& opt, const std::string& command) {
  json cfg;
  cfg["command"] = command;
  cfg["chain"] = opt.chain_path;
  cfg["out_dir"] = opt.out_dir;
  cfg["seed"] = opt.seed;
  cfg["grid"] = opt.grid;
  cfg["depth"] = opt.depth;
  cfg["samples"] = opt.samples;
  cfg["direction"] = opt.direction == Direction::Forward ? "fwd" : "bwd";
  cfg["starts"] = opt.starts;
  cfg["power"] = opt.power;
  cfg["max_n"] = opt.max_n;
  cfg["max_dilation"] = opt.max_dilation;
  cfg["witness_steps"] = opt.witness_steps;
  cfg["normality_depth"] = opt.normality_depth;
  cfg["region"] = opt.region;
  cfg["samples_per_cell"] = opt.samples_per_cell;
  cfg["padding"] = opt.padding;
  cfg["workers"] = worker_count();
  cfg["tolerances"] = {{"point_eq", kPointEqTol},
                       {"cluster_radius", kClusterRadius},
                       {"coeff_trim_rel", kCoeffTrimRel},
                       {"residual", kResidualTol},
                       {"critical_margin", kCriticalMargin},
                       {"path_step_bound", kPathStepBound}};
  return cfg;
}

json report_skeleton(const Options& opt, const std::string& command) {
  json rep;
  rep["schema_version"] = 1;
  rep["dictionary_version"] = TestDictionary::kVersion;
  rep["config"] = config_echo(opt, command);
  rep["results"] = json::object();
  rep["timings_ms"] = json::object();
  rep["artifacts"] = json::array();
  return rep;
}

ProjPoint start_point(const Options& opt, std::size_t idx) {
  if (idx < opt.starts.size()) return parse_point(opt.starts[idx]);
  return ProjPoint::affine(cdouble(3.0, 0.0));
}

void write_histogram_csv(const SphereHistogram& h, const std::string& path) {
  std::ofstream out(path);
  out << "chart,i,j,mass\n";
  const AtlasGrid& g = *h.grid;
  char buf[96];
  for (int id = 0; id < g.cell_count(); ++id) {
    if (h.mass[id] == 0.0) continue;
    auto [i, j] = g.cell_ij(id);
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g\n",
                  static_cast<int>(g.cell_chart(id)), i, j, h.mass[id]);
    out << buf;
  }
}

void write_ppm(const std::string& path, int n,
               const std::function<std::array<unsigned char, 3>(int, int)>& pixel) {
  std::ofstream out(path, std::ios::binary);
  out << "P6\n" << n << " " << n << "\n255\n";
  for (int j = n - 1; j >= 0; --j)
    for (int i = 0; i < n; ++i) {
      auto rgb = pixel(i, j);
      out.write(reinterpret_cast<const char*>(rgb.data()), 3);
    }
}

void render_histogram(const SphereHistogram& h, const std::string& prefix, json& artifacts) {
  const AtlasGrid& g = *h.grid;
  int n = g.resolution();
  double mmax = 0.0;
  for (double m : h.mass) mmax = std::max(mmax, m);
  if (mmax <= 0.0) mmax = 1.0;
  for (int chart = 0; chart < 2; ++chart) {
    std::string path = prefix + "_chart" + std::to_string(chart) + ".ppm";
    write_ppm(path, n, [&](int i, int j) -> std::array<unsigned char, 3> {
      int id = g.cell_index(chart == 0 ? Chart::Zero : Chart::One, i, j);
      if (!g.cell_valid(id)) return {0, 0, 0};
      double v = h.mass[id] / mmax;
      double t = std::log1p(9999.0 * v) / std::log(10000.0);
      auto ch = [](double x) {
        return static_cast<unsigned char>(std::clamp(x, 0.0, 1.0) * 255.0 + 0.5);
      };
      return {ch(t), ch(t * t * 0.9 + 0.1 * t), ch(0.3 + 0.5 * t - 0.4 * t * t)};
    });
    artifacts.push_back(path);
  }
}

std::vector<cdouble> parse_poly_coeffs(const std::string& text, const char* what) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what(), static_cast<long>(e.byte));
  }
  if (!arr.is_array() || arr.empty())
    throw ConfigError(std::string(what) + ": expected a JSON array of coefficients");
  std::vector<cdouble> out;
  for (const auto& v : arr) {
    if (v.is_number()) out.emplace_back(v.get<double>(), 0.0);
    else if (v.is_array() && v.size() == 2)
      out.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    else throw ConfigError(std::string(what) + ": coefficients must be numbers or [re, im]");
  }
  while (out.size() > 1 && std::abs(out.back()) == 0.0) out.pop_back();
  return out;
}

// Q^N as a self-map iterate: Q o Q o ... o Q.
std::vector<cdouble> poly_iterate(const std::vector<cdouble>& q, int n) {
  std::vector<cdouble> acc{cdouble(0.0), cdouble(1.0)};  // identity
  for (int k = 0; k < n; ++k) {
    // acc := q(acc)
    std::vector<cdouble> result{cdouble(0.0)};
    std::vector<cdouble> power{cdouble(1.0)};
    for (std::size_t d = 0; d < q.size(); ++d) {
      if (result.size() < power.size()) result.resize(power.size(), cdouble(0.0));
      for (std::size_t t = 0; t < power.size(); ++t) result[t] += q[d] * power[t];
      if (d + 1 < q.size()) {
        std::vector<cdouble> np(power.size() + acc.size() - 1, cdouble(0.0));
        for (std::size_t i = 0; i < power.size(); ++i)
          for (std::size_t j = 0; j < acc.size(); ++j) np[i + j] += power[i] * acc[j];
        power = std::move(np);
      }
    }
    acc = std::move(result);
  }
  return acc;
}

cdouble poly_eval(const std::vector<cdouble>& p, cdouble z) {
  cdouble acc(0.0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
  return acc;
}

// Measure run with deterministic moments: integer counts merge order-free,
// float moment partials use a fixed chunk count so sums are byte-identical
// for every worker count.
struct MeasureRun {
  SphereHistogram hist;
  std::array<double, 4> abs_moments{0, 0, 0, 0};
};

MeasureRun measure_run(const Chain& c, const ProjPoint& z, int depth, long nsamples,
                       const AtlasGrid& grid, std::uint64_t seed) {
  MeasureRun run;
  run.hist = estimate_measure(c, z, depth, nsamples, grid, seed);
  constexpr int kChunks = 256;
  std::vector<std::array<cdouble, 4>> partial(
      kChunks, {cdouble(0), cdouble(0), cdouble(0), cdouble(0)});
  long chunk = (nsamples + kChunks - 1) / kChunks;
  parallel_for(kChunks, [&](std::size_t w) {
    long lo = static_cast<long>(w) * chunk;
    long hi = std::min(nsamples, lo + chunk);
    for (long i = lo; i < hi; ++i) {
      ProjPoint p = sample_backward_orbit(c, z, depth, seed, static_cast<std::uint64_t>(i));
      cdouble zv = p.affine_value();
      if (!std::isfinite(zv.real()) || !std::isfinite(zv.imag())) continue;
      cdouble zm = zv;
      for (int m = 0; m < 4; ++m) {
        partial[w][m] += zm;
        zm *= zv;
      }
    }
  });
  std::array<cdouble, 4> total{cdouble(0), cdouble(0), cdouble(0), cdouble(0)};
  for (int w = 0; w < kChunks; ++w)
    for (int m = 0; m < 4; ++m) total[m] += partial[w][m];
  for (int m = 0; m < 4; ++m)
    run.abs_moments[m] = std::abs(total[m]) / static_cast<double>(nsamples);
  return run;
}

json cellset_json(const CellSet& s) {
  json out;
  out["cells"] = s.count();
  json rle = json::array();
  for (auto [start, len] : s.run_length()) rle.push_back({start, len});
  out["rle"] = std::move(rle);
  return out;
}

}  // namespace

CellSet parse_region(const AtlasGrid& grid, const std::string& text) {
  auto bad = [&]() -> CellSet {
    throw ConfigError("region: expected outer:R | annulus:rlo,rhi | disk:R | point:re,im | inf");
  };
  if (text == "inf") return CellSet::from_point(grid, ProjPoint::infinity());
  auto colon = text.find(':');
  if (colon == std::string::npos) return bad();
  std::string kind = text.substr(0, colon), args = text.substr(colon + 1);
  double a = 0.0, b = 0.0;
  char comma = 0;
  std::istringstream ss(args);
  if (kind == "outer") {
    if (!(ss >> a)) return bad();
    return CellSet::from_modulus_band(grid, a, std::numeric_limits<double>::infinity());
  }
  if (kind == "disk") {
    if (!(ss >> a)) return bad();
    return CellSet::from_modulus_band(grid, 0.0, a);
  }
  if (kind == "annulus") {
    if (!(ss >> a >> comma >> b) || comma != ',') return bad();
    return CellSet::from_modulus_band(grid, a, b);
  }
  if (kind == "point") {
    if (!(ss >> a >> comma >> b) || comma != ',') return bad();
    return CellSet::from_point(grid, ProjPoint::affine(cdouble(a, b)));
  }
  return bad();
}

json cmd_info(const Options& opt) {
  json rep = report_skeleton(opt, "info");
  Stopwatch sw;
  Chain c = load_chain_file(opt.chain_path);
  DegreePair d = degrees(c);
  json& res = rep["results"];
  res["d0"] = d.d0;
  res["d1"] = d.d1;
  res["components"] = json::array();
  for (const auto& comp : c.components())
    res["components"].push_back({{"bidegree", {comp.poly.dz, comp.poly.dw}},
                                 {"mult", comp.mult}});
  res["critical_value_candidates"] = json::array();
  for (const auto& p : critical_value_candidates(c))
    res["critical_value_candidates"].push_back(point_json(p));
  rep["timings_ms"]["total"] = sw.ms();
  return rep;
}

json cmd_compose(const Options& opt) {
  json rep = report_skeleton(opt, "compose");
  Stopwatch sw;
  Chain c = load_chain_file(opt.chain_path);
  DegreePair d = degrees(c);
  Chain it = iterate(c, opt.power, 4096);
  DegreePair dn = degrees(it);
  json& res = rep["results"];
  res["power"] = opt.power;
  res["d0"] = dn.d0;
  res["d1"] = dn.d1;
  res["degree_law_holds"] =
      dn.d0 == static_cast<int>(std::llround(std::pow(double(d.d0), opt.power))) &&
      dn.d1 == static_cast<int>(std::llround(std::pow(double(d.d1), opt.power)));
  std::string path = opt.out_chain.empty()
                         ? (fs::path(opt.out_dir) / "composed.json").string()
                         : opt.out_chain;
  save_chain_file(it, path);
  rep["artifacts"].push_back(path);
  Chain back = load_chain_file(path);
  double dev = 0.0;
  for (std::size_t k = 0; k < it.components().size(); ++k) {
    const auto& a = it.components()[k].poly;
    const auto& b = back.components()[k].poly;
    for (std::size_t t = 0; t < a.c.size() && t < b.c.size(); ++t)
      dev = std::max(dev, std::abs(a.c[t] - b.c[t]));
  }
  res["roundtrip_max_coeff_deviation"] = dev;
  rep["timings_ms"]["total"] = sw.ms();
  return rep;
}

json cmd_measure(const Options& opt) {
  json rep = report_skeleton(opt, "measure");
  Stopwatch sw;
  Chain c = load_chain_file(opt.chain_path);
  if (opt.samples < 1000) throw ConfigError("measure: need at least 1000 samples");
  AtlasGrid grid(opt.grid);
  std::size_t nstarts = std::max<std::size_t>(1, opt.starts.size());
  std::vector<SphereHistogram> hists;
  json& res = rep["results"];
  res["starts"] = json::array();
  for (std::size_t k = 0; k < nstarts; ++k) {
    ProjPoint z = start_point(opt, k);
    std::uint64_t seed_k = mix_seed(opt.seed, 0x5741 + k);
    MeasureRun run = measure_run(c, z, opt.depth, opt.samples, grid, seed_k);
    json js;
    js["start"] = point_json(z);
    js["abs_moments"] = run.abs_moments;
    js["invariance_defect"] = check_pullback_invariance(c, run.hist);
    int support = 0;
    double band_mass = 0.0, inf_mass = 0.0;
    CellSet band = CellSet::from_modulus_band(grid, 0.9, 1.1);
    for (int id = 0; id < grid.cell_count(); ++id) {
      if (run.hist.mass[id] == 0.0) continue;
      if (run.hist.mass[id] > 1e-4) ++support;
      if (band.contains(id)) band_mass += run.hist.mass[id];
      if (chordal(grid.cell_center(id), ProjPoint::infinity()) < 0.05)
        inf_mass += run.hist.mass[id];
    }
    js["support_cells"] = support;
    js["band_mass_0p9_1p1"] = band_mass;
    js["mass_near_infinity_0p05"] = inf_mass;
    std::string prefix =
        (fs::path(opt.out_dir) / ("measure_start" + std::to_string(k))).string();
    write_histogram_csv(run.hist, prefix + ".csv");
    rep["artifacts"].push_back(prefix + ".csv");
    render_histogram(run.hist, prefix, rep["artifacts"]);
    res["starts"].push_back(std::move(js));
    hists.push_back(std::move(run.hist));
  }
  if (hists.size() > 1) {
    json pw = json::array();
    for (std::size_t a = 0; a < hists.size(); ++a)
      for (std::size_t b = a + 1; b < hists.size(); ++b)
        pw.push_back({{"pair", {a, b}},
                      {"weakstar_distance", weakstar_distance(hists[a], hists[b])}});
    res["pairwise_weakstar"] = std::move(pw);
  }
  rep["timings_ms"]["total"] = sw.ms();
  return rep;
}

json cmd_blocks(const Options& opt) {
  json rep = report_skeleton(opt, "blocks");
  Stopwatch sw;
  Chain c = load_chain_file(opt.chain_path);
  AtlasGrid grid(opt.grid);
  if (opt.region.empty()) throw ConfigError("blocks: --region is required");
  CellSet seed = parse_region(grid, opt.region);
  json& res = rep["results"];
  res["seed_cells"] = seed.count();

  BlockCheck direct = attractor_block_check(c, seed, opt.direction,
                                            opt.samples_per_cell, opt.padding);
  res["seed_certified"] = direct.certified;
  if (!direct.certified) res["seed_offending_cell"] = direct.offending_cell;

  CellSet block(grid);
  bool have_block = direct.certified;
  if (direct.certified) {
    block = seed;
  } else {
    auto found = find_attractor_block(c, seed, opt.direction, opt.max_dilation,
                                      opt.samples_per_cell, opt.padding);
    res["dilation_found"] = found.has_value();
    if (found) {
      block = *found;
      have_block = true;
    }
  }
  res["block_found"] = have_block;
  if (have_block) {
    res["block"] = cellset_json(block);
    OmegaResult om = omega_limit_cells(c, block, opt.direction, 256,
                                       opt.samples_per_cell, opt.padding);
    res["omega"] = cellset_json(om.cells);
    res["omega"]["iterations"] = om.iterations;
    res["omega"]["fixpoint"] = om.fixpoint;
  }
  if (!opt.witness_from.empty() && !opt.witness_to.empty()) {
    WitnessTrace tr = strong_repeller_witness(c, parse_point(opt.witness_from),
                                              parse_point(opt.witness_to),
                                              opt.witness_steps);
    res["witness"] = {{"verdict", to_string(tr.verdict)},
                      {"final_distance", tr.distances.back()},
                      {"distances", tr.distances}};
  }
  rep["timings_ms"]["total"] = sw.ms();
  return rep;
}

json cmd_normality(const Options& opt) {
  json rep = report_skeleton(opt, "normality");
  Stopwatch sw;
  if (opt.grid < 1) throw ConfigError("normality: grid resolution must be positive");
  Chain c = load_chain_file(opt.chain_path);
  AtlasGrid grid(opt.grid);

  std::vector<int> flags(grid.cell_count(), -1);
  std::vector<double> scores(grid.cell_count(), 0.0);
  MartyConfig mcfg;
  parallel_for(grid.cell_count(), [&](std::size_t id) {
    if (!grid.cell_valid(static_cast<int>(id))) return;
    MartyResult m = marty_indicator(c, grid.cell_center(static_cast<int>(id)),
                                    opt.normality_depth, mcfg);
    flags[id] = static_cast<int>(m.flag);
    scores[id] = m.score;
  });
  json& res = rep["results"];
  int counts[3] = {0, 0, 0};
  for (int f : flags)
    if (f >= 0) ++counts[f];
  res["normal_cells"] = counts[static_cast<int>(NormalityFlag::Normal)];
  res["nonnormal_cells"] = counts[static_cast<int>(NormalityFlag::NonNormal)];
  res["inconclusive_cells"] = counts[static_cast<int>(NormalityFlag::Inconclusive)];

  ProjPoint z = start_point(opt, 0);
  SphereHistogram h = estimate_measure(c, z, opt.depth, opt.samples, grid,
                                       mix_seed(opt.seed, 0x5741));
  int support = 0, overlap = 0;
  for (int id = 0; id < grid.cell_count(); ++id) {
    if (h.mass[id] > 1e-4) {
      ++support;
      if (flags[id] == static_cast<int>(NormalityFlag::Normal)) ++overlap;
    }
  }
  res["support_cells"] = support;
  res["overlap_support_normal"] = overlap;

  std::string csv = (fs::path(opt.out_dir) / "normality.csv").string();
  {
    std::ofstream out(csv);
    out << "chart,i,j,score,flag\n";
    char buf[128];
    for (int id = 0; id < grid.cell_count(); ++id) {
      if (flags[id] < 0) continue;
      auto [i, j] = grid.cell_ij(id);
      std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%s\n",
                    static_cast<int>(grid.cell_chart(id)), i, j, scores[id],
                    to_string(static_cast<NormalityFlag>(flags[id])));
      out << buf;
    }
  }
  rep["artifacts"].push_back(csv);
  for (int chart = 0; chart < 2; ++chart) {
    std::string path =
        (fs::path(opt.out_dir) / ("normality_chart" + std::to_string(chart) + ".ppm")).string();
    write_ppm(path, grid.resolution(), [&](int i, int j) -> std::array<unsigned char, 3> {
      int id = grid.cell_index(chart == 0 ? Chart::Zero : Chart::One, i, j);
      if (flags[id] < 0) return {0, 0, 0};
      switch (static_cast<NormalityFlag>(flags[id])) {
        case NormalityFlag::Normal: return {40, 160, 70};
        case NormalityFlag::NonNormal: return {200, 60, 50};
        default: return {150, 150, 150};
      }
    });
    rep["artifacts"].push_back(path);
  }
  rep["timings_ms"]["total"] = sw.ms();
  return rep;
}

json cmd_construct61(const Options& opt) {
  json rep = report_skeleton(opt, "construct61");
  Stopwatch sw;
  std::vector<cdouble> p = parse_poly_coeffs(opt.p_coeffs, "construct61 --p");
  std::vector<cdouble> q1 = parse_poly_coeffs(opt.q_coeffs, "construct61 --q");
  int dp = static_cast<int>(p.size()) - 1;
  int dq = static_cast<int>(q1.size()) - 1;
  if (dp < 2) throw ConfigError("construct61: deg p must be >= 2");
  if (dq < 2) throw ConfigError("construct61: deg Q must be >= 2");
  AtlasGrid grid(opt.grid);
  json& res = rep["results"];

  // attracting fixed points of Q
  std::vector<cdouble> qfix = q1;
  qfix[1] -= 1.0;
  HomUnivariate fixpoly;
  fixpoly.degree = static_cast<int>(qfix.size()) - 1;
  fixpoly.c = qfix;
  std::vector<cdouble> qprime(q1.size() - 1, cdouble(0.0));
  for (std::size_t k = 1; k < q1.size(); ++k) qprime[k - 1] = q1[k] * double(k);
  std::vector<ProjPoint> attracting;
  res["attracting_fixed_points"] = json::array();
  for (const auto& r : roots_homogeneous(fixpoly).roots) {
    if (r.point.is_infinity()) continue;
    cdouble fp = r.point.affine_value();
    double deriv = std::abs(poly_eval(qprime, fp));
    if (deriv < 1.0) {
      attracting.push_back(r.point);
      res["attracting_fixed_points"].push_back(
          {{"point", point_json(r.point)}, {"multiplier", deriv}});
    }
  }

  // seed: support of the Brolin-type measure of p (backward orbits of w = p(z))
  Chain p_chain = Chain::from_components({{graph_w_of_z(p), 1}}, true);
  SphereHistogram jp = estimate_measure(p_chain, ProjPoint::affine(cdouble(1.7, 0.3)),
                                        15, 20000, grid, mix_seed(opt.seed, 0xB0));
  CellSet seed(grid);
  for (int id = 0; id < grid.cell_count(); ++id)
    if (jp.mass[id] > 1e-5) seed.insert(id);
  res["seed_cells"] = seed.count();

  json per_n = json::array();
  bool certified = false;
  int certified_n = -1;
  CellSet block(grid);
  std::vector<cdouble> q_used = q1;
  for (int N = 1; N <= opt.max_n && !certified; ++N) {
    double degN = std::pow(double(dq), N);
    if (degN > 256.0) {
      per_n.push_back({{"N", N}, {"skipped", "degree budget"}});
      break;
    }
    std::vector<cdouble> qN = poly_iterate(q1, N);
    Chain gamma1 = Chain::from_components({{graph_z_of_w(qN), 1}}, true);
    Chain gamma = Chain::from_components(
        {{graph_z_of_w(qN), 1}, {graph_w_of_z(p), 1}}, true);
    json jn;
    jn["N"] = N;
    jn["deg_q"] = static_cast<int>(qN.size()) - 1;
    DegreePair dg = degrees(gamma);
    jn["d0"] = dg.d0;
    jn["d1"] = dg.d1;
    bool found = false;
    CellSet grown = seed;
    json last_diag;
    for (int k = 1; k <= opt.max_dilation && !found; ++k) {
      grown = grown.closure();
      BlockCheck qchk = attractor_block_check(gamma1, grown, Direction::Backward,
                                              opt.samples_per_cell, opt.padding);
      BlockCheck pchk = attractor_block_check(p_chain, grown, Direction::Backward,
                                              opt.samples_per_cell, opt.padding);
      BlockCheck fchk = attractor_block_check(gamma, grown, Direction::Backward,
                                              opt.samples_per_cell, opt.padding);
      last_diag = {{"dilation", k},
                   {"q_image_certified", qchk.certified},
                   {"p_preimage_certified", pchk.certified},
                   {"full_certified", fchk.certified}};
      if (!qchk.certified) last_diag["q_offending_cell"] = qchk.offending_cell;
      if (!pchk.certified) last_diag["p_offending_cell"] = pchk.offending_cell;
      if (fchk.certified) found = true;
    }
    jn["block_search"] = last_diag;
    if (found) {
      certified = true;
      certified_n = N;
      block = grown;
      q_used = qN;
      jn["block_cells"] = grown.count();
    }
    per_n.push_back(std::move(jn));
  }
  res["search"] = std::move(per_n);

  Chain full = Chain::from_components(
      {{graph_z_of_w(q_used), 1}, {graph_w_of_z(p), 1}}, true);

  // witness toward the attracting fixed point (diagnostic either way)
  if (!attracting.empty()) {
    ProjPoint from = grid.cell_center(seed.members().front());
    WitnessTrace tr = strong_repeller_witness(full, from, attracting.front(),
                                              opt.witness_steps);
    res["witness"] = {{"target", point_json(attracting.front())},
                      {"verdict", to_string(tr.verdict)},
                      {"final_distance", tr.distances.back()}};
  } else {
    res["witness"] = {{"verdict", "NoAttractingFixedPoint"}};
  }

  res["verdict"] = certified ? "Certified" : "NotCertified";
  if (certified) {
    res["certified_N"] = certified_n;
    OmegaResult om = omega_limit_cells(full, block, Direction::Backward, 256,
                                       opt.samples_per_cell, opt.padding);
    res["repeller"] = cellset_json(om.cells);
    auto cands = critical_value_candidates(full);
    double mind = 2.0;
    for (int id : om.cells.members())
      mind = std::min(mind, min_distance_to(cands, grid.cell_center(id)));
    res["repeller_min_distance_to_critical"] = mind;
    res["repeller_disjoint_from_critical"] =
        mind > 2.0 * std::sqrt(2.0) * 2.0 / opt.grid;

    auto members = block.interior().members();
    if (members.size() >= 3) {
      std::vector<ProjPoint> starts{grid.cell_center(members[members.size() / 4]),
                                    grid.cell_center(members[members.size() / 2]),
                                    grid.cell_center(members[3 * members.size() / 4])};
      std::vector<SphereHistogram> hists;
      for (std::size_t k = 0; k < starts.size(); ++k)
        hists.push_back(estimate_measure(full, starts[k], opt.depth, opt.samples, grid,
                                         mix_seed(opt.seed, 0xC0 + k)));
      json pw = json::array();
      for (std::size_t a = 0; a < hists.size(); ++a)
        for (std::size_t b = a + 1; b < hists.size(); ++b)
          pw.push_back({{"pair", {a, b}},
                        {"weakstar_distance", weakstar_distance(hists[a], hists[b])}});
      res["three_start_weakstar"] = std::move(pw);
    }
  }
  rep["timings_ms"]["total"] = sw.ms();
  return rep;
}

int run_command(const std::string& command, const Options& opt) {
  json rep;
  int code = 0;
  try {
    fs::create_directories(opt.out_dir);
    if (command == "info") rep = cmd_info(opt);
    else if (command == "compose") rep = cmd_compose(opt);
    else if (command == "measure") rep = cmd_measure(opt);
    else if (command == "blocks") rep = cmd_blocks(opt);
    else if (command == "normality") rep = cmd_normality(opt);
    else if (command == "construct61") rep = cmd_construct61(opt);
    else throw ConfigError("unknown command: " + command);
  } catch (const ParseError& e) {
    rep = report_skeleton(opt, command);
    rep["error"] = {{"type", "ParseError"}, {"message", e.what()}};
    if (e.byte_offset >= 0) rep["error"]["byte_offset"] = e.byte_offset;
    code = 2;
  } catch (const ConfigError& e) {
    rep = report_skeleton(opt, command);
    rep["error"] = {{"type", "ConfigError"}, {"message", e.what()}};
    code = 2;
  } catch (const SizeBudgetExceeded& e) {
    rep = report_skeleton(opt, command);
    rep["error"] = {{"type", "SizeBudgetExceeded"}, {"message", e.what()}};
    code = 4;
  } catch (const InvariantError& e) {
    rep = report_skeleton(opt, command);
    rep["error"] = {{"type", "InvariantViolation"}, {"message", e.what()}};
    code = 3;
  }
  std::string out = rep.dump(2);
  std::cout << out << std::endl;
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (!ec) {
    std::ofstream f(fs::path(opt.out_dir) / ("report_" + command + ".json"));
    f << out << "\n";
  }
  return code;
}

}  // namespace corrdyn::cli
