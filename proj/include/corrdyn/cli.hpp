#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrdyn/relation.hpp"

namespace corrdyn::cli {

struct Options {
  std::string chain_path;
  std::string out_dir = "corrdyn_out";
  std::uint64_t seed = 1;
  int grid = 128;
  int depth = 20;            // backward-orbit depth for measures
  long samples = 100000;
  Direction direction = Direction::Backward;
  std::vector<std::string> starts;
  int power = 2;             // compose
  int max_n = 4;             // construct61 search bound
  int max_dilation = 8;
  int witness_steps = 40;
  int normality_depth = 12;
  std::string region;        // blocks seed region
  std::string witness_from;
  std::string witness_to;
  std::string out_chain;     // compose output file
  std::string p_coeffs;      // construct61: JSON array, ascending degree
  std::string q_coeffs;
  int samples_per_cell = 9;
  int padding = 1;
  long tree_budget = 1000000;
};

nlohmann::json cmd_info(const Options& opt);
nlohmann::json cmd_compose(const Options& opt);
nlohmann::json cmd_measure(const Options& opt);
nlohmann::json cmd_blocks(const Options& opt);
nlohmann::json cmd_normality(const Options& opt);
nlohmann::json cmd_construct61(const Options& opt);

// Dispatch + report writing; returns the process exit code
// (0 ok, 2 parse/config, 3 invariant violation, 4 budget).
int run_command(const std::string& command, const Options& opt);

// Region grammar for --region: "outer:R" (|z| >= R plus infinity),
// "annulus:rlo,rhi", "disk:R" (|z| <= R), "point:re,im", "inf".
CellSet parse_region(const AtlasGrid& grid, const std::string& text);

}  // namespace corrdyn::cli
