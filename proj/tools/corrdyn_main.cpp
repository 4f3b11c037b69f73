#include <CLI11.hpp>

#include "corrdyn/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"corrdyn: dynamics of holomorphic correspondences on the Riemann sphere"};
  app.require_subcommand(1);

  corrdyn::cli::Options opt;
  std::string direction = "bwd";

  auto add_common = [&](CLI::App* sub, bool needs_chain) {
    if (needs_chain)
      sub->add_option("--chain", opt.chain_path, "chain file (JSON)")->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--seed", opt.seed, "master seed (64-bit)");
    sub->add_option("--grid", opt.grid, "atlas grid resolution per chart");
    sub->add_option("--depth", opt.depth, "backward-orbit depth");
    sub->add_option("--samples", opt.samples, "Monte Carlo sample count");
    sub->add_option("--direction", direction, "fwd|bwd")
        ->check(CLI::IsMember({"fwd", "bwd"}));
    sub->add_option("--start", opt.starts, "start point \"re,im\" or \"inf\" (repeatable)");
    sub->add_option("--samples-per-cell", opt.samples_per_cell,
                    "relation image samples per cell");
    sub->add_option("--padding", opt.padding, "relation image padding rings");
  };

  CLI::App* info = app.add_subcommand("info", "degrees, components, critical values");
  add_common(info, true);

  CLI::App* compose = app.add_subcommand("compose", "iterate the correspondence");
  add_common(compose, true);
  compose->add_option("--power", opt.power, "iteration power n");
  compose->add_option("--out-chain", opt.out_chain, "output chain file");

  CLI::App* measure = app.add_subcommand("measure", "estimate the invariant measure");
  add_common(measure, true);

  CLI::App* blocks = app.add_subcommand("blocks", "attractor blocks / omega limits / witnesses");
  add_common(blocks, true);
  blocks->add_option("--region", opt.region,
                     "seed region: outer:R | annulus:a,b | disk:R | point:re,im | inf");
  blocks->add_option("--max-dilation", opt.max_dilation, "dilation search bound");
  blocks->add_option("--witness-from", opt.witness_from, "witness start point");
  blocks->add_option("--witness-to", opt.witness_to, "witness target point");
  blocks->add_option("--witness-steps", opt.witness_steps, "witness trace length");

  CLI::App* norm = app.add_subcommand("normality", "normality scan and measure overlay");
  add_common(norm, true);
  norm->add_option("--normality-depth", opt.normality_depth, "probe depth per cell");

  CLI::App* c61 = app.add_subcommand("construct61", "block/repeller construction pipeline");
  add_common(c61, false);
  c61->add_option("--p", opt.p_coeffs, "p coefficients, ascending (JSON array)")->required();
  c61->add_option("--q", opt.q_coeffs, "Q coefficients, ascending (JSON array)")->required();
  c61->add_option("--max-n", opt.max_n, "largest iterate N to try");
  c61->add_option("--max-dilation", opt.max_dilation, "dilation search bound");
  c61->add_option("--witness-steps", opt.witness_steps, "witness trace length");

  CLI11_PARSE(app, argc, argv);
  opt.direction = direction == "fwd" ? corrdyn::Direction::Forward
                                     : corrdyn::Direction::Backward;

  for (auto* sub : {info, compose, measure, blocks, norm, c61})
    if (sub->parsed()) return corrdyn::cli::run_command(sub->get_name(), opt);
  return 2;
}
