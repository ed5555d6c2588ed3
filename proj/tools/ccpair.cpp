#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ccpair/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mixed-traffic simulation and stability analysis for paired connected vehicles"};
  app.require_subcommand(1);

  std::string config_path;
  ccpair::CommandOptions opts;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON scenario file (defaults when omitted)");
    sub->add_option("--out", opts.out, "Output file or directory");
    sub->add_option("--seed", seed, "Fleet RNG seed override");
    sub->add_option("--jobs", opts.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--strict", opts.strict, "Nonzero exit on collisions or undefined metrics");
  };
  auto* simulate = app.add_subcommand("simulate", "Simulate a packet or fleet");
  auto* chart = app.add_subcommand("chart", "Stability chart and boundary curves");
  auto* pen = app.add_subcommand("penetration", "Penetration vs minimum average headway");
  auto* ens = app.add_subcommand("ensemble", "Seed ensemble of fleet metrics");
  auto* robust = app.add_subcommand("robust-region", "Gains stable for several packet sizes");
  for (auto* sub : {simulate, chart, pen, ens, robust}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = config_path.empty() ? ccpair::parse_config("{}")
                                         : ccpair::load_config(config_path);
    for (auto* sub : {simulate, chart, pen, ens, robust}) {
      if (sub->count("--seed") > 0) opts.seed = seed;
    }
    if (*simulate) return ccpair::cmd_simulate(cfg, opts);
    if (*chart) return ccpair::cmd_chart(cfg, opts);
    if (*pen) return ccpair::cmd_penetration(cfg, opts);
    if (*ens) return ccpair::cmd_ensemble(cfg, opts);
    if (*robust) return ccpair::cmd_robust_region(cfg, opts);
  } catch (const ccpair::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
