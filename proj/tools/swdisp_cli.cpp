#include "swdisp/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace swdisp;
using namespace swdisp::cli;

int main(int argc, char** argv) {
  CLI::App app{"Second-order Slepian-Wolf regions, bounds and oracles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string units = "bits";
  auto add_units = [&](CLI::App* sub) {
    sub->add_option("--units", units, "bits or nats")->check(CLI::IsMember({"bits", "nats"}));
  };

  AnalyzeConfig analyze;
  auto* a = app.add_subcommand("analyze", "entropies, dispersion matrix and polygon of a source");
  a->add_option("input", analyze.input, "source JSON")->required();
  a->add_flag("--json", analyze.json, "JSON instead of CSV");
  add_units(a);

  RegionConfig region;
  auto* r = app.add_subcommand("region", "second-order region boundary at an anchor");
  r->add_option("input", region.input, "source JSON")->required();
  r->add_option("--epsilon", region.epsilon, "target error")->required();
  r->add_option("--anchor", region.anchor, "corner1|corner2|caseII:L|caseIII-a[:x]|caseIII-b[:x]|a1,a2");
  r->add_option_function<std::string>("--grid", [&](const std::string& s) { region.grid = parse_grid(s); },
                                      "lo:hi:count over the free coordinate");
  r->add_option_function<double>("--n", [&](double v) { region.n = v; }, "finite-n boundary in (R1, R2)");
  r->add_option_function<std::string>("--point", [&](const std::string& s) { region.point = parse_pair(s); },
                                      "membership of one L1,L2");
  add_units(r);

  BoundsConfig bounds;
  auto* b = app.add_subcommand("bounds", "second-order error vs the Gallager-type bound");
  b->add_option("input", bounds.input, "source JSON")->required();
  b->add_option("--anchor", bounds.anchor, "boundary anchor");
  b->add_option_function<std::string>("--grid-l1", [&](const std::string& s) { bounds.grid_l1 = parse_grid(s); }, "lo:hi:count");
  b->add_option_function<std::string>("--grid-l2", [&](const std::string& s) { bounds.grid_l2 = parse_grid(s); }, "lo:hi:count");
  b->add_option_function<std::string>("--diagonal", [&](const std::string& s) { bounds.diagonal = parse_grid(s); },
                                      "L1 = L2 sweep, lo:hi:count");
  b->add_option_function<double>("--n", [&](double v) { bounds.n = v; }, "add the exact bound at this n");
  add_units(b);

  OracleConfig oracle;
  std::string n_list = "100,400,1600";
  auto* o = app.add_subcommand("oracle", "exact finite-n spectrum vs the Gaussian limit");
  o->add_option("input", oracle.input, "source JSON")->required();
  o->add_option("--anchor", oracle.anchor, "anchor");
  o->add_option("--L1", oracle.L1, "second-order offset L1");
  o->add_option("--L2", oracle.L2, "second-order offset L2");
  o->add_option("--n-list", n_list, "comma-separated blocklengths");
  o->add_option("--mc-samples", oracle.mc_samples, "add a Monte-Carlo column");
  o->add_option("--seed", oracle.seed, "Monte-Carlo seed");
  add_units(o);

  SimulateConfig sim;
  std::string redraw = "per-trial";
  bool declare = false;
  auto* s = app.add_subcommand("simulate", "random-binning ensemble with ML decoding");
  s->add_option("input", sim.input, "source JSON")->required();
  s->add_option("--n", sim.n, "blocklength");
  s->add_option("--M1", sim.M1, "bins for X1");
  s->add_option("--M2", sim.M2, "bins for X2");
  s->add_option("--trials", sim.trials, "number of trials");
  s->add_option("--seed", sim.seed, "seed");
  s->add_option("--redraw", redraw, "per-trial or fixed")->check(CLI::IsMember({"per-trial", "fixed"}));
  s->add_option("--gamma", sim.gamma, "slack for the finite-n bounds (nats)");
  s->add_flag("--empty-bin-error", declare, "count an empty bin pair as a decoding error");

  MixedConfig mixed;
  auto* m = app.add_subcommand("mixed", "second-order region of a finite mixture");
  m->add_option("input", mixed.input, "mixture JSON")->required();
  m->add_option("--epsilon", mixed.epsilon, "target error")->required();
  m->add_option("--anchor", mixed.anchor, "a1,a2 or <symbolic>@<component>");
  m->add_option_function<std::string>("--grid-l1", [&](const std::string& v) { mixed.grid_l1 = parse_grid(v); }, "lo:hi:count");
  m->add_option_function<std::string>("--grid-l2", [&](const std::string& v) { mixed.grid_l2 = parse_grid(v); }, "lo:hi:count");
  m->add_option_function<std::string>("--point", [&](const std::string& v) { mixed.point = parse_pair(v); }, "L1,L2");
  add_units(m);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  }

  try {
    const Units u = parse_units(units);
    if (a->parsed()) {
      analyze.units = u;
      cmd_analyze(analyze, std::cout);
    } else if (r->parsed()) {
      region.units = u;
      cmd_region(region, std::cout, std::cerr);
    } else if (b->parsed()) {
      bounds.units = u;
      cmd_bounds(bounds, std::cout);
    } else if (o->parsed()) {
      oracle.units = u;
      oracle.n_list = parse_int_list(n_list);
      cmd_oracle(oracle, std::cout);
    } else if (s->parsed()) {
      sim.redraw = redraw == "fixed" ? CodeRedraw::Fixed : CodeRedraw::PerTrial;
      sim.empty_policy = declare ? EmptyBinPolicy::DeclareError : EmptyBinPolicy::FirstPair;
      cmd_simulate(sim, std::cout);
    } else if (m->parsed()) {
      mixed.units = u;
      cmd_mixed(mixed, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  }
  return 0;
}
