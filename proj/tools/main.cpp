#include "commands.hpp"

#include "egcnet/version.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
  CLI::App app{"Time-varying opinion-network analysis: rank, smallest steering "
               "coalitions, bounds, polytope geometry and jet decompositions"};
  app.set_version_flag("--version", egcnet::kVersion);
  app.require_subcommand(1);

  std::string path;

  auto* validate = app.add_subcommand("validate", "check a chain file");
  validate->add_option("path", path, "chain JSON file")->required();

  egcnet::cli::AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "rank, coalition and bounds report");
  analyze->add_option("path", analyze_args.path, "chain JSON file")->required();
  analyze->add_option("--tau", analyze_args.tau, "initial time");
  analyze->add_option("--tol", analyze_args.tol, "rank tolerance on singular values");
  double horizon_opt = 0;
  auto* horizon_flag =
      analyze->add_option("--horizon", horizon_opt, "cap the horizon schedule");
  analyze->add_flag("--polytope", analyze_args.polytope, "include the vertex trace");
  analyze->add_flag("--jets", analyze_args.jets,
                    "include the jet decomposition (discrete chains)");
  analyze->add_option("--out", analyze_args.out, "bundle JSON path ('-' = stdout)");

  egcnet::cli::SteerArgs steer_args;
  auto* steer = app.add_subcommand("steer", "solve coalition opinions for a target");
  steer->add_option("path", steer_args.path, "chain JSON file")->required();
  steer->add_option("--target", steer_args.target, "consensus target")->required();
  steer->add_option("--fixed", steer_args.fixed,
                    "non-coalition opinions, e.g. \"2=-17,4=0.5\" (1-based)");
  steer->add_option("--t0", steer_args.t0, "initial time");
  double verify_opt = 0;
  auto* verify_flag =
      steer->add_option("--verify-horizon", verify_opt, "simulation horizon");
  steer->add_option("--out", steer_args.out, "plan JSON path");

  egcnet::cli::SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "integrate opinions and export CSV");
  sim->add_option("path", sim_args.path, "chain JSON file")->required();
  sim->add_option("--x0", sim_args.x0, "initial opinions v1,v2,...")->required();
  sim->add_option("--t0", sim_args.t0, "initial time");
  sim->add_option("--samples", sim_args.samples,
                  "sample times t1,t2,... or start:stop:count")
      ->required();
  sim->add_option("--out", sim_args.out, "CSV path");

  egcnet::cli::GraphArgs graph_args;
  auto* graph = app.add_subcommand("graph", "export an interaction graph as DOT");
  graph->add_option("path", graph_args.path, "chain JSON file")->required();
  graph->add_option("--kind", graph_args.kind, "h1 (directed) or h2 (undirected)")
      ->check(CLI::IsMember({"h1", "h2"}));
  graph->add_option("--out", graph_args.out, "DOT path");

  egcnet::cli::PolytopeArgs poly_args;
  auto* poly = app.add_subcommand("polytope", "vertex-count trace or one snapshot");
  poly->add_option("path", poly_args.path, "chain JSON file")->required();
  poly->add_option("--tau", poly_args.tau, "initial time");
  poly->add_option("--horizons", poly_args.horizons,
                   "t1,t2,... or start:stop:count (default: doubling schedule)");
  poly->add_option("--tol-vertex", poly_args.tol_vertex, "vertex test tolerance");
  double snapshot_opt = 0;
  auto* snapshot_flag =
      poly->add_option("--snapshot", snapshot_opt, "emit one snapshot JSON at t");
  poly->add_option("--out", poly_args.out, "output path");

  egcnet::cli::JetsArgs jets_args;
  auto* jets = app.add_subcommand("jets", "jet decomposition of a discrete chain");
  jets->add_option("path", jets_args.path, "chain JSON file")->required();
  jets->add_option("--horizon", jets_args.horizon, "decomposition horizon (steps)");
  jets->add_option("--tol-cluster", jets_args.tol_cluster, "row clustering tolerance");
  jets->add_option("--mass-floor", jets_args.mass_floor, "vanishing-mass threshold");
  jets->add_option("--out", jets_args.out, "decomposition JSON path");

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return egcnet::cli::cmd_validate(path);
  if (analyze->parsed()) {
    if (horizon_flag->count()) analyze_args.horizon = horizon_opt;
    return egcnet::cli::cmd_analyze(analyze_args);
  }
  if (steer->parsed()) {
    if (verify_flag->count()) steer_args.verify_horizon = verify_opt;
    return egcnet::cli::cmd_steer(steer_args);
  }
  if (sim->parsed()) return egcnet::cli::cmd_simulate(sim_args);
  if (graph->parsed()) return egcnet::cli::cmd_graph(graph_args);
  if (poly->parsed()) {
    if (snapshot_flag->count()) poly_args.snapshot_t = snapshot_opt;
    return egcnet::cli::cmd_polytope(poly_args);
  }
  if (jets->parsed()) return egcnet::cli::cmd_jets(jets_args);
  return 0;
}
