#pragma once

#include "egcnet/analysis.hpp"

#include <optional>
#include <string>
#include <vector>

namespace egcnet::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidChain = 1;
inline constexpr int kExitParseError = 2;
inline constexpr int kExitNotConverged = 3;
inline constexpr int kExitBadFixedSet = 4;

struct AnalyzeArgs {
  std::string path;
  double tau = 0.0;
  double tol = kRankTol;
  std::optional<double> horizon;
  bool polytope = false;
  bool jets = false;
  std::string out;  // empty = stdout
};

struct SteerArgs {
  std::string path;
  double target = 0.0;
  std::string fixed;  // "i=v,i=v" with 1-based agents
  double t0 = 0.0;
  std::optional<double> verify_horizon;
  std::string out;
};

struct SimulateArgs {
  std::string path;
  std::string x0;       // comma-separated values
  double t0 = 0.0;
  std::string samples;  // "t1,t2,..." or "start:stop:count"
  std::string out;
};

struct GraphArgs {
  std::string path;
  std::string kind = "h1";
  std::string out;
};

struct PolytopeArgs {
  std::string path;
  double tau = 0.0;
  std::string horizons;  // optional override, same syntax as samples
  double tol_vertex = kVertexTol;
  std::optional<double> snapshot_t;  // write one snapshot JSON instead
  std::string out;
};

struct JetsArgs {
  std::string path;
  int horizon = 0;  // 0 = derive from the default schedule
  double tol_cluster = kClusterTol;
  double mass_floor = kMassFloor;
  std::string out;
};

int cmd_validate(const std::string& path);
int cmd_analyze(const AnalyzeArgs& args);
int cmd_steer(const SteerArgs& args);
int cmd_simulate(const SimulateArgs& args);
int cmd_graph(const GraphArgs& args);
int cmd_polytope(const PolytopeArgs& args);
int cmd_jets(const JetsArgs& args);

// Exposed for tests: sample-list parsing ("1,2,3" and "0:10:5").
std::vector<double> parse_sample_list(const std::string& text);

}  // namespace egcnet::cli
