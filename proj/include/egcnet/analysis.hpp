#pragma once

#include "egcnet/chain.hpp"
#include "egcnet/coalition.hpp"
#include "egcnet/decomposition.hpp"
#include "egcnet/geometry.hpp"
#include "egcnet/graph_bounds.hpp"
#include "egcnet/json_io.hpp"
#include "egcnet/rank.hpp"

#include <optional>
#include <string>

namespace egcnet {

struct AnalysisOptions {
  double tau = 0.0;
  double tol = kRankTol;
  double tol_vertex = kVertexTol;
  double tol_cluster = kClusterTol;
  std::optional<double> max_horizon;  // overrides the default schedule end
  bool with_polytope = false;
  bool with_jets = false;
  int jet_horizon = 0;  // 0 = derive from the schedule
  double mass_floor = kMassFloor;
};

/// Everything cmd_analyze reports, with every numeric result carrying the
/// tolerance/horizon it was computed with.
struct AnalysisBundle {
  RankReport rank;
  std::optional<Coalition> coalition;
  BoundsReport bounds;
  ErgodicityClassing ergodicity;
  std::optional<VertexTrace> polytope;
  std::optional<JetDecomposition> jets;
  AnalysisOptions options;
  std::vector<double> horizons;
};

AnalysisBundle analyze(const Chain& chain, const AnalysisOptions& options);

Json rank_report_to_json(const RankReport& r);
Json coalition_to_json(const Coalition& c);
Json steering_plan_to_json(const SteeringPlan& p, double deviation, double horizon);
Json bounds_to_json(const BoundsReport& b);
Json ergodicity_to_json(const ErgodicityClassing& e);
Json trace_to_json(const VertexTrace& t);
Json snapshot_to_json(const PolytopeSnapshot& s);
Json decomposition_to_json(const JetDecomposition& d);
Json bundle_to_json(const Chain& chain, const AnalysisBundle& b);

}  // namespace egcnet
