#include "egcnet/analysis.hpp"

#include "egcnet/version.hpp"

#include <algorithm>
#include <cmath>

namespace egcnet {

namespace {

Json indices_1based(const std::vector<int>& v) {
  Json out = Json::array();
  for (int i : v) out.push_back(i + 1);
  return out;
}

Json partition_1based(const std::vector<std::vector<int>>& classes) {
  Json out = Json::array();
  for (const auto& c : classes) out.push_back(indices_1based(c));
  return out;
}

}  // namespace

AnalysisBundle analyze(const Chain& chain, const AnalysisOptions& options) {
  AnalysisBundle bundle;
  bundle.options = options;

  bundle.horizons = default_horizon_schedule(chain, options.tau);
  if (options.max_horizon) {
    std::vector<double> trimmed;
    for (double h : bundle.horizons) {
      if (h <= *options.max_horizon) trimmed.push_back(h);
    }
    if (trimmed.size() < 2) trimmed = {*options.max_horizon / 2, *options.max_horizon};
    if (chain.is_discrete()) {
      for (double& h : trimmed) h = std::ceil(h - 1e-9);
    }
    bundle.horizons = trimmed;
  }

  bundle.rank = rank(chain, options.tau, options.tol,
                     options.max_horizon ? bundle.horizons : std::vector<double>{});
  if (bundle.rank.converged) {
    bundle.coalition = smallest_egc(chain, options.tau, bundle.rank);
  }
  bundle.bounds = bounds_report(chain, options.tau);
  bundle.ergodicity =
      ergodicity_classes(chain, options.tau, bundle.horizons, options.tol_cluster);
  if (options.with_polytope) {
    bundle.polytope =
        vertex_count_trace(chain, options.tau, bundle.horizons, options.tol_vertex);
  }
  if (options.with_jets && chain.is_discrete()) {
    int horizon = options.jet_horizon;
    if (horizon <= 0) {
      horizon = static_cast<int>(std::ceil(bundle.horizons.back()));
    }
    bundle.jets = sonin_decomposition(chain, horizon, options.tol_cluster,
                                      options.mass_floor);
  }
  return bundle;
}

Json rank_report_to_json(const RankReport& r) {
  Json j;
  j["rank"] = r.rank;
  j["nullity"] = r.nullity;
  j["method"] = to_string(r.basis.method);
  j["tolerance"] = r.basis.tolerance;
  j["converged"] = r.converged;
  Json sv = Json::array();
  for (double s : r.singular_values) sv.push_back(s);
  j["singular_values"] = std::move(sv);
  j["basis"] = matrix_to_json(r.basis.basis);
  j["tau"] = r.tau;
  j["null_dim_local"] = r.null_dim_local;
  j["nullity_tau"] = r.nullity_tau;
  if (r.basis.method == RankMethod::NumericalHorizon) {
    j["horizon_used"] = r.basis.horizon_used;
  }
  j["verification"] = Json{{"residual", r.verification_residual},
                           {"horizon", r.verification_horizon}};
  return j;
}

Json coalition_to_json(const Coalition& c) {
  Json j;
  j["members"] = indices_1based(c.members);
  j["complement_rows"] = indices_1based(c.complement_rows);
  j["tau"] = c.tau;
  j["condition_number"] = c.condition_number;
  j["selection"] = c.selection;
  return j;
}

Json steering_plan_to_json(const SteeringPlan& p, double deviation, double horizon) {
  Json j;
  j["target"] = p.target;
  Json coalition = Json::array();
  Json coalition_opinions = Json::object();
  for (const auto& [idx, val] : p.coalition_opinions) {
    coalition.push_back(idx + 1);
    coalition_opinions[std::to_string(idx + 1)] = val;
  }
  j["coalition"] = std::move(coalition);
  j["coalition_opinions"] = std::move(coalition_opinions);
  Json fixed = Json::object();
  for (const auto& [idx, val] : p.fixed_opinions) {
    fixed[std::to_string(idx + 1)] = val;
  }
  j["fixed_opinions"] = std::move(fixed);
  j["residual"] = p.residual;
  j["verified_horizon"] = horizon;
  j["max_deviation"] = deviation;
  return j;
}

Json bounds_to_json(const BoundsReport& b) {
  Json j;
  j["lower_components_h2"] = b.lower_components_h2;
  j["lower_sroot"] = b.lower_sroot;
  j["rank"] = b.rank;
  j["rank_converged"] = b.rank_converged;
  j["upper_n_minus_h2prime"] = b.upper_n_minus_h2prime;
  if (b.upper_ergodicity_classes) {
    j["upper_ergodicity_classes"] = *b.upper_ergodicity_classes;
  } else {
    j["upper_ergodicity_classes"] = "unknown";
  }
  j["all_consistent"] = b.all_consistent;
  return j;
}

Json ergodicity_to_json(const ErgodicityClassing& e) {
  Json j;
  j["classes"] = partition_1based(e.classes);
  j["converged"] = e.converged;
  j["horizon_used"] = e.horizon_used;
  return j;
}

Json trace_to_json(const VertexTrace& t) {
  Json j;
  j["tau"] = t.tau;
  Json entries = Json::array();
  for (const auto& e : t.entries) {
    entries.push_back(Json{{"t", e.t},
                           {"vertex_count", e.vertex_count},
                           {"min_nesting_margin", e.min_nesting_margin}});
  }
  j["entries"] = std::move(entries);
  j["stabilized"] = t.stabilized;
  j["nesting_ok"] = t.nesting_ok;
  return j;
}

Json snapshot_to_json(const PolytopeSnapshot& s) {
  Json j;
  j["t"] = s.t;
  j["tau"] = s.tau;
  Json points = Json::array();
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    bool vertex = std::find(s.vertex_indices.begin(), s.vertex_indices.end(),
                            static_cast<int>(i)) != s.vertex_indices.end();
    points.push_back(Json{{"agent", static_cast<int>(i) + 1},
                          {"point", vector_to_json(s.points[i])},
                          {"vertex", vertex}});
  }
  j["points"] = std::move(points);
  j["vertex_count"] = s.vertex_count;
  j["merged_groups"] = partition_1based(s.merged_groups);
  return j;
}

Json decomposition_to_json(const JetDecomposition& d) {
  Json j;
  j["horizon"] = d.horizon;
  j["t_mid"] = d.t_mid;
  j["count"] = d.count();
  j["converged"] = d.converged;
  int n_agents = 0;
  for (const auto& jet : d.jets) {
    n_agents += jet.sets.empty() ? 0 : static_cast<int>(jet.sets[0].size());
  }
  Json jets = Json::array();
  for (std::size_t k = 0; k < d.jets.size(); ++k) {
    Json jet;
    jet["name"] = k == 0 ? "J0" : "J" + std::to_string(k);
    jet["proper"] = d.jets[k].proper(n_agents);
    Json sets = Json::array();
    for (const auto& s : d.jets[k].sets) sets.push_back(indices_1based(s));
    jet["sets"] = std::move(sets);
    Json mass = Json::array();
    for (double m : d.mass[k]) mass.push_back(m);
    jet["mass"] = std::move(mass);
    if (k > 0) {
      if (std::isfinite(d.x_star[k])) {
        jet["x_star"] = d.x_star[k];
        jet["x_star_spread"] = d.x_star_spread[k];
      } else {
        jet["x_star"] = nullptr;
      }
    }
    jets.push_back(std::move(jet));
  }
  j["jets"] = std::move(jets);
  j["flow"] = matrix_to_json(d.flow);
  Json warnings = Json::array();
  for (const auto& w : d.warnings) warnings.push_back(w);
  j["warnings"] = std::move(warnings);
  // The uniqueness clause of the underlying theorem quantifies over all
  // absolute probability sequences; a single finite-horizon sequence
  // cannot certify it.
  j["uniqueness_checked"] = false;
  return j;
}

Json bundle_to_json(const Chain& chain, const AnalysisBundle& b) {
  Json j;
  j["tool"] = Json{{"name", "egcnet"}, {"version", kVersion}};
  Json chain_summary;
  chain_summary["mode"] = to_string(chain.mode);
  chain_summary["n"] = chain.n_agents;
  chain_summary["prefix_segments"] = static_cast<int>(chain.prefix.size());
  chain_summary["prefix_span"] = chain.prefix_end();
  chain_summary["tail"] = chain.has_periodic_tail() ? "periodic" : "zero";
  if (chain.has_periodic_tail()) chain_summary["period"] = chain.tail_period();
  j["chain"] = std::move(chain_summary);
  j["tolerances"] = Json{{"rank_tol", b.options.tol},
                         {"vertex_tol", b.options.tol_vertex},
                         {"cluster_tol", b.options.tol_cluster},
                         {"tau", b.options.tau}};
  Json horizons = Json::array();
  for (double h : b.horizons) horizons.push_back(h);
  j["horizons"] = std::move(horizons);
  j["rank"] = rank_report_to_json(b.rank);
  if (b.coalition) {
    j["coalition"] = coalition_to_json(*b.coalition);
  }
  j["bounds"] = bounds_to_json(b.bounds);
  j["ergodicity"] = ergodicity_to_json(b.ergodicity);
  if (b.polytope) j["polytope"] = trace_to_json(*b.polytope);
  if (b.jets) j["jets"] = decomposition_to_json(*b.jets);
  return j;
}

}  // namespace egcnet
