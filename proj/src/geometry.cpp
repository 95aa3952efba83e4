#include "egcnet/geometry.hpp"

#include "egcnet/linalg.hpp"
#include "egcnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace egcnet {

namespace {

std::vector<Vector> phi_rows(const Chain& chain, double t, double tau) {
  Matrix m = phi(chain, t, tau).matrix;
  std::vector<Vector> rows;
  rows.reserve(m.rows());
  for (int i = 0; i < m.rows(); ++i) rows.push_back(m.row(i).transpose());
  return rows;
}

std::vector<std::vector<int>> sorted_partition(std::vector<std::vector<int>> classes) {
  for (auto& c : classes) std::sort(c.begin(), c.end());
  std::sort(classes.begin(), classes.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return classes;
}

}  // namespace

PolytopeSnapshot polytope_snapshot(const Chain& chain, double t, double tau,
                                   double tol_vertex) {
  if (t < tau) throw std::invalid_argument("polytope_snapshot: need t >= tau");
  PolytopeSnapshot snap;
  snap.t = t;
  snap.tau = tau;
  snap.points = phi_rows(chain, t, tau);

  // Merge near-duplicates first: as t grows several rows collapse onto the
  // same limit vertex. Lowest index represents each group.
  auto groups = linalg::single_linkage(snap.points, tol_vertex);
  snap.merged_groups = sorted_partition(groups);

  std::vector<int> reps;
  for (const auto& g : snap.merged_groups) reps.push_back(g.front());

  for (std::size_t i = 0; i < reps.size(); ++i) {
    std::vector<Vector> others;
    for (std::size_t j = 0; j < reps.size(); ++j) {
      if (j != i) others.push_back(snap.points[reps[j]]);
    }
    double dist = linalg::distance_to_hull(snap.points[reps[i]], others);
    if (dist > tol_vertex) {
      snap.vertex_indices.push_back(reps[i]);
    }
  }
  std::sort(snap.vertex_indices.begin(), snap.vertex_indices.end());
  snap.vertex_count = static_cast<int>(snap.vertex_indices.size());
  return snap;
}

VertexTrace vertex_count_trace(const Chain& chain, double tau,
                               const std::vector<double>& horizon_schedule,
                               double tol_vertex) {
  for (std::size_t i = 1; i < horizon_schedule.size(); ++i) {
    if (horizon_schedule[i] <= horizon_schedule[i - 1])
      throw std::invalid_argument("vertex_count_trace: schedule must increase");
  }
  VertexTrace trace;
  trace.tau = tau;

  std::vector<PolytopeSnapshot> snaps(horizon_schedule.size());
  parallel_for(horizon_schedule.size(), [&](std::size_t i) {
    snaps[i] = polytope_snapshot(chain, horizon_schedule[i], tau, tol_vertex);
  });

  for (std::size_t i = 0; i < snaps.size(); ++i) {
    TraceEntry entry;
    entry.t = horizon_schedule[i];
    entry.vertex_count = snaps[i].vertex_count;
    if (i == 0) {
      entry.min_nesting_margin = kNestingTol;
    } else {
      double worst = 0.0;
      for (const auto& p : snaps[i].points) {
        worst = std::max(worst, linalg::distance_to_hull(p, snaps[i - 1].points));
      }
      entry.min_nesting_margin = kNestingTol - worst;
      if (entry.min_nesting_margin < 0) trace.nesting_ok = false;
    }
    trace.entries.push_back(entry);
  }
  const std::size_t k = trace.entries.size();
  trace.stabilized =
      k >= 2 && trace.entries[k - 1].vertex_count == trace.entries[k - 2].vertex_count;
  return trace;
}

namespace {

// Common refinement of two partitions over the same ground set.
std::vector<std::vector<int>> partition_meet(const std::vector<std::vector<int>>& a,
                                             const std::vector<std::vector<int>>& b,
                                             int n) {
  std::vector<int> class_a(n, -1), class_b(n, -1);
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (int i : a[k]) class_a[i] = static_cast<int>(k);
  }
  for (std::size_t k = 0; k < b.size(); ++k) {
    for (int i : b[k]) class_b[i] = static_cast<int>(k);
  }
  std::map<std::pair<int, int>, std::vector<int>> cells;
  for (int i = 0; i < n; ++i) cells[{class_a[i], class_b[i]}].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& [key, members] : cells) out.push_back(std::move(members));
  return sorted_partition(std::move(out));
}

}  // namespace

ErgodicityClassing ergodicity_classes(const Chain& chain, double tau,
                                      const std::vector<double>& horizon_schedule,
                                      double tol_cluster) {
  // Mutual weak ergodicity requires vanishing row distance from EVERY
  // initial time. Continuous transition matrices are invertible, so one
  // tau decides; discrete chains can have singular steps that glue rows
  // from one tau but not a later one, so the relation is intersected over
  // the distinct phases of the representation.
  std::vector<double> taus{tau};
  if (chain.is_discrete()) {
    double pos = 0.0;
    for (const auto& seg : chain.prefix) {
      pos += seg.duration;
      if (pos > tau) taus.push_back(pos);
    }
    if (const auto* p = chain.periodic_tail()) {
      double pe = chain.prefix_end();
      double base = std::max(pe, std::ceil(tau));
      double offset = 0.0;
      for (std::size_t i = 0; i + 1 < p->block.size(); ++i) {
        offset += p->block[i].duration;
        taus.push_back(base + offset);
      }
      if (base > tau && std::find(taus.begin(), taus.end(), base) == taus.end()) {
        taus.push_back(base);
      }
    }
  }

  ErgodicityClassing out;
  out.converged = true;
  bool first = true;
  for (double tau_s : taus) {
    std::vector<double> schedule =
        tau_s == tau ? horizon_schedule : default_horizon_schedule(chain, tau_s);
    std::vector<std::vector<std::vector<int>>> partitions(schedule.size());
    parallel_for(schedule.size(), [&](std::size_t i) {
      auto rows = phi_rows(chain, schedule[i], tau_s);
      partitions[i] = sorted_partition(linalg::single_linkage(rows, tol_cluster));
    });
    out.converged = out.converged && partitions.size() >= 2 &&
                    partitions[partitions.size() - 1] ==
                        partitions[partitions.size() - 2];
    if (first) {
      out.classes = partitions.back();
      out.horizon_used = schedule.back();
      first = false;
    } else {
      out.classes = partition_meet(out.classes, partitions.back(), chain.n_agents);
    }
  }
  return out;
}

PStarResult class_pstar_check(const Chain& chain, const std::vector<double>& tau_grid,
                              double horizon, double threshold) {
  PStarResult result;
  // Structural sufficient condition: positive diagonals forever. Matrix
  // exponentials of intensity matrices always have them; discrete tails
  // need them entrywise.
  bool structural = true;
  if (chain.is_discrete()) {
    if (const auto* p = chain.periodic_tail()) {
      for (const auto& seg : p->block) {
        if (seg.matrix.diagonal().minCoeff() <= 0) structural = false;
      }
    }
  }

  // Horizon sweep: for each t, the minimum over tau <= t in the grid and
  // over columns j of the column sums of Phi(t, tau).
  std::vector<double> ts;
  for (double t = std::max(1.0, horizon / 16.0); t < horizon; t *= 2) ts.push_back(t);
  ts.push_back(horizon);
  if (chain.is_discrete()) {
    for (double& t : ts) t = std::ceil(t);
  }

  std::vector<double> per_horizon_min(ts.size(),
                                      std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < ts.size(); ++k) {
    for (double tau : tau_grid) {
      if (tau > ts[k]) continue;
      Matrix m = phi(chain, ts[k], tau).matrix;
      per_horizon_min[k] = std::min(per_horizon_min[k], m.colwise().sum().minCoeff());
    }
  }
  double overall = std::numeric_limits<double>::infinity();
  for (double v : per_horizon_min) overall = std::min(overall, v);
  result.min_column_sum = overall;

  if (overall > threshold && structural) {
    result.in_class = true;
  } else if (ts.size() >= 2 && per_horizon_min.back() < threshold / 10.0 &&
             per_horizon_min.back() < per_horizon_min[ts.size() - 2]) {
    result.in_class = false;
  }
  return result;
}

std::string trace_to_csv(const VertexTrace& trace) {
  std::ostringstream os;
  os << "t,vertex_count,min_nesting_margin\n";
  char buf[64];
  for (const auto& e : trace.entries) {
    std::snprintf(buf, sizeof(buf), "%.17g", e.t);
    os << buf << "," << e.vertex_count << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", e.min_nesting_margin);
    os << buf << "\n";
  }
  return os.str();
}

}  // namespace egcnet
