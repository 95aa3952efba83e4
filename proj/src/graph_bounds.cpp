#include "egcnet/graph_bounds.hpp"

#include "egcnet/geometry.hpp"
#include "egcnet/rank.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <stack>

namespace egcnet {

namespace {

// The tail decides divergence: any entry recurring in the periodic block
// integrates (sums) to infinity; prefix and zero-tail contributions are
// finite by construction.
Matrix tail_recurrence(const Chain& chain) {
  const int n = chain.n_agents;
  Matrix acc = Matrix::Zero(n, n);
  if (const auto* p = chain.periodic_tail()) {
    for (const auto& seg : p->block) acc += seg.matrix.cwiseAbs();
  }
  return acc;
}

std::vector<std::vector<int>> adjacency(const InteractionGraph& g, bool directed) {
  std::vector<std::vector<int>> adj(g.n);
  for (const auto& [i, j] : g.edges) {
    adj[i].push_back(j);
    if (!directed) adj[j].push_back(i);
  }
  return adj;
}

// Tarjan SCC; components numbered in reverse topological order of the
// condensation.
std::vector<int> strongly_connected_components(const InteractionGraph& g, int& count) {
  auto adj = adjacency(g, /*directed=*/true);
  std::vector<int> index(g.n, -1), low(g.n, 0), comp(g.n, -1);
  std::vector<bool> on_stack(g.n, false);
  std::stack<int> stack;
  int next_index = 0;
  count = 0;

  std::function<void(int)> strongconnect = [&](int v) {
    index[v] = low[v] = next_index++;
    stack.push(v);
    on_stack[v] = true;
    for (int w : adj[v]) {
      if (index[w] < 0) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      for (;;) {
        int w = stack.top();
        stack.pop();
        on_stack[w] = false;
        comp[w] = count;
        if (w == v) break;
      }
      ++count;
    }
  };
  for (int v = 0; v < g.n; ++v) {
    if (index[v] < 0) strongconnect(v);
  }
  return comp;
}

}  // namespace

InteractionGraph unbounded_interactions_graph(const Chain& chain) {
  InteractionGraph g;
  g.kind = InteractionGraph::Kind::UnboundedDirected;
  g.n = chain.n_agents;
  Matrix rec = tail_recurrence(chain);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      // Influence of i on j shows up as a_ji in the update of agent j.
      if (i != j && rec(j, i) > 0) g.edges.insert({i, j});
    }
  }
  return g;
}

InteractionGraph infinite_flow_graph(const Chain& chain) {
  InteractionGraph g;
  g.kind = InteractionGraph::Kind::InfiniteFlowUndirected;
  g.n = chain.n_agents;
  Matrix rec = tail_recurrence(chain);
  for (int i = 0; i < g.n; ++i) {
    for (int j = i + 1; j < g.n; ++j) {
      if (rec(i, j) + rec(j, i) > 0) g.edges.insert({i, j});
    }
  }
  return g;
}

SRoot smallest_sroot(const InteractionGraph& h1) {
  if (h1.kind != InteractionGraph::Kind::UnboundedDirected)
    throw std::invalid_argument("smallest_sroot: needs the directed graph H1");
  int count = 0;
  std::vector<int> comp = strongly_connected_components(h1, count);
  // Source components of the condensation: any s-root must intersect each
  // of them, and one representative per source reaches everything.
  std::vector<bool> has_incoming(count, false);
  for (const auto& [i, j] : h1.edges) {
    if (comp[i] != comp[j]) has_incoming[comp[j]] = true;
  }
  SRoot result;
  std::vector<int> lowest(count, h1.n);
  for (int v = 0; v < h1.n; ++v) lowest[comp[v]] = std::min(lowest[comp[v]], v);
  for (int c = 0; c < count; ++c) {
    if (!has_incoming[c]) {
      ++result.size;
      result.witness.push_back(lowest[c]);
    }
  }
  std::sort(result.witness.begin(), result.witness.end());
  return result;
}

std::vector<std::vector<int>> connected_components(const InteractionGraph& g) {
  auto adj = adjacency(g, /*directed=*/false);
  std::vector<int> comp(g.n, -1);
  int count = 0;
  for (int v = 0; v < g.n; ++v) {
    if (comp[v] >= 0) continue;
    std::stack<int> stack;
    stack.push(v);
    comp[v] = count;
    while (!stack.empty()) {
      int u = stack.top();
      stack.pop();
      for (int w : adj[u]) {
        if (comp[w] < 0) {
          comp[w] = count;
          stack.push(w);
        }
      }
    }
    ++count;
  }
  std::vector<std::vector<int>> components(count);
  for (int v = 0; v < g.n; ++v) components[comp[v]].push_back(v);
  return components;
}

BoundsReport bounds_report(const Chain& chain, double tau) {
  BoundsReport report;
  const int n = chain.n_agents;

  InteractionGraph h1 = unbounded_interactions_graph(chain);
  InteractionGraph h2 = infinite_flow_graph(chain);
  report.lower_sroot = smallest_sroot(h1).size;
  auto components = connected_components(h2);
  report.lower_components_h2 = static_cast<int>(components.size());
  int h2_prime = 0;
  for (const auto& c : components) {
    if (c.size() >= 2) ++h2_prime;
  }
  report.upper_n_minus_h2prime = n - h2_prime;

  RankReport rr = rank(chain, tau);
  report.rank = rr.rank;
  report.rank_converged = rr.converged;

  ErgodicityClassing classing =
      ergodicity_classes(chain, tau, default_horizon_schedule(chain, tau));
  if (classing.converged) {
    report.upper_ergodicity_classes = static_cast<int>(classing.classes.size());
  }

  report.all_consistent =
      report.lower_components_h2 <= report.lower_sroot &&
      report.lower_sroot <= report.rank &&
      report.rank <= report.upper_n_minus_h2prime &&
      (!report.upper_ergodicity_classes ||
       report.rank <= *report.upper_ergodicity_classes);
  return report;
}

bool full_rank_test(const Chain& chain) {
  if (chain.is_discrete()) {
    // Full rank iff the chain is l1-close to a permutation chain: every
    // tail-block matrix is a permutation (the quiescent identity counts).
    auto is_perm = [](const Matrix& m) {
      const int n = static_cast<int>(m.rows());
      std::vector<int> col_hits(n, 0);
      for (int i = 0; i < n; ++i) {
        int ones = 0;
        for (int j = 0; j < n; ++j) {
          if (std::abs(m(i, j) - 1.0) <= 1e-12) {
            ++ones;
            ++col_hits[j];
          } else if (std::abs(m(i, j)) > 1e-12) {
            return false;
          }
        }
        if (ones != 1) return false;
      }
      return std::all_of(col_hits.begin(), col_hits.end(),
                         [](int c) { return c == 1; });
    };
    if (const auto* p = chain.periodic_tail()) {
      return std::all_of(p->block.begin(), p->block.end(),
                         [&](const Segment& s) { return is_perm(s.matrix); });
    }
    return true;  // identity tail
  }
  // Continuous: l1-close to the neutral chain means a quiescent tail.
  if (const auto* p = chain.periodic_tail()) {
    return std::all_of(p->block.begin(), p->block.end(), [](const Segment& s) {
      return s.matrix.cwiseAbs().maxCoeff() <= 1e-12;
    });
  }
  return true;
}

std::string to_dot(const InteractionGraph& g) {
  static const char* palette[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3",
                                  "#ff7f00", "#a65628", "#f781bf", "#999999"};
  const bool directed = g.kind == InteractionGraph::Kind::UnboundedDirected;
  auto components = connected_components(g);
  std::vector<int> comp_of(g.n, 0);
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (int v : components[c]) comp_of[v] = static_cast<int>(c);
  }
  std::ostringstream os;
  os << (directed ? "digraph h1 {\n" : "graph h2 {\n");
  for (int v = 0; v < g.n; ++v) {
    os << "  " << (v + 1) << " [style=filled, fillcolor=\""
       << palette[comp_of[v] % 8] << "\"];\n";
  }
  for (const auto& [i, j] : g.edges) {
    os << "  " << (i + 1) << (directed ? " -> " : " -- ") << (j + 1) << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace egcnet
