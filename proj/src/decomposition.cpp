#include "egcnet/decomposition.hpp"

#include "egcnet/linalg.hpp"
#include "egcnet/transition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace egcnet {

namespace {

void require_discrete(const Chain& chain, const char* who) {
  if (!chain.is_discrete()) {
    std::ostringstream os;
    os << who << ": defined for discrete chains only";
    throw std::invalid_argument(os.str());
  }
}

std::vector<Matrix> step_matrices(const Chain& chain, int horizon) {
  std::vector<Matrix> a(horizon);
  for (int t = 0; t < horizon; ++t) a[t] = evaluate_at(chain, t);
  return a;
}

// r_ij(t) = pi_i(t) p_ij(t) = pi_j(t+1) a_ji(t): the pi-mass moving from
// agent i at time t to agent j at time t+1 in the reversed chain.
inline double r_mass(const AbsoluteProbabilitySequence& aps, const Matrix& a_t,
                     int t, int i, int j) {
  return aps.pis[t + 1](j) * a_t(j, i);
}

}  // namespace

bool Jet::proper(int n) const {
  for (const auto& s : sets) {
    if (s.empty() || static_cast<int>(s.size()) == n) return false;
  }
  return !sets.empty();
}

Jet Jet::constant(const std::vector<int>& s, int horizon) {
  Jet jet;
  std::vector<int> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  jet.sets.assign(horizon + 1, sorted);
  return jet;
}

AbsoluteProbabilitySequence absolute_probability_sequence(const Chain& chain,
                                                          int horizon) {
  require_discrete(chain, "absolute_probability_sequence");
  if (horizon < 1)
    throw std::invalid_argument("absolute_probability_sequence: horizon must be >= 1");
  const int n = chain.n_agents;
  AbsoluteProbabilitySequence aps;
  aps.horizon = horizon;
  aps.pis.assign(horizon + 1, Vector());
  aps.pis[horizon] = Vector::Constant(n, 1.0 / n);
  for (int t = horizon - 1; t >= 0; --t) {
    Matrix a = evaluate_at(chain, t);
    // pi'(t) = pi'(t+1) A(t); row-stochastic A preserves total mass.
    aps.pis[t] = a.transpose() * aps.pis[t + 1];
  }
  return aps;
}

std::vector<Matrix> reversed_chain(const AbsoluteProbabilitySequence& aps,
                                   const Chain& chain) {
  require_discrete(chain, "reversed_chain");
  const int n = chain.n_agents;
  const int horizon = aps.horizon;
  std::vector<Matrix> ps(horizon);
  for (int t = 0; t < horizon; ++t) {
    Matrix a = evaluate_at(chain, t);
    Matrix p = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      if (aps.pis[t](i) > 1e-14) {
        for (int j = 0; j < n; ++j) {
          p(i, j) = aps.pis[t + 1](j) * a(j, i) / aps.pis[t](i);
        }
      } else {
        // Vanishing mass leaves the row unconstrained; uniform keeps it
        // stochastic.
        p.row(i).setConstant(1.0 / n);
      }
    }
    ps[t] = std::move(p);
  }
  return ps;
}

double jet_flow(const Jet& jet_s, const Jet& jet_k,
                const AbsoluteProbabilitySequence& aps, const Chain& chain) {
  require_discrete(chain, "jet_flow");
  if (jet_s.sets.size() != jet_k.sets.size() ||
      static_cast<int>(jet_s.sets.size()) != aps.horizon + 1)
    throw std::invalid_argument("jet_flow: mismatched horizons");
  const int horizon = aps.horizon;
  double total = 0.0;
  for (int t = 0; t < horizon; ++t) {
    Matrix a = evaluate_at(chain, t);
    for (int i : jet_k.sets[t]) {
      for (int j : jet_s.sets[t + 1]) total += r_mass(aps, a, t, i, j);
    }
    for (int i : jet_s.sets[t]) {
      for (int j : jet_k.sets[t + 1]) total += r_mass(aps, a, t, i, j);
    }
  }
  return total;
}

double u_in(const Jet& jet, const Chain& chain, int horizon,
            std::vector<double>* running_sum) {
  require_discrete(chain, "u_in");
  if (static_cast<int>(jet.sets.size()) < horizon + 1)
    throw std::invalid_argument("u_in: jet shorter than horizon");
  const int n = chain.n_agents;
  double total = 0.0;
  if (running_sum) running_sum->clear();
  for (int t = 0; t < horizon; ++t) {
    Matrix a = evaluate_at(chain, t);
    std::vector<bool> in_prev(n, false);
    for (int j : jet.sets[t]) in_prev[j] = true;
    for (int i : jet.sets[t + 1]) {
      for (int j = 0; j < n; ++j) {
        if (!in_prev[j]) total += a(i, j);
      }
    }
    if (running_sum) running_sum->push_back(total);
  }
  return total;
}

JetDecomposition sonin_decomposition(const Chain& chain, int horizon,
                                     double tol_cluster, double mass_floor,
                                     const Vector* probe) {
  require_discrete(chain, "sonin_decomposition");
  if (horizon < 2)
    throw std::invalid_argument("sonin_decomposition: horizon must be >= 2");
  if (horizon < chain.prefix_end())
    throw std::invalid_argument("sonin_decomposition: horizon must pass the prefix");
  const int n = chain.n_agents;
  const int T = horizon;

  auto a = step_matrices(chain, T);
  AbsoluteProbabilitySequence aps = absolute_probability_sequence(chain, T);

  // Phi(T, t) for every t, built backward: Phi(T, t) = Phi(T, t+1) A(t).
  std::vector<Matrix> phi_from(T + 1);
  phi_from[T] = Matrix::Identity(n, n);
  for (int t = T - 1; t >= 0; --t) phi_from[t] = phi_from[t + 1] * a[t];

  auto rows_of = [&](const Matrix& m) {
    std::vector<Vector> rows;
    rows.reserve(n);
    for (int i = 0; i < n; ++i) rows.push_back(m.row(i).transpose());
    return rows;
  };

  // Cross-section clustering per t: agents whose Phi(T, t) rows agree share
  // an asymptotic destiny over the window [t, T].
  std::vector<std::vector<std::vector<int>>> clusters(T + 1);
  for (int t = 0; t <= T; ++t) {
    clusters[t] = linalg::single_linkage(rows_of(phi_from[t]), tol_cluster);
  }

  JetDecomposition dec;
  dec.horizon = T;
  dec.t_mid = T / 2;

  // Jets start from the t = 0 cross-sections. Each later cluster attaches
  // to the jet retaining the most pi-mass across the step; when a jet
  // attracts several clusters (a split), the best one continues it and the
  // rest spawn child jets. Splits in the bulk are genuine (the discrete
  // cross-section count is non-decreasing in time); splits inside the
  // terminal boundary layer get merged back into their parents below.
  std::vector<std::vector<std::vector<int>>> jet_sets;  // [jet][t] -> members
  std::vector<int> parent;                              // spawn parent, -1 for roots
  for (const auto& c : clusters[0]) {
    jet_sets.push_back(std::vector<std::vector<int>>(T + 1));
    jet_sets.back()[0] = c;
    parent.push_back(-1);
  }
  for (int t = 0; t < T; ++t) {
    const std::size_t jets_at_t = jet_sets.size();
    // Choice of the best jet per cluster.
    std::vector<std::size_t> best_jet(clusters[t + 1].size(), 0);
    std::vector<double> best_mass(clusters[t + 1].size(), -1.0);
    for (std::size_t c = 0; c < clusters[t + 1].size(); ++c) {
      const auto& cluster = clusters[t + 1][c];
      int best_overlap = -1;
      for (std::size_t k = 0; k < jets_at_t; ++k) {
        double mass = 0.0;
        for (int i : jet_sets[k][t]) {
          for (int j : cluster) mass += r_mass(aps, a[t], t, i, j);
        }
        int overlap = 0;
        for (int j : cluster) {
          if (std::binary_search(jet_sets[k][t].begin(), jet_sets[k][t].end(), j))
            ++overlap;
        }
        if (mass > best_mass[c] + 1e-18 ||
            (std::abs(mass - best_mass[c]) <= 1e-18 && overlap > best_overlap)) {
          best_mass[c] = mass;
          best_overlap = overlap;
          best_jet[c] = k;
        }
      }
    }
    // Per jet, the strongest cluster continues it; the rest spawn children.
    std::vector<int> winner(jets_at_t, -1);
    for (std::size_t c = 0; c < clusters[t + 1].size(); ++c) {
      int& w = winner[best_jet[c]];
      if (w < 0 || best_mass[c] > best_mass[w] ||
          (best_mass[c] == best_mass[w] &&
           clusters[t + 1][c].front() < clusters[t + 1][w].front())) {
        w = static_cast<int>(c);
      }
    }
    for (std::size_t c = 0; c < clusters[t + 1].size(); ++c) {
      std::size_t target = best_jet[c];
      if (winner[target] != static_cast<int>(c)) {
        jet_sets.push_back(std::vector<std::vector<int>>(T + 1));
        parent.push_back(static_cast<int>(target));
        target = jet_sets.size() - 1;
      }
      auto& members = jet_sets[target][t + 1];
      members.insert(members.end(), clusters[t + 1][c].begin(),
                     clusters[t + 1][c].end());
      std::sort(members.begin(), members.end());
    }
  }
  // Boundary-layer children (nothing carried at the midpoint) rejoin their
  // parents; reverse spawn order resolves chains of spawns.
  for (int k = static_cast<int>(jet_sets.size()) - 1; k >= 0; --k) {
    if (parent[k] >= 0 && jet_sets[k][dec.t_mid].empty()) {
      for (int t = 0; t <= T; ++t) {
        auto& dst = jet_sets[parent[k]][t];
        dst.insert(dst.end(), jet_sets[k][t].begin(), jet_sets[k][t].end());
        std::sort(dst.begin(), dst.end());
        jet_sets[k][t].clear();
      }
    }
  }

  // J^0: agents whose pi-mass has vanished, evaluated per time step. The
  // terminal-uniform pi makes every agent's mass 1/N exactly at T, so the
  // vanishing-mass property shows away from the boundary.
  std::vector<std::vector<int>> j0(T + 1);
  for (int t = 0; t <= T; ++t) {
    for (std::size_t k = 0; k < jet_sets.size(); ++k) {
      auto& members = jet_sets[k][t];
      std::vector<int> kept;
      for (int i : members) {
        if (aps.pis[t](i) < mass_floor) {
          j0[t].push_back(i);
        } else {
          kept.push_back(i);
        }
      }
      members = std::move(kept);
    }
    std::sort(j0[t].begin(), j0[t].end());
  }

  // Jets empty in the bulk are boundary artifacts (or fully drained):
  // fold them into J^0.
  std::vector<std::vector<std::vector<int>>> live;
  for (auto& sets : jet_sets) {
    if (sets[dec.t_mid].empty()) {
      for (int t = 0; t <= T; ++t) {
        j0[t].insert(j0[t].end(), sets[t].begin(), sets[t].end());
        std::sort(j0[t].begin(), j0[t].end());
      }
    } else {
      live.push_back(std::move(sets));
    }
  }
  std::sort(live.begin(), live.end(), [&](const auto& x, const auto& y) {
    return x[dec.t_mid].front() < y[dec.t_mid].front();
  });

  Jet jet0;
  jet0.sets = std::move(j0);
  dec.jets.push_back(std::move(jet0));
  for (auto& sets : live) {
    Jet jet;
    jet.sets = std::move(sets);
    dec.jets.push_back(std::move(jet));
  }
  const int c = dec.count();

  // Mass trajectories.
  dec.mass.assign(c + 1, std::vector<double>(T + 1, 0.0));
  for (int k = 0; k <= c; ++k) {
    for (int t = 0; t <= T; ++t) {
      double m = 0.0;
      for (int i : dec.jets[k].sets[t]) m += aps.pis[t](i);
      dec.mass[k][t] = m;
    }
  }

  // Probe-based limit estimates over the final cross-sections.
  Vector x0 = probe ? *probe : [&] {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = i + 1;
    return v;
  }();
  Vector x_final = phi_from[0] * x0;
  dec.x_star.assign(c + 1, std::numeric_limits<double>::quiet_NaN());
  dec.x_star_spread.assign(c + 1, 0.0);
  for (int k = 1; k <= c; ++k) {
    int t_eval = T;
    while (t_eval > 0 && dec.jets[k].sets[t_eval].empty()) --t_eval;
    const auto& members = dec.jets[k].sets[t_eval];
    if (members.empty()) continue;
    // x_i(t_eval) = (Phi(t_eval, 0) x0)_i.
    Vector x_t;
    if (t_eval == T) {
      x_t = x_final;
    } else {
      Matrix fwd = Matrix::Identity(n, n);
      for (int s = 0; s < t_eval; ++s) fwd = a[s] * fwd;
      x_t = fwd * x0;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (int i : members) {
      lo = std::min(lo, x_t(i));
      hi = std::max(hi, x_t(i));
      sum += x_t(i);
    }
    dec.x_star[k] = sum / members.size();
    dec.x_star_spread[k] = hi - lo;
    if (dec.x_star_spread[k] > tol_cluster * std::max(1.0, std::abs(dec.x_star[k]))) {
      std::ostringstream os;
      os << "jet " << k << " limit estimate spread " << dec.x_star_spread[k];
      dec.warnings.push_back(os.str());
    }
  }

  // Pairwise truncated flows; the true decomposition keeps them finite.
  dec.flow = Matrix::Zero(c + 1, c + 1);
  for (int s = 0; s <= c; ++s) {
    for (int k = s + 1; k <= c; ++k) {
      double v = jet_flow(dec.jets[s], dec.jets[k], aps, chain);
      dec.flow(s, k) = dec.flow(k, s) = v;
      if (v > kFlowWarn) {
        std::ostringstream os;
        os << "flow V(J^" << s << ",J^" << k << ") = " << v << " exceeds "
           << kFlowWarn;
        dec.warnings.push_back(os.str());
      }
    }
  }

  // Stability: the t = 0 cross-section partition must agree between
  // horizons T and T/2.
  Matrix phi_half = phi(chain, dec.t_mid, 0).matrix;
  auto part_half = linalg::single_linkage(rows_of(phi_half), tol_cluster);
  auto canon = [](std::vector<std::vector<int>> p) {
    for (auto& c2 : p) std::sort(c2.begin(), c2.end());
    std::sort(p.begin(), p.end());
    return p;
  };
  dec.converged = canon(clusters[0]) == canon(part_half);
  return dec;
}

int jet_lower_bound(const Chain& chain, const std::vector<Jet>& candidate_jets,
                    int horizon, double slope_tol) {
  require_discrete(chain, "jet_lower_bound");
  // Disjointness at every time step is part of the contract.
  for (std::size_t x = 0; x < candidate_jets.size(); ++x) {
    for (std::size_t y = x + 1; y < candidate_jets.size(); ++y) {
      const auto& jx = candidate_jets[x].sets;
      const auto& jy = candidate_jets[y].sets;
      std::size_t upto = std::min(jx.size(), jy.size());
      for (std::size_t t = 0; t < upto; ++t) {
        std::vector<int> inter;
        std::set_intersection(jx[t].begin(), jx[t].end(), jy[t].begin(), jy[t].end(),
                              std::back_inserter(inter));
        if (!inter.empty())
          throw std::invalid_argument("jet_lower_bound: candidate jets overlap");
      }
    }
  }
  int certified = 0;
  for (const auto& jet : candidate_jets) {
    std::vector<double> running;
    u_in(jet, chain, horizon, &running);
    int half = horizon / 2;
    double slope =
        (running[horizon - 1] - running[half - 1]) / std::max(1, horizon - half);
    if (slope < slope_tol) ++certified;
  }
  return certified;
}

}  // namespace egcnet
