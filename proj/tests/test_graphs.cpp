#include "egcnet/graph_bounds.hpp"

#include "egcnet/rank.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace egcnet;
using namespace egcnet::testing;

TEST_CASE("unbounded interactions of the worked chain point into agent 2") {
  InteractionGraph h1 = unbounded_interactions_graph(line3_chain());
  CHECK(h1.edges == std::set<std::pair<int, int>>{{0, 1}, {2, 1}});
}

TEST_CASE("zero-tail chains have no unbounded interactions") {
  CHECK(unbounded_interactions_graph(dyadic_chain_a(4)).edges.empty());
  CHECK(infinite_flow_graph(dyadic_chain_a(4)).edges.empty());
}

TEST_CASE("a recurring entry in the tail block creates an edge") {
  Matrix a = Matrix::Identity(3, 3);
  a(0, 0) = 0.5;
  a(0, 1) = 0.5;  // agent 1 keeps listening to agent 2
  Chain chain = periodic_chain(TimeMode::Discrete, {a, Matrix::Identity(3, 3)}, {1, 2});
  InteractionGraph h1 = unbounded_interactions_graph(chain);
  CHECK(h1.edges == std::set<std::pair<int, int>>{{1, 0}});
}

TEST_CASE("infinite flow graph of the worked chain is a path with one component") {
  InteractionGraph h2 = infinite_flow_graph(line3_chain());
  CHECK(h2.edges == std::set<std::pair<int, int>>{{0, 1}, {1, 2}});
  CHECK(connected_components(h2).size() == 1);
}

TEST_CASE("decoupled blocks give one flow component per block") {
  Rng rng(211);
  auto gen = [&](int s) { return random_intensity(s, rng, 1.0); };
  Chain chain = periodic_chain(TimeMode::Continuous,
                               {block_diagonal({2, 2}, gen)}, {1.0});
  auto components = connected_components(infinite_flow_graph(chain));
  REQUIRE(components.size() == 2);
  CHECK(components[0] == std::vector<int>{0, 1});
  CHECK(components[1] == std::vector<int>{2, 3});
}

TEST_CASE("smallest s-root: strongly connected, worked chain, star") {
  Rng rng(213);
  Chain sc = constant_chain(random_strongly_connected_intensity(6, rng),
                            TimeMode::Continuous);
  SRoot root = smallest_sroot(unbounded_interactions_graph(sc));
  CHECK(root.size == 1);

  SRoot r3 = smallest_sroot(unbounded_interactions_graph(line3_chain()));
  CHECK(r3.size == 2);
  CHECK(r3.witness == std::vector<int>{0, 2});

  // A star whose center broadcasts to k leaves: the center alone reaches
  // everything (every leaf listens to the center).
  for (int leaves : {2, 3, 4}) {
    int n = leaves + 1;
    Matrix a = Matrix::Zero(n, n);
    for (int leaf = 1; leaf < n; ++leaf) {
      a(leaf, 0) = 1.0;
      a(leaf, leaf) = -1.0;
    }
    Chain star = constant_chain(a, TimeMode::Continuous);
    InteractionGraph h1 = unbounded_interactions_graph(star);
    SRoot s = smallest_sroot(h1);
    CHECK(s.size == 1);
    CHECK(s.witness == std::vector<int>{0});
    CHECK(sroot_bruteforce(h1) == 1);
  }
}

TEST_CASE("smallest s-root matches the brute-force subset oracle") {
  Rng rng(217);
  for (int trial = 0; trial < 12; ++trial) {
    int n = 3 + rng.below(5);
    Chain chain = constant_chain(random_intensity(n, rng, 0.35), TimeMode::Continuous);
    InteractionGraph h1 = unbounded_interactions_graph(chain);
    SRoot fast = smallest_sroot(h1);
    CHECK(fast.size == sroot_bruteforce(h1));
    // The witness really reaches every node.
    std::vector<std::vector<int>> adj(n);
    for (const auto& [i, j] : h1.edges) adj[i].push_back(j);
    std::vector<bool> reached(n, false);
    std::vector<int> stack(fast.witness.begin(), fast.witness.end());
    for (int v : stack) reached[v] = true;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v]) {
        if (!reached[w]) {
          reached[w] = true;
          stack.push_back(w);
        }
      }
    }
    for (int v = 0; v < n; ++v) CHECK(reached[v]);
  }
}

TEST_CASE("bounds are tight for TI chains and consistent everywhere") {
  BoundsReport r3 = bounds_report(line3_chain(), 0.0);
  CHECK(r3.lower_sroot == 2);
  CHECK(r3.rank == 2);
  CHECK(r3.upper_n_minus_h2prime == 2);
  CHECK(r3.all_consistent);

  BoundsReport neutral = bounds_report(neutral_chain(4, TimeMode::Continuous), 0.0);
  CHECK(neutral.lower_components_h2 == 4);
  CHECK(neutral.rank == 4);
  CHECK(neutral.upper_n_minus_h2prime == 4);
  CHECK(neutral.all_consistent);
}

TEST_CASE("bounds sandwich holds across the randomized suite") {
  for (const auto& named : suite_chains()) {
    INFO(named.name);
    BoundsReport b = bounds_report(named.chain, 0.0);
    if (!b.rank_converged) continue;
    CHECK(b.all_consistent);
    CHECK(b.lower_components_h2 <= b.lower_sroot);
    CHECK(b.lower_sroot <= b.rank);
    CHECK(b.rank <= b.upper_n_minus_h2prime);
    if (b.upper_ergodicity_classes) {
      CHECK(b.rank <= *b.upper_ergodicity_classes);
    }
    if (named.chain.is_time_invariant()) {
      CHECK(b.lower_sroot == b.rank);
    }
  }
}

TEST_CASE("H2 is the symmetrization of H1 across the suite") {
  for (const auto& named : suite_chains()) {
    InteractionGraph h1 = unbounded_interactions_graph(named.chain);
    InteractionGraph h2 = infinite_flow_graph(named.chain);
    std::set<std::pair<int, int>> symmetrized;
    for (const auto& [i, j] : h1.edges) {
      symmetrized.insert({std::min(i, j), std::max(i, j)});
    }
    CHECK(h2.edges == symmetrized);
  }
}

TEST_CASE("full-rank characterizations") {
  // Continuous: any finite prefix with a quiescent tail.
  CHECK(full_rank_test(dyadic_chain_a(4)));
  CHECK(full_rank_test(neutral_chain(3, TimeMode::Continuous)));
  Rng rng(219);
  Chain periodic = periodic_chain(TimeMode::Continuous, {random_intensity(3, rng)},
                                  {1.0});
  CHECK_FALSE(full_rank_test(periodic));

  // Discrete: permutation tails are full rank; a positive doubly
  // stochastic tail collapses to rank 1 (Perron).
  Matrix cycle = Matrix::Zero(3, 3);
  cycle(0, 1) = cycle(1, 2) = cycle(2, 0) = 1;
  Chain perm_chain = periodic_chain(TimeMode::Discrete, {cycle}, {1});
  CHECK(full_rank_test(perm_chain));
  CHECK(rank(perm_chain, 0.0).rank == 3);

  Matrix doubly = Matrix::Constant(3, 3, 1.0 / 3.0);
  Chain doubly_chain = periodic_chain(TimeMode::Discrete, {doubly}, {1});
  CHECK_FALSE(full_rank_test(doubly_chain));
  CHECK(rank(doubly_chain, 0.0).rank == 1);

  // Full-rank verdicts agree with the rank computation on the suite.
  for (const auto& named : suite_chains()) {
    INFO(named.name);
    RankReport r = rank(named.chain, 0.0);
    if (!r.converged) continue;
    CHECK(full_rank_test(named.chain) == (r.rank == named.chain.n_agents));
  }
}

TEST_CASE("DOT export names agents 1-based and colors components") {
  std::string dot = to_dot(unbounded_interactions_graph(line3_chain()));
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("1 -> 2") != std::string::npos);
  CHECK(dot.find("3 -> 2") != std::string::npos);
  std::string undirected = to_dot(infinite_flow_graph(line3_chain()));
  CHECK(undirected.find("graph") != std::string::npos);
  CHECK(undirected.find("1 -- 2") != std::string::npos);
  CHECK(undirected.find("fillcolor") != std::string::npos);
}
