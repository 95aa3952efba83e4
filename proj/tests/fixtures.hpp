#pragma once

#include "egcnet/chain.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace egcnet::testing {

// Deterministic cross-platform RNG (splitmix64) so fixtures do not depend
// on standard-library distribution implementations.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next_u64() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int below(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }
};

inline Matrix line3_matrix() {
  Matrix a(3, 3);
  a << 0, 0, 0,
       1.0 / 3.0, -1, 2.0 / 3.0,
       0, 0, 0;
  return a;
}

inline Matrix line3_limit() {
  Matrix m(3, 3);
  m << 1, 0, 0,
       1.0 / 3.0, 0, 2.0 / 3.0,
       0, 0, 1;
  return m;
}

// A constant chain represented as a single-segment periodic tail.
inline Chain constant_chain(const Matrix& a, TimeMode mode, double duration = 1.0) {
  Chain chain;
  chain.mode = mode;
  chain.n_agents = static_cast<int>(a.rows());
  chain.tail = PeriodicTail{{Segment{duration, a}}};
  return chain;
}

inline Chain line3_chain() {
  return constant_chain(line3_matrix(), TimeMode::Continuous);
}

inline Chain neutral_chain(int n, TimeMode mode) {
  Chain chain;
  chain.mode = mode;
  chain.n_agents = n;
  chain.tail = ZeroTail{};
  return chain;
}

// The alternating dyadic-window chains. Windows for index k:
//   A: first matrix on [2^(2k)-1, 2^(2k)), second on [2^(2k), 2^(2k+1)-1)
//   B: first matrix on [2^(2k+1)-1, 2^(2k+1)), second on [2^(2k+1), 2^(2k+2)-1)
// and zero elsewhere. Truncated to k <= k_max with a zero tail: the
// truncation's thresholded numerical rank then reproduces the infinite
// chain's rank. k_max = 16 keeps the second singular value of Phi below
// the 1e-6 rank threshold.
inline constexpr int kDyadicKMax = 16;

inline Chain dyadic_chain_a(int k_max = kDyadicKMax) {
  Matrix m1(3, 3), m2(3, 3), zero = Matrix::Zero(3, 3);
  m1 << -1, 1, 0, 0, 0, 0, 0, 0, 0;
  m2 << 0, 0, 0, 0, -1, 1, 0, 0, 0;
  Chain chain;
  chain.mode = TimeMode::Continuous;
  chain.n_agents = 3;
  double prev_end = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    double w1_start = std::pow(2.0, 2 * k) - 1;
    double w1_end = std::pow(2.0, 2 * k);
    double w2_end = std::pow(2.0, 2 * k + 1) - 1;
    if (w1_start > prev_end) chain.prefix.push_back({w1_start - prev_end, zero});
    chain.prefix.push_back({w1_end - w1_start, m1});
    if (w2_end > w1_end) chain.prefix.push_back({w2_end - w1_end, m2});
    prev_end = w2_end;
  }
  chain.tail = ZeroTail{};
  return chain;
}

inline Chain dyadic_chain_b(int k_max = kDyadicKMax) {
  Matrix b1(3, 3), b2(3, 3), zero = Matrix::Zero(3, 3);
  b1 << 0, 0, 0, 0, 0, 0, 0, 1, -1;
  b2 << 0, 0, 0, 1, -1, 0, 0, 0, 0;
  Chain chain;
  chain.mode = TimeMode::Continuous;
  chain.n_agents = 3;
  double prev_end = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    double w1_start = std::pow(2.0, 2 * k + 1) - 1;
    double w1_end = std::pow(2.0, 2 * k + 1);
    double w2_end = std::pow(2.0, 2 * k + 2) - 1;
    if (w1_start > prev_end) chain.prefix.push_back({w1_start - prev_end, zero});
    chain.prefix.push_back({w1_end - w1_start, b1});
    if (w2_end > w1_end) chain.prefix.push_back({w2_end - w1_end, b2});
    prev_end = w2_end;
  }
  chain.tail = ZeroTail{};
  return chain;
}

inline Matrix random_intensity(int n, Rng& rng, double density = 0.6,
                               double scale = 1.0) {
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && rng.uniform() < density) a(i, j) = scale * rng.uniform(0.2, 1.0);
    }
    a(i, i) = -a.row(i).sum();
  }
  return a;
}

// Strongly connected weighted digraph Laplacian (negated): a ring plus
// random extra edges, so the TI chain has rank 1.
inline Matrix random_strongly_connected_intensity(int n, Rng& rng) {
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, (i + 1) % n) = rng.uniform(0.3, 1.0);
    for (int j = 0; j < n; ++j) {
      if (i != j && rng.uniform() < 0.3) a(i, j) = rng.uniform(0.2, 1.0);
    }
    a(i, i) = 0;
    a(i, i) = -a.row(i).sum();
  }
  return a;
}

inline Matrix random_stochastic(int n, Rng& rng, double self_weight = 0.3) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    double sum = 0;
    for (int j = 0; j < n; ++j) {
      a(i, j) = 0.05 + rng.uniform();
      sum += a(i, j);
    }
    a.row(i) /= sum;
    a.row(i) *= (1.0 - self_weight);
    a(i, i) += self_weight;
  }
  return a;
}

// Block-diagonal matrix with one mixing block per group.
template <typename Gen>
inline Matrix block_diagonal(const std::vector<int>& sizes, Gen gen) {
  int n = 0;
  for (int s : sizes) n += s;
  Matrix a = Matrix::Zero(n, n);
  int offset = 0;
  for (int s : sizes) {
    a.block(offset, offset, s, s) = gen(s);
    offset += s;
  }
  return a;
}

inline Chain periodic_chain(TimeMode mode, const std::vector<Matrix>& block,
                            const std::vector<double>& durations) {
  Chain chain;
  chain.mode = mode;
  chain.n_agents = static_cast<int>(block[0].rows());
  PeriodicTail tail;
  for (std::size_t i = 0; i < block.size(); ++i) {
    tail.block.push_back({durations[i], block[i]});
  }
  chain.tail = std::move(tail);
  return chain;
}

inline Chain zerotail_chain(TimeMode mode, const std::vector<Matrix>& prefix,
                            const std::vector<double>& durations) {
  Chain chain;
  chain.mode = mode;
  chain.n_agents = static_cast<int>(prefix[0].rows());
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    chain.prefix.push_back({durations[i], prefix[i]});
  }
  chain.tail = ZeroTail{};
  return chain;
}

struct NamedChain {
  std::string name;
  Chain chain;
};

// The randomized property suite: TI, periodic and zero-tail chains in
// both modes, N in 3..8, plus decoupled-block instances; all built to
// converge comfortably at the default tolerances.
inline std::vector<NamedChain> suite_chains() {
  std::vector<NamedChain> suite;
  for (int n = 3; n <= 8; ++n) {
    Rng rng(1000 + n);
    suite.push_back({"ti_cont_n" + std::to_string(n),
                     constant_chain(random_intensity(n, rng), TimeMode::Continuous)});
    suite.push_back({"ti_disc_n" + std::to_string(n),
                     constant_chain(random_stochastic(n, rng), TimeMode::Discrete)});
    suite.push_back(
        {"periodic_cont_n" + std::to_string(n),
         periodic_chain(TimeMode::Continuous,
                        {random_intensity(n, rng), random_intensity(n, rng)},
                        {0.75, 1.25})});
    suite.push_back(
        {"periodic_disc_n" + std::to_string(n),
         periodic_chain(TimeMode::Discrete,
                        {random_stochastic(n, rng), random_stochastic(n, rng)},
                        {1, 2})});
    suite.push_back(
        {"zerotail_cont_n" + std::to_string(n),
         zerotail_chain(TimeMode::Continuous,
                        {random_intensity(n, rng), random_intensity(n, rng)},
                        {0.8, 1.2})});
    suite.push_back(
        {"zerotail_disc_n" + std::to_string(n),
         zerotail_chain(TimeMode::Discrete,
                        {random_stochastic(n, rng), random_stochastic(n, rng)},
                        {1, 1})});
    // Two decoupled mixing blocks: rank 2 with a two-component flow graph.
    int first = n / 2;
    Rng block_rng(2000 + n);
    auto cont_gen = [&](int s) { return random_intensity(s, block_rng, 0.9); };
    suite.push_back(
        {"blocks_cont_n" + std::to_string(n),
         periodic_chain(TimeMode::Continuous,
                        {block_diagonal({first, n - first}, cont_gen)}, {1.0})});
    auto disc_gen = [&](int s) { return random_stochastic(s, block_rng); };
    suite.push_back(
        {"blocks_disc_n" + std::to_string(n),
         periodic_chain(TimeMode::Discrete,
                        {block_diagonal({first, n - first}, disc_gen)}, {1})});
  }
  return suite;
}

}  // namespace egcnet::testing
