// Acceptance suite: every release-gating property, one pass/fail line
// each. Exits non-zero if any criterion fails.

#include "egcnet/analysis.hpp"
#include "commands.hpp"

#include "../fixtures.hpp"
#include "../oracles.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace egcnet;
using namespace egcnet::testing;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void criterion(int number, const std::string& name,
               const std::function<void()>& body) {
  try {
    body();
    std::printf("[PASS] %2d. %s\n", number, name.c_str());
  } catch (const std::exception& e) {
    ++failures;
    std::printf("[FAIL] %2d. %s: %s\n", number, name.c_str(), e.what());
  }
}

void require(bool condition, const std::string& detail) {
  if (!condition) throw std::runtime_error(detail);
}

std::string describe(double value) {
  std::ostringstream os;
  os << value;
  return os.str();
}

fs::path write_chain_file(const Chain& chain, const std::string& name) {
  fs::path path = fs::temp_directory_path() / name;
  atomic_write_file(path.string(), dump_json_17(chain_to_json(chain)));
  return path;
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  Json j;
  in >> j;
  return j;
}

}  // namespace

int main() {
  const auto suite = suite_chains();

  criterion(1, "constant three-agent network: limit, rank, coalition, steering", [&] {
    Chain chain = line3_chain();
    auto res = limit_phi(chain, 0.0, default_horizon_schedule(chain, 0.0));
    double limit_err = (res.phi.matrix - line3_limit()).cwiseAbs().maxCoeff();
    require(limit_err < 1e-9, "limit matrix off by " + describe(limit_err));

    RankReport report = rank(chain, 0.0);
    require(report.rank == 2, "rank " + describe(report.rank) + " != 2");

    Coalition coalition = smallest_egc(chain, 0.0, report);
    require(coalition.members == std::vector<int>{0, 2}, "coalition is not {1,3}");

    auto classes = ergodicity_classes(chain, 0.0, default_horizon_schedule(chain, 0.0));
    require(classes.converged, "ergodicity classes did not settle");
    require(classes.classes == std::vector<std::vector<int>>{{0}, {1}, {2}},
            "expected three singleton classes");

    SteeringPlan plan = steer(chain, coalition, 5.0, {{1, -17.0}});
    Vector x0(3);
    x0 << plan.coalition_opinions.at(0), -17.0, plan.coalition_opinions.at(2);
    auto traj = simulate(chain, x0, 0.0, {0.0, 100.0});
    double dev = (traj.states.back() - Vector::Constant(3, 5.0)).cwiseAbs().maxCoeff();
    require(dev < 1e-6, "steering deviation " + describe(dev));
  });

  criterion(2, "alternating dyadic chains: ranks 1, 1 and 2 with coalition {1,3}", [&] {
    Chain a = dyadic_chain_a();
    RankReport ra = rank(a, 0.0, 1e-6);
    require(ra.converged, "rank of the first chain did not converge");
    require(ra.rank == 1, "rank of the first chain is " + describe(ra.rank));
    Matrix to_last = Vector::Ones(3) * Eigen::RowVector3d(0, 0, 1);
    double a_err =
        (phi(a, a.prefix_end(), 0.0).matrix - to_last).cwiseAbs().maxCoeff();
    require(a_err < 1e-5, "limit rows deviate from [0,0,1] by " + describe(a_err));

    Chain b = dyadic_chain_b();
    RankReport rb = rank(b, 0.0, 1e-6);
    require(rb.converged && rb.rank == 1,
            "rank of the mirrored chain is " + describe(rb.rank));
    Matrix to_first = Vector::Ones(3) * Eigen::RowVector3d(1, 0, 0);
    double b_err =
        (phi(b, b.prefix_end(), 0.0).matrix - to_first).cwiseAbs().maxCoeff();
    require(b_err < 1e-5, "limit rows deviate from [1,0,0] by " + describe(b_err));

    Chain sum = add(a, b);
    RankReport rs = rank(sum, 0.0, 1e-6);
    require(rs.converged, "rank of the sum did not converge");
    require(rs.rank == 2, "rank of the sum is " + describe(rs.rank));
    Coalition coalition = smallest_egc(sum, 0.0, rs);
    require(coalition.members == std::vector<int>{0, 2}, "sum coalition is not {1,3}");
  });

  criterion(3, "stabilized polytope vertex count equals rank on the suite", [&] {
    int converged_count = 0;
    for (const auto& named : suite) {
      RankReport report = rank(named.chain, 0.0);
      if (!report.converged) continue;
      ++converged_count;
      auto trace = vertex_count_trace(named.chain, 0.0,
                                      default_horizon_schedule(named.chain, 0.0));
      require(trace.stabilized, named.name + ": vertex trace not stabilized");
      require(trace.entries.back().vertex_count == report.rank,
              named.name + ": vertices " +
                  describe(trace.entries.back().vertex_count) + " != rank " +
                  describe(report.rank));
    }
    require(converged_count >= 20,
            "only " + describe(converged_count) + " converged chains in the suite");
  });

  criterion(4, "bound sandwich h2 <= s-root <= rank <= min(N-h2', classes)", [&] {
    for (const auto& named : suite) {
      BoundsReport b = bounds_report(named.chain, 0.0);
      if (!b.rank_converged) continue;
      require(b.lower_components_h2 <= b.lower_sroot,
              named.name + ": h2 above s-root size");
      require(b.lower_sroot <= b.rank, named.name + ": s-root above rank");
      require(b.rank <= b.upper_n_minus_h2prime, named.name + ": rank above N-h2'");
      if (b.upper_ergodicity_classes) {
        require(b.rank <= *b.upper_ergodicity_classes,
                named.name + ": rank above the class count");
      }
      require(b.all_consistent, named.name + ": report flagged inconsistent");
    }
  });

  criterion(5, "TI chains: rank = matrix nullity = smallest s-root (brute force)", [&] {
    for (int trial = 0; trial < 10; ++trial) {
      Rng rng(6000 + trial);
      int n = 3 + trial % 6;
      Matrix a_hat = random_intensity(n, rng, 0.4);
      Chain chain = constant_chain(a_hat, TimeMode::Continuous);
      RankReport report = rank(chain, 0.0);
      int matrix_nullity = n - linalg::matrix_rank(a_hat, 1e-10);
      require(report.rank == matrix_nullity,
              "trial " + describe(trial) + ": rank " + describe(report.rank) +
                  " != matrix nullity " + describe(matrix_nullity));
      int brute = sroot_bruteforce(unbounded_interactions_graph(chain));
      require(report.rank == brute,
              "trial " + describe(trial) + ": rank " + describe(report.rank) +
                  " != brute-force s-root " + describe(brute));
    }
  });

  criterion(6, "rank is invariant under summable perturbations (3 seeds)", [&] {
    for (const auto& named : suite) {
      int base = rank(named.chain, 0.0).rank;
      for (std::uint64_t seed : {101u, 202u, 303u}) {
        Chain perturbed = perturb_summable(named.chain, seed, 0.1);
        int r = rank(perturbed, 0.0).rank;
        require(r == base, named.name + " seed " + describe(seed) + ": rank " +
                               describe(r) + " != " + describe(base));
      }
    }
  });

  criterion(7, "full-rank characterizations in both time modes", [&] {
    Rng rng(7000);
    for (int n : {3, 5, 7}) {
      Chain zt = zerotail_chain(TimeMode::Continuous,
                                {random_intensity(n, rng), random_intensity(n, rng)},
                                {0.8, 1.0});
      require(full_rank_test(zt), "zero-tail chain not flagged full rank");
      RankReport r = rank(zt, 0.0);
      require(r.converged && r.rank == n,
              "zero-tail chain rank " + describe(r.rank) + " != " + describe(n));
    }
    Matrix cycle = Matrix::Zero(4, 4);
    cycle(0, 1) = cycle(1, 2) = cycle(2, 3) = cycle(3, 0) = 1;
    Chain perm = periodic_chain(TimeMode::Discrete, {cycle}, {1});
    require(full_rank_test(perm) && rank(perm, 0.0).rank == 4,
            "permutation tail is not full rank");

    Matrix positive = random_stochastic(4, rng, 0.1);
    Chain ergodic = periodic_chain(TimeMode::Discrete, {positive}, {1});
    auto eigs = linalg::eigenvalues(positive);
    std::vector<double> mods;
    for (int i = 0; i < eigs.size(); ++i) mods.push_back(std::abs(eigs(i)));
    std::sort(mods.rbegin(), mods.rend());
    require(mods[1] < 1.0 - 1e-6, "Perron oracle: second eigenvalue not inside");
    require(!full_rank_test(ergodic), "positive tail flagged full rank");
    require(rank(ergodic, 0.0).rank == 1,
            "positive-tail chain rank != 1");
  });

  criterion(8, "positive-diagonal periodic chains: classes = h2 = rank, pi > 0", [&] {
    Rng rng(8000);
    std::vector<std::vector<int>> partitions = {{6}, {3, 3}, {2, 2, 2}, {4, 2}, {2, 3}};
    for (std::size_t i = 0; i < partitions.size(); ++i) {
      auto gen = [&](int s) {
        return (0.5 * (Matrix::Identity(s, s) + random_stochastic(s, rng, 0.0)))
            .eval();
      };
      Chain chain = periodic_chain(
          TimeMode::Discrete,
          {block_diagonal(partitions[i], gen), block_diagonal(partitions[i], gen)},
          {1, 1});
      int h2 = static_cast<int>(partitions[i].size());
      RankReport report = rank(chain, 0.0);
      require(report.rank == h2, "instance " + describe(i) + ": rank " +
                                     describe(report.rank) + " != h2 " + describe(h2));
      auto classes =
          ergodicity_classes(chain, 0.0, default_horizon_schedule(chain, 0.0));
      require(classes.converged &&
                  static_cast<int>(classes.classes.size()) == h2,
              "instance " + describe(i) + ": class count != h2");
      auto components = connected_components(infinite_flow_graph(chain));
      require(static_cast<int>(components.size()) == h2,
              "instance " + describe(i) + ": flow components != h2");
      PStarResult pstar = class_pstar_check(chain, {0.0, 1.0, 4.0}, 64.0);
      require(pstar.in_class.has_value() && *pstar.in_class,
              "instance " + describe(i) + ": class membership not confirmed");
      auto aps = absolute_probability_sequence(chain, 64);
      double min_pi = 1.0;
      for (const auto& pi : aps.pis) min_pi = std::min(min_pi, pi.minCoeff());
      require(min_pi > 0, "instance " + describe(i) + ": vanishing pi entry");
      // Uniformly positive mass leaves nothing for the vanishing-mass jet.
      JetDecomposition dec = sonin_decomposition(chain, 64);
      for (const auto& cross_section : dec.jets[0].sets) {
        require(cross_section.empty(),
                "instance " + describe(i) + ": unexpected vanishing-mass jet");
      }
    }
  });

  criterion(9, "jet decompositions: count = rank, backward and flow identities", [&] {
    for (const auto& named : suite) {
      if (!named.chain.is_discrete()) continue;
      RankReport report = rank(named.chain, 0.0);
      if (!report.converged) continue;
      // Escalate the horizon until the clustering stabilizes.
      int horizon = std::max(32, static_cast<int>(named.chain.prefix_end()) * 2 + 16);
      JetDecomposition dec = sonin_decomposition(named.chain, horizon);
      while (!dec.converged && horizon < 1024) {
        horizon *= 2;
        dec = sonin_decomposition(named.chain, horizon);
      }
      require(dec.converged, named.name + ": decomposition not converged");
      require(dec.count() == report.rank,
              named.name + ": jets " + describe(dec.count()) + " != rank " +
                  describe(report.rank));

      auto aps = absolute_probability_sequence(named.chain, horizon);
      auto ps = reversed_chain(aps, named.chain);
      for (int t = 0; t < horizon; ++t) {
        Matrix a = evaluate_at(named.chain, t);
        double residual =
            (a.transpose() * aps.pis[t + 1] - aps.pis[t]).cwiseAbs().maxCoeff();
        require(residual < 1e-10, named.name + ": backward identity residual " +
                                      describe(residual));
        for (int r = 0; r < named.chain.n_agents; ++r) {
          for (int c = 0; c < named.chain.n_agents; ++c) {
            double via_p = aps.pis[t](r) * ps[t](r, c);
            double via_a = aps.pis[t + 1](c) * a(c, r);
            require(std::abs(via_p - via_a) < 1e-12,
                    named.name + ": r_ij mismatch " + describe(via_p - via_a));
          }
        }
      }
    }
  });

  criterion(10, "fifty steering runs through the command layer, plus covariance", [&] {
    Rng rng(9000);
    int runs = 0;
    fs::path out = fs::temp_directory_path() / "acceptance_plan.json";
    // The command layer narrates to stdout; keep the acceptance log clean.
    std::ostringstream sink;
    auto* saved = std::cout.rdbuf(sink.rdbuf());
    struct Restore {
      std::streambuf* buf;
      ~Restore() { std::cout.rdbuf(buf); }
    } restore{saved};
    while (runs < 50) {
      const auto& named = suite[runs % suite.size()];
      RankReport report = rank(named.chain, 0.0);
      if (!report.converged) continue;
      Coalition coalition = smallest_egc(named.chain, 0.0, report);
      double target = rng.uniform(-5.0, 5.0);
      std::ostringstream fixed;
      fixed.precision(17);
      bool first = true;
      for (int row : coalition.complement_rows) {
        if (!first) fixed << ",";
        fixed << (row + 1) << "=" << rng.uniform(-3.0, 3.0);
        first = false;
      }
      fs::path chain_file =
          write_chain_file(named.chain, "acc_steer_" + std::to_string(runs) + ".json");
      cli::SteerArgs args;
      args.path = chain_file.string();
      args.target = target;
      args.fixed = fixed.str();
      args.out = out.string();
      int code = cli::cmd_steer(args);
      require(code == 0, named.name + ": cmd_steer exit " + describe(code));
      Json plan = read_json(out);
      double deviation = plan["max_deviation"].get<double>();
      require(deviation < 1e-5,
              named.name + ": deviation " + describe(deviation) + " at target " +
                  describe(target));
      ++runs;
    }

    // Translation covariance on ten shifted pairs through the same layer.
    for (int pair = 0; pair < 10; ++pair) {
      const auto& named = suite[(3 * pair) % suite.size()];
      RankReport report = rank(named.chain, 0.0);
      if (!report.converged) continue;
      Coalition coalition = smallest_egc(named.chain, 0.0, report);
      double target = rng.uniform(-2.0, 2.0);
      double offset = rng.uniform(0.5, 3.0);
      std::map<int, double> fixed;
      for (int row : coalition.complement_rows) fixed[row] = rng.uniform(-2.0, 2.0);
      auto format = [&](double shift) {
        std::ostringstream os;
        os.precision(17);
        bool first = true;
        for (const auto& [row, value] : fixed) {
          if (!first) os << ",";
          os << (row + 1) << "=" << (value + shift);
          first = false;
        }
        return os.str();
      };
      fs::path chain_file =
          write_chain_file(named.chain, "acc_shift_" + std::to_string(pair) + ".json");
      cli::SteerArgs base_args;
      base_args.path = chain_file.string();
      base_args.target = target;
      base_args.fixed = format(0.0);
      base_args.out = out.string();
      require(cli::cmd_steer(base_args) == 0, "base steering run failed");
      Json base_plan = read_json(out);
      cli::SteerArgs shifted_args = base_args;
      shifted_args.target = target + offset;
      shifted_args.fixed = format(offset);
      require(cli::cmd_steer(shifted_args) == 0, "shifted steering run failed");
      Json shifted_plan = read_json(out);
      for (auto it = base_plan["coalition_opinions"].begin();
           it != base_plan["coalition_opinions"].end(); ++it) {
        double lhs = shifted_plan["coalition_opinions"][it.key()].get<double>();
        double diff = lhs - it.value().get<double>() - offset;
        require(std::abs(diff) < 1e-9,
                named.name + ": covariance off by " + describe(diff));
      }
    }
  });

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
