#include "commands.hpp"

#include "egcnet/version.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

namespace egcnet::cli {

namespace {

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") {
    std::cout << content;
  } else {
    atomic_write_file(out, content);
  }
}

std::optional<Chain> load_or_complain(const std::string& path, int& exit_code) {
  try {
    Chain chain = load_chain_file(path);
    auto report = validate(chain);
    if (!report.valid()) {
      for (const auto& v : report.violations) {
        std::cerr << "invalid chain: ";
        if (v.where == Violation::Where::Prefix) {
          std::cerr << "prefix[" << v.segment << "]";
        } else if (v.where == Violation::Where::TailBlock) {
          std::cerr << "tail block[" << v.segment << "]";
        } else {
          std::cerr << "chain";
        }
        if (v.row >= 0) std::cerr << " row " << (v.row + 1);
        if (v.col >= 0) std::cerr << " col " << (v.col + 1);
        std::cerr << ": " << v.message << "\n";
      }
      exit_code = kExitInvalidChain;
      return std::nullopt;
    }
    return chain;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    exit_code = kExitParseError;
    return std::nullopt;
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

}  // namespace

std::vector<double> parse_sample_list(const std::string& text) {
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    auto parts = split(text, ':');
    if (parts.size() != 3) throw std::invalid_argument("expected start:stop:count");
    double start = std::stod(parts[0]);
    double stop = std::stod(parts[1]);
    int count = std::stoi(parts[2]);
    if (count < 2 || stop <= start)
      throw std::invalid_argument("expected start < stop and count >= 2");
    for (int i = 0; i < count; ++i) {
      values.push_back(start + (stop - start) * i / (count - 1));
    }
    return values;
  }
  for (const auto& item : split(text, ',')) values.push_back(std::stod(item));
  return values;
}

int cmd_validate(const std::string& path) {
  int code = kExitOk;
  auto chain = load_or_complain(path, code);
  if (!chain) return code;
  std::cout << "valid: " << to_string(chain->mode) << " chain, " << chain->n_agents
            << " agents, " << chain->prefix.size() << " prefix segment(s), "
            << (chain->has_periodic_tail() ? "periodic" : "zero") << " tail\n";
  return kExitOk;
}

int cmd_analyze(const AnalyzeArgs& args) {
  int code = kExitOk;
  auto chain = load_or_complain(args.path, code);
  if (!chain) return code;

  AnalysisOptions options;
  options.tau = args.tau;
  options.tol = args.tol;
  options.max_horizon = args.horizon;
  options.with_polytope = args.polytope;
  options.with_jets = args.jets;

  AnalysisBundle bundle;
  try {
    bundle = analyze(*chain, options);
  } catch (const linalg::MarginalSpectrumError& e) {
    std::cerr << "rank did not converge: " << e.what() << "\n";
    return kExitNotConverged;
  }
  if (!bundle.rank.converged) {
    std::cerr << "rank did not converge: method "
              << to_string(bundle.rank.basis.method) << ", horizon "
              << bundle.rank.basis.horizon_used << ", sub-tolerance counts";
    for (int c : bundle.rank.basis.subtol_counts) std::cerr << " " << c;
    std::cerr << "\n";
    return kExitNotConverged;
  }

  std::ostringstream summary;
  summary << "rank " << bundle.rank.rank << " (nullity " << bundle.rank.nullity
          << ", method " << to_string(bundle.rank.basis.method) << ")\n";
  if (bundle.coalition) {
    summary << "smallest EGC:";
    for (int m : bundle.coalition->members) summary << " " << (m + 1);
    summary << "\n";
  }
  summary << "bounds: " << bundle.bounds.lower_components_h2 << " <= "
          << bundle.bounds.lower_sroot << " <= rank <= "
          << bundle.bounds.upper_n_minus_h2prime;
  if (bundle.bounds.upper_ergodicity_classes) {
    summary << " (ergodicity classes " << *bundle.bounds.upper_ergodicity_classes
            << ")";
  }
  summary << (bundle.bounds.all_consistent ? ", consistent" : ", INCONSISTENT")
          << "\n";
  std::cout << summary.str();

  emit(args.out, dump_json_17(bundle_to_json(*chain, bundle)));
  return kExitOk;
}

int cmd_steer(const SteerArgs& args) {
  int code = kExitOk;
  auto chain = load_or_complain(args.path, code);
  if (!chain) return code;

  RankReport report;
  Coalition coalition;
  try {
    report = rank(*chain, args.t0);
    coalition = smallest_egc(*chain, args.t0, report);
  } catch (const NotConvergedError& e) {
    std::cerr << e.what() << "\n";
    return kExitNotConverged;
  } catch (const linalg::MarginalSpectrumError& e) {
    std::cerr << "rank did not converge: " << e.what() << "\n";
    return kExitNotConverged;
  }

  std::map<int, double> fixed;
  try {
    for (const auto& entry : split(args.fixed, ',')) {
      auto eq = entry.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("expected i=v");
      int agent = std::stoi(entry.substr(0, eq));
      if (agent < 1 || agent > chain->n_agents)
        throw std::invalid_argument("agent index out of range");
      fixed[agent - 1] = std::stod(entry.substr(eq + 1));
    }
  } catch (const std::exception& e) {
    std::cerr << "bad --fixed: " << e.what() << "\n";
    return kExitBadFixedSet;
  }
  std::set<int> expected(coalition.complement_rows.begin(),
                         coalition.complement_rows.end());
  std::set<int> given;
  for (const auto& [k, _] : fixed) given.insert(k);
  if (given != expected) {
    std::cerr << "fixed opinions must cover exactly the non-coalition agents:";
    for (int i : expected) std::cerr << " " << (i + 1);
    std::cerr << "\n";
    return kExitBadFixedSet;
  }

  SteeringPlan plan = steer(*chain, coalition, args.target, fixed);

  double horizon = args.verify_horizon
                       ? *args.verify_horizon
                       : default_horizon_schedule(*chain, args.t0).back();
  Vector x0(chain->n_agents);
  for (const auto& [agent, value] : plan.fixed_opinions) x0(agent) = value;
  for (const auto& [agent, value] : plan.coalition_opinions) x0(agent) = value;
  auto traj = simulate(*chain, x0, args.t0, {args.t0, horizon});
  double deviation =
      (traj.states.back() - Vector::Constant(chain->n_agents, args.target))
          .cwiseAbs()
          .maxCoeff();

  std::cout << "coalition:";
  for (int m : coalition.members) std::cout << " " << (m + 1);
  std::cout << "; max deviation at t=" << horizon << ": " << deviation << "\n";
  emit(args.out, dump_json_17(steering_plan_to_json(plan, deviation, horizon)));
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& args) {
  int code = kExitOk;
  auto chain = load_or_complain(args.path, code);
  if (!chain) return code;
  std::vector<double> samples;
  Vector x0;
  try {
    samples = parse_sample_list(args.samples);
    auto values = split(args.x0, ',');
    x0.resize(static_cast<int>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) x0(i) = std::stod(values[i]);
  } catch (const std::exception& e) {
    std::cerr << "bad arguments: " << e.what() << "\n";
    return kExitParseError;
  }
  try {
    auto traj = simulate(*chain, x0, args.t0, samples);
    emit(args.out, trajectory_to_csv(traj));
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitParseError;
  }
  return kExitOk;
}

int cmd_graph(const GraphArgs& args) {
  int code = kExitOk;
  auto chain = load_or_complain(args.path, code);
  if (!chain) return code;
  InteractionGraph g = args.kind == "h2" ? infinite_flow_graph(*chain)
                                         : unbounded_interactions_graph(*chain);
  emit(args.out, to_dot(g));
  return kExitOk;
}

int cmd_polytope(const PolytopeArgs& args) {
  int code = kExitOk;
  auto chain = load_or_complain(args.path, code);
  if (!chain) return code;
  try {
    if (args.snapshot_t) {
      PolytopeSnapshot snap =
          polytope_snapshot(*chain, *args.snapshot_t, args.tau, args.tol_vertex);
      emit(args.out, dump_json_17(snapshot_to_json(snap)));
      return kExitOk;
    }
    std::vector<double> horizons =
        args.horizons.empty() ? default_horizon_schedule(*chain, args.tau)
                              : parse_sample_list(args.horizons);
    VertexTrace trace = vertex_count_trace(*chain, args.tau, horizons, args.tol_vertex);
    emit(args.out, trace_to_csv(trace));
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitParseError;
  }
  return kExitOk;
}

int cmd_jets(const JetsArgs& args) {
  int code = kExitOk;
  auto chain = load_or_complain(args.path, code);
  if (!chain) return code;
  try {
    int horizon = args.horizon;
    if (horizon <= 0) {
      horizon = static_cast<int>(
          std::ceil(default_horizon_schedule(*chain, 0.0).back()));
    }
    JetDecomposition dec =
        sonin_decomposition(*chain, horizon, args.tol_cluster, args.mass_floor);
    emit(args.out, dump_json_17(decomposition_to_json(dec)));
    if (!dec.converged) {
      std::cerr << "warning: jet clustering not converged at this horizon\n";
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitParseError;
  }
  return kExitOk;
}

}  // namespace egcnet::cli
