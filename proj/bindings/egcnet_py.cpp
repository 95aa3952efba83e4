#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "egcnet/analysis.hpp"
#include "egcnet/version.hpp"

#include <optional>

namespace py = pybind11;
using namespace egcnet;

namespace {

py::object json_to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::object: {
      py::dict d;
      for (auto it = j.begin(); it != j.end(); ++it) {
        d[py::str(it.key())] = json_to_py(it.value());
      }
      return d;
    }
    case Json::value_t::array: {
      py::list l;
      for (const auto& v : j) l.append(json_to_py(v));
      return l;
    }
    case Json::value_t::string:
      return py::str(j.get<std::string>());
    case Json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case Json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case Json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case Json::value_t::number_float:
      return py::float_(j.get<double>());
    default:
      return py::none();
  }
}

Chain chain_from_text(const std::string& text) {
  return chain_from_json(Json::parse(text));
}

std::map<int, double> fixed_from_dict(const py::dict& fixed) {
  std::map<int, double> out;
  for (const auto& item : fixed) {
    int agent = py::cast<int>(item.first);
    out[agent - 1] = py::cast<double>(item.second);  // 1-based in, 0-based core
  }
  return out;
}

py::dict steer_with_verification(const Chain& chain, double tau, double target,
                                 const py::dict& fixed,
                                 std::optional<double> verify_horizon) {
  RankReport report = rank(chain, tau);
  Coalition coalition = smallest_egc(chain, tau, report);
  SteeringPlan plan = steer(chain, coalition, target, fixed_from_dict(fixed));
  double horizon = verify_horizon ? *verify_horizon
                                  : default_horizon_schedule(chain, tau).back();
  Vector x0(chain.n_agents);
  for (const auto& [agent, value] : plan.fixed_opinions) x0(agent) = value;
  for (const auto& [agent, value] : plan.coalition_opinions) x0(agent) = value;
  auto traj = simulate(chain, x0, tau, {tau, horizon});
  double deviation =
      (traj.states.back() - Vector::Constant(chain.n_agents, target))
          .cwiseAbs()
          .maxCoeff();
  return py::cast<py::dict>(
      json_to_py(steering_plan_to_json(plan, deviation, horizon)));
}

}  // namespace

PYBIND11_MODULE(_egcnet, m) {
  m.doc() = "Time-varying opinion-network analysis: chain rank, smallest "
            "steering coalitions, bounds, polytope geometry and jet "
            "decompositions.";
  m.attr("__version__") = kVersion;

  py::register_exception<ParseError>(m, "ChainParseError", PyExc_ValueError);
  py::register_exception<linalg::MarginalSpectrumError>(m, "MarginalSpectrumError",
                                                        PyExc_ArithmeticError);
  py::register_exception<NotConvergedError>(m, "NotConvergedError",
                                            PyExc_RuntimeError);
  py::register_exception<IllConditionedError>(m, "IllConditionedError",
                                              PyExc_ArithmeticError);

  py::class_<Chain>(m, "Chain")
      .def_static("from_json", &chain_from_text, py::arg("text"),
                  "Parse a chain from its JSON text representation.")
      .def_static("load", &load_chain_file, py::arg("path"))
      .def("to_json", [](const Chain& c) { return dump_json_17(chain_to_json(c)); })
      .def_property_readonly("n", [](const Chain& c) { return c.n_agents; })
      .def_property_readonly("mode", [](const Chain& c) { return to_string(c.mode); })
      .def_property_readonly("prefix_end", &Chain::prefix_end)
      .def_property_readonly("period", &Chain::tail_period)
      .def("validate",
           [](const Chain& c) {
             py::list out;
             for (const auto& v : validate(c).violations) out.append(v.message);
             return out;
           })
      .def("evaluate_at", [](const Chain& c, double t) { return evaluate_at(c, t); },
           py::arg("t"))
      .def("scale", [](const Chain& c, double a) { return scale(c, a); },
           py::arg("alpha"))
      .def("__add__", [](const Chain& a, const Chain& b) { return add(a, b); })
      .def("perturb_summable",
           [](const Chain& c, std::uint64_t seed, double magnitude) {
             return perturb_summable(c, seed, magnitude);
           },
           py::arg("seed"), py::arg("magnitude"));

  m.def("phi",
        [](const Chain& c, double t, double tau) { return phi(c, t, tau).matrix; },
        py::arg("chain"), py::arg("t"), py::arg("tau"),
        "State transition matrix Phi(t, tau).");

  m.def("simulate",
        [](const Chain& c, const Vector& x0, double t0, std::vector<double> samples) {
          auto traj = simulate(c, x0, t0, samples);
          Matrix states(traj.states.size(), c.n_agents);
          for (std::size_t i = 0; i < traj.states.size(); ++i) {
            states.row(i) = traj.states[i].transpose();
          }
          return py::make_tuple(traj.times, states);
        },
        py::arg("chain"), py::arg("x0"), py::arg("t0"), py::arg("samples"),
        "Returns (times, states) with one state row per sample.");

  m.def("limit_phi",
        [](const Chain& c, double tau, std::vector<double> horizons) {
          if (horizons.empty()) horizons = default_horizon_schedule(c, tau);
          auto res = limit_phi(c, tau, horizons);
          py::dict d;
          d["matrix"] = res.phi.matrix;
          d["horizons"] = res.horizons;
          d["deltas"] = res.deltas;
          return d;
        },
        py::arg("chain"), py::arg("tau") = 0.0,
        py::arg("horizons") = std::vector<double>{});

  m.def("rank",
        [](const Chain& c, double tau, double tol) {
          return json_to_py(rank_report_to_json(rank(c, tau, tol)));
        },
        py::arg("chain"), py::arg("tau") = 0.0, py::arg("tol") = kRankTol);

  m.def("consensus_set_dimension", &consensus_set_dimension, py::arg("chain"),
        py::arg("tau") = 0.0);

  m.def("smallest_egc",
        [](const Chain& c, double tau) {
          return json_to_py(coalition_to_json(smallest_egc(c, tau)));
        },
        py::arg("chain"), py::arg("tau") = 0.0,
        "Smallest coalition able to steer the network (1-based members).");

  m.def("steer", &steer_with_verification, py::arg("chain"), py::arg("tau"),
        py::arg("target"), py::arg("fixed"),
        py::arg("verify_horizon") = std::nullopt,
        "Coalition opinions for a target consensus, with simulated deviation. "
        "`fixed` maps 1-based non-coalition agents to their opinions.");

  m.def("verify_egc",
        [](const Chain& c, std::vector<int> candidate, double tau, int trials,
           double target, double horizon, double tol, std::uint64_t seed) {
          for (int& i : candidate) i -= 1;
          return verify_egc(c, candidate, tau, trials, target, horizon, tol, seed);
        },
        py::arg("chain"), py::arg("candidate"), py::arg("tau") = 0.0,
        py::arg("trials") = 16, py::arg("target") = 1.0, py::arg("horizon") = 0.0,
        py::arg("tol") = 1e-6, py::arg("seed") = 2024,
        "Monte-Carlo falsification; candidate agents are 1-based.");

  m.def("bounds_report",
        [](const Chain& c, double tau) {
          return json_to_py(bounds_to_json(bounds_report(c, tau)));
        },
        py::arg("chain"), py::arg("tau") = 0.0);

  m.def("interaction_graph",
        [](const Chain& c, const std::string& kind) {
          InteractionGraph g = kind == "h2" ? infinite_flow_graph(c)
                                            : unbounded_interactions_graph(c);
          py::list edges;
          for (const auto& [i, j] : g.edges) {
            edges.append(py::make_tuple(i + 1, j + 1));
          }
          py::dict d;
          d["kind"] = kind;
          d["edges"] = edges;
          d["dot"] = to_dot(g);
          return d;
        },
        py::arg("chain"), py::arg("kind") = "h1");

  m.def("smallest_sroot",
        [](const Chain& c) {
          SRoot s = smallest_sroot(unbounded_interactions_graph(c));
          for (int& w : s.witness) w += 1;
          return py::make_tuple(s.size, s.witness);
        },
        py::arg("chain"));

  m.def("full_rank_test", &full_rank_test, py::arg("chain"));

  m.def("vertex_count_trace",
        [](const Chain& c, double tau, std::vector<double> horizons, double tol) {
          if (horizons.empty()) horizons = default_horizon_schedule(c, tau);
          return json_to_py(trace_to_json(vertex_count_trace(c, tau, horizons, tol)));
        },
        py::arg("chain"), py::arg("tau") = 0.0,
        py::arg("horizons") = std::vector<double>{},
        py::arg("tol_vertex") = kVertexTol);

  m.def("polytope_snapshot",
        [](const Chain& c, double t, double tau, double tol) {
          return json_to_py(snapshot_to_json(polytope_snapshot(c, t, tau, tol)));
        },
        py::arg("chain"), py::arg("t"), py::arg("tau") = 0.0,
        py::arg("tol_vertex") = kVertexTol);

  m.def("ergodicity_classes",
        [](const Chain& c, double tau, std::vector<double> horizons, double tol) {
          if (horizons.empty()) horizons = default_horizon_schedule(c, tau);
          return json_to_py(
              ergodicity_to_json(ergodicity_classes(c, tau, horizons, tol)));
        },
        py::arg("chain"), py::arg("tau") = 0.0,
        py::arg("horizons") = std::vector<double>{},
        py::arg("tol_cluster") = kClusterTol);

  m.def("class_pstar_check",
        [](const Chain& c, std::vector<double> tau_grid, double horizon,
           double threshold) {
          PStarResult r = class_pstar_check(c, tau_grid, horizon, threshold);
          py::dict d;
          d["in_class"] = r.in_class ? py::cast(*r.in_class) : py::none();
          d["min_column_sum"] = r.min_column_sum;
          return d;
        },
        py::arg("chain"), py::arg("tau_grid") = std::vector<double>{0.0},
        py::arg("horizon") = 64.0, py::arg("threshold") = 1e-3);

  m.def("absolute_probability_sequence",
        [](const Chain& c, int horizon) {
          auto aps = absolute_probability_sequence(c, horizon);
          Matrix pis(aps.pis.size(), c.n_agents);
          for (std::size_t t = 0; t < aps.pis.size(); ++t) {
            pis.row(t) = aps.pis[t].transpose();
          }
          return pis;
        },
        py::arg("chain"), py::arg("horizon"),
        "Row t is pi(t); the terminal row is uniform.");

  m.def("reversed_chain",
        [](const Chain& c, int horizon) {
          auto aps = absolute_probability_sequence(c, horizon);
          return reversed_chain(aps, c);
        },
        py::arg("chain"), py::arg("horizon"));

  m.def("sonin_decomposition",
        [](const Chain& c, int horizon, double tol_cluster, double mass_floor) {
          return json_to_py(decomposition_to_json(
              sonin_decomposition(c, horizon, tol_cluster, mass_floor)));
        },
        py::arg("chain"), py::arg("horizon"), py::arg("tol_cluster") = kClusterTol,
        py::arg("mass_floor") = kMassFloor);

  m.def("analyze",
        [](const Chain& c, double tau, double tol, bool polytope, bool jets) {
          AnalysisOptions options;
          options.tau = tau;
          options.tol = tol;
          options.with_polytope = polytope;
          options.with_jets = jets;
          return json_to_py(bundle_to_json(c, analyze(c, options)));
        },
        py::arg("chain"), py::arg("tau") = 0.0, py::arg("tol") = kRankTol,
        py::arg("polytope") = false, py::arg("jets") = false,
        "Full analysis bundle as a dict, mirroring the CLI JSON output.");
}
