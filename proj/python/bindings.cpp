#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hrn/data_io.hpp"
#include "hrn/degree_stats.hpp"
#include "hrn/estimation.hpp"
#include "hrn/generator.hpp"
#include "hrn/kernels.hpp"
#include "hrn/likelihood.hpp"

namespace py = pybind11;
using namespace hrn;

namespace {

std::vector<std::tuple<NodeId, NodeId, std::int64_t, int>> records(const EdgeLog& log) {
  std::vector<std::tuple<NodeId, NodeId, std::int64_t, int>> out;
  out.reserve(log.size());
  for (const auto& r : log.records) {
    out.emplace_back(r.source, r.target, r.time, r.scenario ? to_int(*r.scenario) : 0);
  }
  return out;
}

EdgeLog make_log(const std::vector<std::tuple<NodeId, NodeId, std::int64_t, int>>& rows,
                 const std::string& origin) {
  EdgeLog log;
  if (origin == "seed") log.origin = LogOrigin::Seed;
  else if (origin == "first-record") log.origin = LogOrigin::FirstRecord;
  else throw std::invalid_argument("origin must be 'seed' or 'first-record'");
  for (const auto& [s, t, time, label] : rows) {
    EdgeRecord r{s, t, time, std::nullopt};
    if (label != 0) r.scenario = scenario_from_int(label);
    log.records.push_back(r);
  }
  return log;
}

Direction direction(const std::string& d) {
  if (d == "in") return Direction::In;
  if (d == "out") return Direction::Out;
  throw std::invalid_argument("direction must be 'in' or 'out'");
}

}  // namespace

PYBIND11_MODULE(_hrn, m) {
  m.doc() = "Hybrid preferential/uniform attachment networks: simulation and inference";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::enum_<Scenario>(m, "Scenario")
      .value("NEW_SOURCE", Scenario::NewSource)
      .value("EXISTING", Scenario::Existing)
      .value("NEW_TARGET", Scenario::NewTarget)
      .value("NEW_SELF_LOOP", Scenario::NewSelfLoop)
      .value("NEW_PAIR", Scenario::NewPair);

  py::class_<HybridParams>(m, "HybridParams")
      .def(py::init([](double alpha, double beta, double p, double delta_in, double delta_out,
                       double xi, double eta) {
             return make_params(alpha, beta, p, delta_in, delta_out, xi, eta);
           }),
           py::arg("alpha"), py::arg("beta"), py::arg("p"), py::arg("delta_in"),
           py::arg("delta_out"), py::arg("xi") = 0.0, py::arg("eta") = 0.0)
      .def_readonly("alpha", &HybridParams::alpha)
      .def_readonly("beta", &HybridParams::beta)
      .def_readonly("gamma", &HybridParams::gamma)
      .def_readonly("p", &HybridParams::p)
      .def_readonly("delta_in", &HybridParams::delta_in)
      .def_readonly("delta_out", &HybridParams::delta_out)
      .def_readonly("xi", &HybridParams::xi)
      .def_readonly("eta", &HybridParams::eta)
      .def("to_dict",
           [](const HybridParams& t) {
             return py::dict(py::arg("alpha") = t.alpha, py::arg("beta") = t.beta,
                             py::arg("gamma") = t.gamma, py::arg("xi") = t.xi, py::arg("eta") = t.eta,
                             py::arg("p") = t.p, py::arg("delta_in") = t.delta_in,
                             py::arg("delta_out") = t.delta_out);
           })
      .def(py::self == py::self)
      .def("__repr__", [](const HybridParams& t) { return "HybridParams(" + to_string(t) + ")"; });

  py::class_<DerivedConstants>(m, "DerivedConstants")
      .def_readonly("c1", &DerivedConstants::c1)
      .def_readonly("c2", &DerivedConstants::c2)
      .def_readonly("delta_in_tilde", &DerivedConstants::delta_in_tilde)
      .def_readonly("delta_out_tilde", &DerivedConstants::delta_out_tilde)
      .def_readonly("rate_in", &DerivedConstants::rate_in)
      .def_readonly("rate_out", &DerivedConstants::rate_out);
  m.def("derived_constants", &derived_constants);

  py::class_<NetworkState>(m, "NetworkState")
      .def(py::init<>())
      .def_property_readonly("node_count", &NetworkState::node_count)
      .def_property_readonly("step", &NetworkState::step)
      .def_property_readonly("total_edges", &NetworkState::total_edges)
      .def_property_readonly("in_degrees",
                             [](const NetworkState& s) {
                               return std::vector<std::uint64_t>(s.in_degrees().begin(),
                                                                 s.in_degrees().end());
                             })
      .def_property_readonly("out_degrees", [](const NetworkState& s) {
        return std::vector<std::uint64_t>(s.out_degrees().begin(), s.out_degrees().end());
      });

  m.def("attach_prob_in", &attach_prob_in, py::arg("state"), py::arg("node"), py::arg("params"));
  m.def("attach_prob_out", &attach_prob_out, py::arg("state"), py::arg("node"), py::arg("params"));
  m.def(
      "step_distribution",
      [](const NetworkState& s, const HybridParams& th) {
        std::vector<std::tuple<int, NodeId, NodeId, double>> out;
        for (const auto& o : step_distribution(s, th)) {
          out.emplace_back(to_int(o.scenario), o.source, o.target, o.probability);
        }
        return out;
      },
      "List of (scenario, source, target, probability) for the next step.");
  m.def(
      "classify_scenario",
      [](const std::vector<NodeId>& previous, NodeId source, NodeId target) {
        const std::unordered_set<NodeId> set(previous.begin(), previous.end());
        return to_int(classify_scenario(set, EdgeRecord{source, target}));
      },
      py::arg("previous_nodes"), py::arg("source"), py::arg("target"));

  py::class_<SimulationResult>(m, "SimulationResult")
      .def_readonly("state", &SimulationResult::state)
      .def_readonly("seed", &SimulationResult::seed)
      .def_property_readonly("records", [](const SimulationResult& r) { return records(r.log); });

  m.def(
      "simulate",
      [](const HybridParams& th, std::uint64_t n_edges, std::uint64_t seed) {
        SimulationConfig cfg;
        cfg.params = th;
        cfg.n_edges = n_edges;
        cfg.seed = seed;
        py::gil_scoped_release release;
        return simulate(cfg);
      },
      py::arg("params"), py::arg("n_edges"), py::arg("seed") = 0);
  m.def(
      "simulate_replicates",
      [](const HybridParams& th, std::uint64_t n_edges, std::size_t replicates, std::uint64_t seed,
         std::size_t workers) {
        SimulationConfig cfg;
        cfg.params = th;
        cfg.n_edges = n_edges;
        cfg.seed = seed;
        py::gil_scoped_release release;
        return simulate_replicates(cfg, replicates, workers);
      },
      py::arg("params"), py::arg("n_edges"), py::arg("replicates"), py::arg("seed") = 0,
      py::arg("workers") = 1);
  m.def("replicate_seed", &replicate_seed);

  py::class_<DegreeCounts>(m, "DegreeCounts")
      .def_readonly("in_counts", &DegreeCounts::in_counts)
      .def_readonly("out_counts", &DegreeCounts::out_counts)
      .def_readonly("n_nodes", &DegreeCounts::n_nodes)
      .def_readonly("n_edges", &DegreeCounts::n_edges);
  m.def("degree_counts", &degree_counts);
  m.def(
      "ccdf",
      [](const DegreeCounts& c, const std::string& d) {
        std::vector<std::pair<std::uint64_t, double>> out;
        for (const auto& pt : ccdf(c, direction(d))) out.emplace_back(pt.m, pt.value);
        return out;
      },
      py::arg("counts"), py::arg("direction") = "in");
  m.def("nb_pmf", &nb_pmf, py::arg("r"), py::arg("q"), py::arg("m"));

  py::class_<LimitPmf>(m, "LimitPmf")
      .def_readonly("psi_in", &LimitPmf::psi_in)
      .def_readonly("psi_out", &LimitPmf::psi_out)
      .def_readonly("truncation_m", &LimitPmf::truncation_m)
      .def_readonly("mass_certified", &LimitPmf::mass_certified);
  m.def(
      "limit_pmf",
      [](const HybridParams& th, std::size_t m_max, bool adaptive) {
        return limit_pmf(th, {.m_max = m_max, .adaptive = adaptive});
      },
      py::arg("params"), py::arg("m_max") = 200, py::arg("adaptive") = true);
  m.def("limit_pmf_quadrature", &limit_pmf_quadrature, py::arg("params"), py::arg("m_max"));

  py::class_<SufficientStats>(m, "SufficientStats")
      .def_property_readonly("scenario_counts",
                             [](const SufficientStats& s) {
                               return std::vector<std::uint64_t>(s.counts.n.begin(), s.counts.n.end());
                             })
      .def_property_readonly("n_steps", [](const SufficientStats& s) { return s.steps.size(); });
  m.def(
      "replay",
      [](const std::vector<std::tuple<NodeId, NodeId, std::int64_t, int>>& rows,
         const std::string& origin) { return replay(make_log(rows, origin)); },
      py::arg("records"), py::arg("origin") = "seed",
      "Sufficient statistics of (source, target, time, scenario-or-0) records.");
  m.def("log_likelihood", &log_likelihood, py::arg("stats"), py::arg("params"));
  m.def(
      "score",
      [](const SufficientStats& s, const HybridParams& th) {
        const auto sc = score(s, th);
        return py::dict(py::arg("delta_in") = sc.delta_in, py::arg("delta_out") = sc.delta_out,
                        py::arg("p") = sc.p);
      },
      py::arg("stats"), py::arg("params"));
  m.def(
      "mle_scenarios",
      [](const SufficientStats& s) {
        const auto e = mle_scenarios(s);
        return py::dict(py::arg("alpha") = e.alpha, py::arg("beta") = e.beta,
                        py::arg("gamma") = e.gamma, py::arg("xi") = e.xi, py::arg("eta") = e.eta,
                        py::arg("regular") = e.regular);
      });

  py::class_<EstimationResult>(m, "EstimationResult")
      .def_readonly("point", &EstimationResult::point)
      .def_readonly("log_likelihood", &EstimationResult::log_likelihood)
      .def_readonly("converged", &EstimationResult::converged)
      .def_readonly("message", &EstimationResult::message)
      .def_readonly("iterations", &EstimationResult::iterations)
      .def_readonly("acceptance_rate", &EstimationResult::acceptance_rate)
      .def_property_readonly("trace", [](const EstimationResult& r) {
        std::vector<std::tuple<std::uint64_t, HybridParams, double>> out;
        for (const auto& row : r.trace) out.emplace_back(row.iteration, row.theta, row.log_posterior);
        return out;
      });

  m.def(
      "fit_nelder_mead",
      [](const SufficientStats& s, std::size_t max_iters, bool profile) {
        NelderMeadConfig cfg;
        cfg.max_iters = max_iters;
        cfg.profile_scenarios = profile;
        py::gil_scoped_release release;
        return fit_nelder_mead(s, cfg);
      },
      py::arg("stats"), py::arg("max_iters") = 10'000, py::arg("profile_scenarios") = true);

  auto mh_config = [](std::uint64_t burn_in, std::uint64_t iterations, std::uint64_t thinning,
                      std::uint64_t seed) {
    MhConfig cfg;
    cfg.burn_in = burn_in;
    cfg.iterations = iterations;
    cfg.thinning = thinning;
    cfg.seed = seed;
    return cfg;
  };
  m.def(
      "fit_mh",
      [mh_config](const SufficientStats& s, std::uint64_t burn_in, std::uint64_t iterations,
                  std::uint64_t thinning, std::uint64_t seed) {
        const auto cfg = mh_config(burn_in, iterations, thinning, seed);
        py::gil_scoped_release release;
        return fit_mh(s, cfg);
      },
      py::arg("stats"), py::arg("burn_in") = 10'000, py::arg("iterations") = 20'000,
      py::arg("thinning") = 500, py::arg("seed") = 1);
  m.def(
      "fit_integrated",
      [mh_config](const SufficientStats& s, std::uint64_t burn_in, std::uint64_t iterations,
                  std::uint64_t thinning, std::uint64_t seed) {
        const auto cfg = mh_config(burn_in, iterations, thinning, seed);
        py::gil_scoped_release release;
        return fit_integrated(s, cfg, NelderMeadConfig{});
      },
      py::arg("stats"), py::arg("burn_in") = 10'000, py::arg("iterations") = 20'000,
      py::arg("thinning") = 500, py::arg("seed") = 1);

  m.def(
      "parse_edge_file",
      [](const std::filesystem::path& path) {
        const auto log = parse_edge_file(path);
        return py::make_tuple(records(log), std::string(to_string(log.origin)));
      },
      py::arg("path"), "Returns (records, origin).");
  m.def(
      "window",
      [](const std::vector<std::tuple<NodeId, NodeId, std::int64_t, int>>& rows, std::int64_t t0,
         std::int64_t t1) {
        const auto w = window(make_log(rows, "first-record"), t0, t1);
        return py::make_tuple(records(w.log), w.original_ids);
      },
      py::arg("records"), py::arg("t_start"), py::arg("t_end"),
      "Returns (relabeled records, original ids).");
}
