#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fedlinucb/analysis.hpp"

namespace py = pybind11;
using namespace fedlinucb;

namespace {

template <class T, class F>
std::vector<T> column(const SimulationTrace& tr, F&& f) {
  std::vector<T> out;
  out.reserve(tr.records.size());
  for (const auto& r : tr.records) out.push_back(f(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_fedlinucb, m) {
  m.doc() = "Asynchronous federated LinUCB simulator";

  py::register_exception<NumericalDomainError>(m, "NumericalDomainError", PyExc_ValueError);

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_readonly("dim", &ProblemInstance::dim)
      .def_readonly("theta_star", &ProblemInstance::theta_star)
      .def_readonly("S", &ProblemInstance::S)
      .def_readonly("L", &ProblemInstance::L)
      .def_readonly("R", &ProblemInstance::R)
      .def("decision_set",
           [](const ProblemInstance& inst, long t) { return sample_decision_set(inst, t).arms; },
           py::arg("round"))
      .def("noise", [](const ProblemInstance& inst, long t) { return sample_noise(inst, t); }, py::arg("round"));

  py::class_<Schedule>(m, "Schedule")
      .def_readonly("num_agents", &Schedule::num_agents)
      .def_readonly("agents", &Schedule::agents)
      .def_property_readonly("horizon", &Schedule::horizon)
      .def("participation_count", &Schedule::participation_count);

  py::class_<HyperParams>(m, "HyperParams")
      .def(py::init([](double lambda, double alpha, double delta, std::optional<double> beta,
                       const std::string& estimate_mode) {
             HyperParams hp;
             hp.lambda = lambda;
             hp.alpha = alpha;
             hp.delta = delta;
             hp.fixed_beta = beta;
             hp.estimate_mode = parse_estimate_mode(estimate_mode);
             hp.validate();
             return hp;
           }),
           py::arg("lam") = 1.0, py::arg("alpha") = 1.0, py::arg("delta") = 0.01, py::arg("beta") = py::none(),
           py::arg("estimate_mode") = "lazy")
      .def_static("defaults_for", &HyperParams::defaults_for, py::arg("num_agents"), py::arg("S"))
      .def_readonly("lam", &HyperParams::lambda)
      .def_readonly("alpha", &HyperParams::alpha)
      .def_readonly("delta", &HyperParams::delta)
      .def_readonly("beta", &HyperParams::fixed_beta);

  py::class_<SimulationTrace>(m, "SimulationTrace")
      .def_property_readonly("horizon", &SimulationTrace::horizon)
      .def_property_readonly("total_regret", &SimulationTrace::total_regret)
      .def_readonly("comm_count", &SimulationTrace::comm_count)
      .def_readonly("switch_count", &SimulationTrace::switch_count)
      .def_readonly("epoch_starts", &SimulationTrace::epoch_starts)
      .def_readonly("beta_used", &SimulationTrace::beta_used)
      .def_readonly("cum_regret", &SimulationTrace::cum_regret)
      .def_property_readonly("agents", [](const SimulationTrace& t) { return column<int>(t, [](auto& r) { return r.agent; }); })
      .def_property_readonly("arm_indices",
                             [](const SimulationTrace& t) { return column<std::size_t>(t, [](auto& r) { return r.arm_index; }); })
      .def_property_readonly("rewards", [](const SimulationTrace& t) { return column<double>(t, [](auto& r) { return r.reward; }); })
      .def_property_readonly("inst_regret",
                             [](const SimulationTrace& t) { return column<double>(t, [](auto& r) { return r.inst_regret; }); })
      .def_property_readonly("comm", [](const SimulationTrace& t) { return column<int>(t, [](auto& r) { return r.comm; }); })
      .def_property_readonly("det_server",
                             [](const SimulationTrace& t) { return column<double>(t, [](auto& r) { return r.det_server; }); });

  py::class_<BiasDemoResult>(m, "BiasDemoResult")
      .def_readonly("predicted_reward_a", &BiasDemoResult::predicted_reward_a)
      .def_readonly("agents", &BiasDemoResult::agents)
      .def_readonly("uploads", &BiasDemoResult::uploads)
      .def_readonly("upload_fraction", &BiasDemoResult::upload_fraction);

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("name", &CheckResult::name)
      .def_readonly("passed", &CheckResult::passed)
      .def_readonly("worst_slack", &CheckResult::worst_slack)
      .def_readonly("detail", &CheckResult::detail);

  m.def(
      "gen_instance",
      [](const std::string& kind, int dim, int arms_per_round, double S, double L, double R, std::uint64_t seed,
         const std::string& noise) {
        InstanceRequest req;
        req.kind = parse_arm_kind(kind);
        req.dim = dim;
        req.arms_per_round = arms_per_round;
        req.S = S;
        req.L = L;
        req.R = R;
        req.seed = seed;
        req.noise = parse_noise_kind(noise);
        return gen_instance(req);
      },
      py::arg("kind") = "random-sphere", py::arg("dim") = 4, py::arg("arms_per_round") = 10, py::arg("S") = 1.0,
      py::arg("L") = 1.0, py::arg("R") = 1.0, py::arg("seed") = 0, py::arg("noise") = "gaussian");

  m.def(
      "gen_schedule",
      [](const std::string& kind, int num_agents, long horizon, std::uint64_t seed, std::vector<int> agents) {
        return gen_schedule(parse_schedule_kind(kind), num_agents, horizon, seed, std::move(agents));
      },
      py::arg("kind") = "round-robin", py::arg("num_agents") = 4, py::arg("horizon") = 1000, py::arg("seed") = 0,
      py::arg("agents") = std::vector<int>{});

  m.def(
      "run_fedlinucb",
      [](const ProblemInstance& inst, const Schedule& s, const HyperParams& hp) {
        py::gil_scoped_release release;
        return run_fedlinucb(inst, s, hp);
      },
      py::arg("instance"), py::arg("schedule"), py::arg("params"));
  m.def(
      "run_episodic",
      [](const ProblemInstance& inst, const std::vector<std::vector<int>>& sets, int num_agents, const HyperParams& hp) {
        py::gil_scoped_release release;
        return run_episodic(inst, sets, num_agents, hp);
      },
      py::arg("instance"), py::arg("participation_sets"), py::arg("num_agents"), py::arg("params"));
  m.def(
      "run_independent_oful",
      [](const ProblemInstance& inst, const Schedule& s, const HyperParams& hp) {
        py::gil_scoped_release release;
        return run_independent_oful(inst, s, hp);
      },
      py::arg("instance"), py::arg("schedule"), py::arg("params"));

  m.def("compute_beta", &compute_beta, py::arg("instance"), py::arg("params"), py::arg("num_agents"),
        py::arg("horizon"));
  m.def("theoretical_regret_bound", &theoretical_regret_bound, py::arg("instance"), py::arg("params"),
        py::arg("num_agents"), py::arg("horizon"), py::arg("beta"));
  m.def("theoretical_comm_bound", &theoretical_comm_bound, py::arg("dim"), py::arg("num_agents"), py::arg("alpha"),
        py::arg("lam"), py::arg("L"), py::arg("horizon"));
  m.def("epoch_comm_counts", &epoch_comm_counts, py::arg("trace"));
  m.def(
      "elliptical_potential_sum", [](const SimulationTrace& t, double L) { return elliptical_potential(t, L).empirical; },
      py::arg("trace"), py::arg("L"));
  m.def(
      "bias_demo",
      [](long agents, double beta, double alpha, std::uint64_t seed, const std::string& mode) {
        return bias_demo(agents, beta, alpha, seed, parse_estimate_mode(mode));
      },
      py::arg("num_agents") = 10000, py::arg("beta") = 0.5, py::arg("alpha") = 10.5, py::arg("seed") = 7,
      py::arg("mode") = "eager");
  m.def(
      "run_invariant_suite",
      [](const ProblemInstance& inst, const Schedule& s, const HyperParams& hp) {
        RunOptions opts;
        opts.record_payloads = true;
        return run_invariant_suite(run_fedlinucb(inst, s, hp, opts), inst);
      },
      py::arg("instance"), py::arg("schedule"), py::arg("params"));
}
