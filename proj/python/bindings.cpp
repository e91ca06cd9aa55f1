#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pitnet/bench.hpp"
#include "pitnet/ite.hpp"
#include "pitnet/mining.hpp"

namespace py = pybind11;
using namespace pitnet;

namespace {

py::array_t<double> as_array(const Tensor& t) {
  std::vector<py::ssize_t> shape(t.dims().begin(), t.dims().end());
  py::array_t<double> out(shape);
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_pitnet, m) {
  m.doc() = "tensor-network solver for locally constrained binary optimization";

  py::register_exception<ZeroNormError>(m, "ZeroNormError", PyExc_RuntimeError);
  py::register_exception<MemoryLimitError>(m, "MemoryLimitError", PyExc_MemoryError);

  py::class_<MineInstance>(m, "MineInstance")
      .def(py::init<>())
      .def_readwrite("width", &MineInstance::width)
      .def_readwrite("depth", &MineInstance::depth)
      .def_readwrite("weights", &MineInstance::weights)
      .def("to_json", &instance_to_json)
      .def_static("from_json", &instance_from_json)
      .def("__repr__", [](const MineInstance& i) {
        return "MineInstance(width=" + std::to_string(i.width) +
               ", depth=" + std::to_string(i.depth) + ")";
      });

  py::class_<Solution>(m, "Solution")
      .def(py::init<>())
      .def_readwrite("assignment", &Solution::assignment)
      .def_readwrite("profit", &Solution::profit)
      .def_readwrite("violations", &Solution::violations)
      .def("to_json", &solution_to_json)
      .def_static("from_json", &solution_from_json)
      .def("__repr__", [](const Solution& s) {
        return "Solution(profit=" + std::to_string(s.profit) +
               ", violations=" + std::to_string(s.violations) + ")";
      });

  py::enum_<EngineKind>(m, "EngineKind")
      .value("exact", EngineKind::Exact)
      .value("bmps", EngineKind::Bmps);

  py::class_<Engine>(m, "Engine")
      .def(py::init<>())
      .def_readwrite("kind", &Engine::kind)
      .def_readwrite("chi", &Engine::chi);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("tau", &SolverConfig::tau)
      .def_readwrite("engine", &SolverConfig::engine)
      .def_readwrite("a", &SolverConfig::a)
      .def_readwrite("b", &SolverConfig::b)
      .def("validate", &SolverConfig::validate)
      .def_static("default_b", &SolverConfig::default_b);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("solution", &SolveResult::solution)
      .def_readonly("expectations", &SolveResult::expectations)
      .def_readonly("degenerate_sites", &SolveResult::degenerate_sites)
      .def_readonly("energy", &SolveResult::energy)
      .def_readonly("wall_seconds", &SolveResult::wall_seconds)
      .def_property_readonly("max_bond", [](const SolveResult& r) {
        return static_cast<long long>(r.stats.max_bond);
      });

  m.def("generate_instance", &generate_instance, py::arg("width"),
        py::arg("depth"), py::arg("seed"));
  m.def("evaluate_solution", &evaluate_solution, py::arg("instance"),
        py::arg("assignment"));
  m.def("brute_force_oracle", &brute_force_oracle, py::arg("instance"));
  m.def(
      "solve",
      [](const MineInstance& inst, const SolverConfig& cfg) {
        return solve(inst, cfg);
      },
      py::arg("instance"), py::arg("config"),
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "measure_site",
      [](const MineInstance& inst, double tau, int var, const Engine& engine,
         double a) {
        const TensorNetwork net = build_mining_network(inst);
        const TensorNetwork evolved =
            apply_ite(net, build_hamiltonian(inst), tau);
        return measure_site(evolved, mining_layout(inst), var, engine, a);
      },
      py::arg("instance"), py::arg("tau"), py::arg("var"), py::arg("engine"),
      py::arg("a") = 1.0, py::call_guard<py::gil_scoped_release>());

  m.def(
      "delta_tensor",
      [](int order, Index dim) { return as_array(delta_tensor(order, dim)); },
      py::arg("order"), py::arg("dim"));
  m.def(
      "indicator_tensor",
      [](int arity, const std::vector<Bits>& allowed) {
        return as_array(indicator_tensor(arity, allowed));
      },
      py::arg("arity"), py::arg("allowed"));
}
