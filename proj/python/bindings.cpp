#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gausskraft/admissibility.hpp"
#include "gausskraft/functional.hpp"
#include "gausskraft/io.hpp"
#include "gausskraft/solver.hpp"
#include "gausskraft/transport.hpp"

namespace py = pybind11;
using namespace gausskraft;

namespace {

py::object to_python(const Json& j) {
  return py::module_::import("json").attr("loads")(dump_json(j, 0));
}

Json from_python(const py::object& o) {
  return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

ProblemInstance make_instance(int dimension, const std::vector<std::vector<double>>& points,
                              std::vector<double> mu) {
  Json j;
  j["dimension"] = dimension;
  j["points"] = points;
  j["mu"] = std::move(mu);
  return instance_from_json(j);
}

DensitySpec density_arg(const py::object& density) {
  if (py::isinstance<py::str>(density)) return load_density(density.cast<std::string>());
  return density_from_json(from_python(density));
}

}  // namespace

PYBIND11_MODULE(_gausskraft, m) {
  m.doc() = "Polytopes with prescribed integral Gauss curvature";

  py::register_exception<Error>(m, "GausskraftError");

  py::class_<ProblemInstance>(m, "Instance")
      .def(py::init(&make_instance), py::arg("dimension"), py::arg("points"), py::arg("mu"))
      .def_property_readonly("dimension", &ProblemInstance::dimension)
      .def_property_readonly("mu", [](const ProblemInstance& inst) { return inst.mu(); })
      .def_property_readonly("points",
                             [](const ProblemInstance& inst) {
                               std::vector<std::vector<double>> out;
                               for (const UnitVec& d : inst.directions()) {
                                 if (inst.dimension() == 1) out.push_back({d.x(), d.y()});
                                 else out.push_back({d.x(), d.y(), d.z()});
                               }
                               return out;
                             })
      .def("__len__", &ProblemInstance::size)
      .def("to_dict", [](const ProblemInstance& inst) { return to_python(instance_to_json(inst)); })
      .def_static("from_dict",
                  [](const py::object& o) { return instance_from_json(from_python(o)); })
      .def_static("load", [](const std::string& path) { return load_instance(path); });

  m.def("check_admissibility",
        [](const ProblemInstance& inst) { return to_python(report_to_json(check_admissibility(inst))); },
        py::arg("instance"));

  m.def("evaluate",
        [](const ProblemInstance& inst, const std::vector<double>& log_radii, double quad_tol) {
          const EvalReport r = eval(inst, log_radii, quad_tol);
          py::dict d;
          d["Q"] = r.Q;
          d["gradient"] = r.gradient;
          d["cell_areas"] = r.cell_areas;
          d["log_dot_integrals"] = r.log_dot_integrals;
          return d;
        },
        py::arg("instance"), py::arg("log_radii"), py::arg("quad_tol") = kDefaultQuadTol);

  m.def("solve",
        [](const ProblemInstance& inst, double tol, int max_iters, bool force,
           std::optional<std::vector<double>> initial) {
          SolveConfig cfg;
          cfg.mass_tol = tol;
          cfg.max_iters = max_iters;
          cfg.skip_validation = force;
          SolveReport r;
          {
            py::gil_scoped_release release;
            r = solve(inst, cfg, std::move(initial));
          }
          double gap = std::nan("");
          try {
            gap = duality_gap(inst, RadialPolytope::build(inst, r.log_radii));
          } catch (const Error&) {
          }
          return to_python(solution_to_json(r, cfg, gap));
        },
        py::arg("instance"), py::arg("tol") = 1e-8, py::arg("max_iters") = 500,
        py::arg("force") = false, py::arg("initial") = py::none());

  m.def("discretize",
        [](const py::object& density, int level) { return discretize(density_arg(density), level); },
        py::arg("density"), py::arg("level"));

  m.def("lp_oracle",
        [](const ProblemInstance& inst, std::size_t samples, std::uint64_t seed) {
          return to_python(plan_to_json(lp_oracle(inst, samples, seed)));
        },
        py::arg("instance"), py::arg("samples") = 320, py::arg("seed") = 0);

  m.def("export_obj",
        [](const ProblemInstance& inst, const std::vector<double>& log_radii) {
          return export_obj(RadialPolytope::build(inst, log_radii));
        },
        py::arg("instance"), py::arg("log_radii"));
}
