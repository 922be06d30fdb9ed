#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wkam/lab.hpp"

namespace py = pybind11;
using namespace wkam;

PYBIND11_MODULE(_wkam, mod) {
    mod.doc() = "weak-KAM workbench: discounted Hamilton-Jacobi equations on the torus";

    py::class_<Grid>(mod, "Grid")
        .def_readonly("period", &Grid::period)
        .def_readonly("points", &Grid::points)
        .def_readonly("spacing", &Grid::spacing)
        .def("node", &Grid::node)
        .def("wrap_x", &Grid::wrap_x);
    mod.def("make_grid", &make_grid, py::arg("period"), py::arg("points"));

    py::class_<GridFunction>(mod, "GridFunction")
        .def(py::init([](const Grid& g, std::vector<double> values) {
                 if (static_cast<int>(values.size()) != g.points)
                     throw std::invalid_argument("GridFunction: values size != grid points");
                 return GridFunction{g, std::move(values)};
             }),
             py::arg("grid"), py::arg("values"))
        .def_readonly("grid", &GridFunction::grid)
        .def_readonly("values", &GridFunction::values);
    mod.def("make_constant", &make_constant);
    mod.def("sample", &sample);
    mod.def("interp", &interp);
    mod.def("sup_dist", &sup_dist);
    mod.def("min_value", &min_value);
    mod.def("max_value", &max_value);
    mod.def("lipschitz_estimate", &lipschitz_estimate);

    py::class_<VelocityGrid>(mod, "VelocityGrid")
        .def_readonly("vmax", &VelocityGrid::vmax)
        .def_readonly("count", &VelocityGrid::count)
        .def_readonly("v", &VelocityGrid::v);
    mod.def("make_velocity_grid", &make_velocity_grid);

    py::class_<Model>(mod, "Model")
        .def_readonly("period", &Model::period)
        .def_readonly("label", &Model::label)
        .def_readonly("affine_in_u", &Model::affine_in_u)
        .def("hamiltonian", [](const Model& m, double x, double p, double u) {
            return m.hamiltonian(x, p, u);
        })
        .def("lagrangian", [](const Model& m, double x, double v, double u) {
            return m.lagrangian(x, v, u);
        });
    mod.def("pendulum", &pendulum);
    mod.def("discounted_linear", &discounted_linear);
    mod.def("alpha_coupled", &alpha_coupled, py::arg("n"), py::arg("alpha_shift") = 0.0);
    mod.def("shifted", &shifted);
    mod.def("alpha_bump", &alpha_bump);
    mod.def("fenchel_lagrangian", &fenchel_lagrangian, py::arg("model"), py::arg("x"),
            py::arg("v"), py::arg("u"), py::arg("pmax") = 8.0, py::arg("pcount") = 2001);
    mod.def("partial_L_u0", &partial_L_u0);

    py::class_<SchemeParams>(mod, "SchemeParams")
        .def_readwrite("tau", &SchemeParams::tau)
        .def_readwrite("vgrid", &SchemeParams::vgrid)
        .def_readwrite("tol", &SchemeParams::tol)
        .def_readwrite("max_iter", &SchemeParams::max_iter)
        .def_readwrite("damping", &SchemeParams::damping);
    mod.def("reference_scheme", &reference_scheme);
    mod.def("reference_grid", &reference_grid);

    py::class_<DiscountedSolution>(mod, "DiscountedSolution")
        .def_readonly("lambda_", &DiscountedSolution::lambda)
        .def_readonly("c", &DiscountedSolution::c)
        .def_readonly("u", &DiscountedSolution::u)
        .def_readonly("iterations", &DiscountedSolution::iterations)
        .def_readonly("residual", &DiscountedSolution::residual)
        .def_readonly("converged", &DiscountedSolution::converged);
    mod.def("solve_discounted", &solve_discounted, py::arg("model"), py::arg("lambda_"),
            py::arg("c"), py::arg("scheme"), py::arg("init"),
            py::arg("anchor") = std::optional<int>{});
    mod.def("lax_oleinik_step", &lax_oleinik_step);

    py::class_<OccupationMeasure>(mod, "OccupationMeasure")
        .def_readonly("weights", &OccupationMeasure::weights)
        .def("mass", &OccupationMeasure::mass)
        .def("support", &OccupationMeasure::support, py::arg("cutoff") = 1e-12);

    py::class_<ClosedMeasurePolytope>(mod, "ClosedMeasurePolytope")
        .def("num_vars", &ClosedMeasurePolytope::num_vars);
    mod.def("build_polytope", &build_polytope);

    py::class_<MatherResult>(mod, "MatherResult")
        .def_readonly("value", &MatherResult::value)
        .def_readonly("mu", &MatherResult::mu);
    mod.def("solve_mather_lp", &solve_mather_lp, py::arg("polytope"), py::arg("model"),
            py::arg("r") = 0.0);

    py::class_<L4Report>(mod, "L4Report")
        .def_readonly("mather_optimum", &L4Report::mather_optimum)
        .def_readonly("face_max_dLdu", &L4Report::face_max_dLdu)
        .def_readonly("verdict", &L4Report::verdict)
        .def("holds", &L4Report::holds);
    mod.def("check_L4", &check_L4, py::arg("polytope"), py::arg("model"), py::arg("lp_result"),
            py::arg("margin") = 1e-3);

    py::class_<BarrierTable>(mod, "BarrierTable")
        .def_readonly("sources", &BarrierTable::sources)
        .def_readonly("values", &BarrierTable::values)
        .def_readonly("window_ok", &BarrierTable::window_ok)
        .def("row", &BarrierTable::row);
    mod.def("peierls_barrier", &peierls_barrier, py::arg("model"), py::arg("sources"),
            py::arg("c"), py::arg("t1"), py::arg("t2"), py::arg("scheme"), py::arg("grid"),
            py::arg("osc_tol") = 1e-3);
    mod.def("aubry_set", &aubry_set);
    mod.def("face_support_nodes", &face_support_nodes, py::arg("polytope"), py::arg("model"),
            py::arg("lp_result"), py::arg("mass_cap") = 1e-4);
    py::class_<SelectU0Options>(mod, "SelectU0Options").def(py::init<>());
    mod.def("select_u0", &select_u0, py::arg("polytope"), py::arg("model"),
            py::arg("lp_result"), py::arg("l4"), py::arg("barrier"),
            py::arg("opts") = SelectU0Options{});

    py::class_<CriticalValue>(mod, "CriticalValue")
        .def_readonly("value", &CriticalValue::value)
        .def_readonly("method", &CriticalValue::method)
        .def_readonly("estimated_error", &CriticalValue::estimated_error);
    mod.def("critical_value_ergodic", &critical_value_ergodic, py::arg("model"), py::arg("r"),
            py::arg("scheme"), py::arg("grid"),
            py::arg("ladder") = std::vector<double>{1e-2, 5e-3, 2.5e-3});
    mod.def("critical_value_lp", &critical_value_lp, py::arg("polytope"), py::arg("model"),
            py::arg("r") = 0.0);
    mod.def("find_c0", &find_c0);

    py::class_<Verdict>(mod, "Verdict")
        .def_readonly("name", &Verdict::name)
        .def_readonly("pass_", &Verdict::pass)
        .def_readonly("note", &Verdict::note);
    py::class_<ExperimentReport>(mod, "ExperimentReport")
        .def_readonly("kind", &ExperimentReport::kind)
        .def_readonly("verdicts", &ExperimentReport::verdicts)
        .def("all_pass", &ExperimentReport::all_pass)
        .def("to_json", [](const ExperimentReport& r) { return r.to_json().dump(); });
    mod.def("run_experiment_json", [](const std::string& config_json) {
        ExperimentConfig cfg = parse_config(nlohmann::json::parse(config_json));
        return run_experiment(cfg);
    });
}
