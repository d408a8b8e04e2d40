#include "logdiff/experiments.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace logdiff;

namespace {

using MutableGrid = std::shared_ptr<LogPolarGrid>;

MutableGrid expose(const GridPtr& grid) {
    return std::const_pointer_cast<LogPolarGrid>(grid);
}

template <class Span>
std::vector<double> to_vector(Span span) {
    return {span.begin(), span.end()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Logarithmic fast diffusion on the disc: solver, cut-off quadrature and estimates";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);
    py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_ValueError);
    py::register_exception<IncompatibleError>(m, "IncompatibleError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    // conformal geometry
    m.def("s_from_r", &s_from_r, py::arg("r"));
    m.def("r_from_s", &r_from_s, py::arg("s"));
    m.def("hyperbolic_factor", &hyperbolic_factor, py::arg("s"));

    py::enum_<ModelKind>(m, "ModelKind")
        .value("BigBang", ModelKind::BigBang)
        .value("Cusp", ModelKind::Cusp)
        .value("FlatDisc", ModelKind::FlatDisc)
        .value("Poincare", ModelKind::Poincare);
    m.def("model_factor", &model_factor, py::arg("kind"), py::arg("s"), py::arg("t"));

    py::class_<LogPolarGrid, MutableGrid>(m, "LogPolarGrid")
        .def(py::init([](std::vector<double> nodes) { return std::make_shared<LogPolarGrid>(std::move(nodes)); }),
             py::arg("nodes"))
        .def_static("uniform", [](double a, double b, std::size_t n) {
            return std::make_shared<LogPolarGrid>(LogPolarGrid::uniform(a, b, n));
        }, py::arg("s_min"), py::arg("s_max"), py::arg("count"))
        .def_static("graded", [](double a, double b, std::size_t n, double ratio) {
            return std::make_shared<LogPolarGrid>(LogPolarGrid::graded(a, b, n, ratio));
        }, py::arg("s_min"), py::arg("s_max"), py::arg("count"), py::arg("ratio") = 1.05)
        .def_property_readonly("nodes", [](const LogPolarGrid& g) { return to_vector(g.nodes()); })
        .def_property_readonly("s_min", &LogPolarGrid::s_min)
        .def_property_readonly("s_max", &LogPolarGrid::s_max)
        .def("refined", [](const LogPolarGrid& g) { return std::make_shared<LogPolarGrid>(g.refined()); })
        .def("__len__", &LogPolarGrid::size)
        .def("__eq__", &LogPolarGrid::operator==);

    py::class_<ConformalState>(m, "ConformalState")
        .def(py::init([](const MutableGrid& grid, std::vector<double> values, double time) {
            return ConformalState(grid, std::move(values), time);
        }), py::arg("grid"), py::arg("values"), py::arg("time"))
        .def_property_readonly("grid", [](const ConformalState& s) { return expose(s.grid_ptr()); })
        .def_property_readonly("values", [](const ConformalState& s) { return to_vector(s.values()); })
        .def_property_readonly("time", &ConformalState::time)
        .def("__len__", &ConformalState::size);

    m.def("sample_model", [](ModelKind kind, const MutableGrid& grid, double t) {
        return sample_model(kind, grid, t);
    }, py::arg("kind"), py::arg("grid"), py::arg("t"));
    m.def("gauss_curvature", &gauss_curvature, py::arg("state"));
    m.def("annulus_area", &annulus_area, py::arg("state"), py::arg("s_lo"), py::arg("s_hi"));
    m.def("disc_area", &disc_area, py::arg("state"), py::arg("r0"));
    m.def("weighted_area", py::overload_cast<const ConformalState&, const CutoffSpec&>(&weighted_area),
          py::arg("state"), py::arg("spec"));

    // flux cut-off
    py::enum_<Continuation>(m, "Continuation")
        .value("CubicHermite", Continuation::CubicHermite)
        .value("QuadraticThenConstant", Continuation::QuadraticThenConstant)
        .value("LinearThenQuadratic", Continuation::LinearThenQuadratic);

    py::class_<FluxFunction>(m, "FluxFunction")
        .def(py::init<double>(), py::arg("a"))
        .def_property_readonly("a", &FluxFunction::a)
        .def_property_readonly("continuation", &FluxFunction::continuation)
        .def("value", &FluxFunction::value)
        .def("derivative", &FluxFunction::derivative)
        .def("second_derivative", &FluxFunction::second_derivative)
        .def("second_derivative_left", &FluxFunction::second_derivative_left);

    py::class_<CutoffSpec>(m, "CutoffSpec")
        .def_static("make", &CutoffSpec::make, py::arg("r0"), py::arg("R"), py::arg("gamma"))
        .def_readonly("r0", &CutoffSpec::r0)
        .def_readonly("R", &CutoffSpec::R)
        .def_readonly("gamma", &CutoffSpec::gamma)
        .def_readonly("s0", &CutoffSpec::s0)
        .def_readonly("S", &CutoffSpec::S)
        .def_readonly("a", &CutoffSpec::a);

    py::class_<Cutoff>(m, "Cutoff")
        .def(py::init<const CutoffSpec&>(), py::arg("spec"))
        .def("value", &Cutoff::value)
        .def("derivative", &Cutoff::derivative)
        .def("second_derivative", &Cutoff::second_derivative);

    py::class_<QReport>(m, "QReport")
        .def_readonly("q", &QReport::q)
        .def_readonly("q1", &QReport::q1)
        .def_readonly("q2", &QReport::q2)
        .def_readonly("split", &QReport::split)
        .def_readonly("error", &QReport::error)
        .def_readonly("analytic_bound", &QReport::analytic_bound)
        .def_readonly("tracked_constant", &QReport::tracked_constant)
        .def_readonly("converged", &QReport::converged);
    m.def("compute_Q", [](const CutoffSpec& spec) { return compute_Q(spec); }, py::arg("spec"));
    m.def("q_analytic_bound", [](const CutoffSpec& spec) { return q_analytic_bound(spec).bound; }, py::arg("spec"));

    // solver
    py::class_<BoundarySchedule>(m, "BoundarySchedule")
        .def(py::init<BoundarySchedule::ValueFn, BoundarySchedule::ValueFn, std::string>(), py::arg("inner"),
             py::arg("outer"), py::arg("label") = "custom")
        .def_static("fixed", &BoundarySchedule::fixed)
        .def_static("exact", &BoundarySchedule::exact)
        .def_static("ramp", &BoundarySchedule::ramp, py::arg("initial"), py::arg("k"))
        .def_static("switched_ramp", &BoundarySchedule::switched_ramp)
        .def("inner", &BoundarySchedule::inner)
        .def("outer", &BoundarySchedule::outer)
        .def_property_readonly("label", &BoundarySchedule::label);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("dt", &SolverConfig::dt)
        .def_readwrite("dt_max", &SolverConfig::dt_max)
        .def_readwrite("dt_growth", &SolverConfig::dt_growth)
        .def_readwrite("adaptive", &SolverConfig::adaptive)
        .def_readwrite("newton_tol", &SolverConfig::newton_tol)
        .def_readwrite("max_newton", &SolverConfig::max_newton)
        .def_readwrite("sample_times", &SolverConfig::sample_times);

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("states", &Trajectory::states)
        .def_property_readonly("times", &Trajectory::times)
        .def_property_readonly("label", &Trajectory::label)
        .def_readonly("steps_taken", &Trajectory::steps_taken)
        .def("at", &Trajectory::at, py::arg("t"))
        .def("__len__", &Trajectory::size);

    m.def("step", [](const ConformalState& state, double dt, const BoundarySchedule& schedule,
                     const SolverConfig& config) { return step(state, dt, schedule, config).state; },
          py::arg("state"), py::arg("dt"), py::arg("schedule"), py::arg("config") = SolverConfig{});
    m.def("evolve", &evolve, py::arg("initial"), py::arg("schedule"), py::arg("config"), py::arg("T"),
          py::call_guard<py::gil_scoped_release>());
    m.def("model_trajectory", [](ModelKind kind, const MutableGrid& grid, const std::vector<double>& times) {
        return model_trajectory(kind, grid, times);
    });
    m.def("mms_residual", [](ModelKind kind, const MutableGrid& grid, double t, double dt) {
        return mms_residual(kind, grid, t, dt);
    }, py::arg("kind"), py::arg("grid"), py::arg("t"), py::arg("dt"));

    py::class_<ExhaustionDiagnostics>(m, "ExhaustionDiagnostics")
        .def_readonly("min_log_increment", &ExhaustionDiagnostics::min_log_increment)
        .def_readonly("sup_difference", &ExhaustionDiagnostics::sup_difference)
        .def_readonly("monotone", &ExhaustionDiagnostics::monotone);
    py::class_<ExhaustionResult>(m, "ExhaustionResult")
        .def_readonly("ramps", &ExhaustionResult::ramps)
        .def_readonly("trajectories", &ExhaustionResult::trajectories)
        .def_readonly("diagnostics", &ExhaustionResult::diagnostics);
    m.def("exhaust", &exhaust, py::arg("initial"), py::arg("ramps"), py::arg("config"), py::arg("T"), py::arg("r0"),
          py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>());

    py::class_<OrderReport>(m, "OrderReport")
        .def_readonly("ordered", &OrderReport::ordered)
        .def_readonly("min_margin", &OrderReport::min_margin);
    m.def("check_order_preservation", &check_order_preservation, py::arg("a"), py::arg("b"), py::arg("tol") = 0.0);

    // estimates
    m.def("barrier_constant", &barrier_constant);
    m.def("odi_constant", &odi_constant, py::arg("gamma"));
    m.def("envelope_constant", &envelope_constant, py::arg("gamma"), py::arg("r0"));

    py::class_<EstimateRow>(m, "EstimateRow")
        .def_readonly("time", &EstimateRow::time)
        .def_readonly("id", &EstimateRow::id)
        .def_readonly("lhs", &EstimateRow::lhs)
        .def_readonly("rhs", &EstimateRow::rhs)
        .def_property_readonly("margin", &EstimateRow::margin);
    py::class_<EstimateReport>(m, "EstimateReport")
        .def_readonly("rows", &EstimateReport::rows)
        .def_readonly("precondition_ok", &EstimateReport::precondition_ok)
        .def_readonly("note", &EstimateReport::note)
        .def("passed", &EstimateReport::passed, py::arg("tol") = 0.0);

    py::enum_<JVariant>(m, "JVariant")
        .value("Ordered", JVariant::Ordered)
        .value("PositivePart", JVariant::PositivePart);
    m.def("compute_J", &compute_J, py::arg("g"), py::arg("G"), py::arg("spec"), py::arg("t"),
          py::arg("variant") = JVariant::Ordered);
    m.def("lower_barrier_check", &lower_barrier_check, py::arg("trajectory"));
    m.def("pointwise_u_inverse_bound", &pointwise_u_inverse_bound, py::arg("trajectory"), py::arg("t"),
          py::arg("s0") = 0.69314718055994531, py::arg("barrier_tol") = 1e-8);
    m.def("main_odi_check", &main_odi_check, py::arg("g"), py::arg("G"), py::arg("spec"));
    m.def("interior_area_verify", &interior_area_verify, py::arg("g"), py::arg("G"), py::arg("r0"), py::arg("R"),
          py::arg("gamma"));
    m.def("volume_excess_verify", &volume_excess_verify, py::arg("g"), py::arg("G"), py::arg("r0"), py::arg("R"),
          py::arg("gamma"));
    m.def("curvature_monotonicity_check", &curvature_monotonicity_check, py::arg("trajectory"),
          py::arg("curvature_tol") = 1e-3);

    // configuration and experiments
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("id", &ExperimentConfig::id)
        .def_readwrite("r0", &ExperimentConfig::r0)
        .def_readwrite("R", &ExperimentConfig::R)
        .def_readwrite("R_fraction", &ExperimentConfig::R_fraction)
        .def_readwrite("gamma", &ExperimentConfig::gamma)
        .def_readwrite("k", &ExperimentConfig::k)
        .def_readwrite("T", &ExperimentConfig::T)
        .def_readwrite("samples", &ExperimentConfig::samples)
        .def_readwrite("points", &ExperimentConfig::points)
        .def("hash", &ExperimentConfig::hash)
        .def("__eq__", &ExperimentConfig::operator==);
    m.def("parse_config_text", &parse_config_text, py::arg("text"));
    m.def("write_config", &write_config, py::arg("config"));

    m.def("q_sweep", [](const ExperimentConfig& config, unsigned jobs) {
        const auto result = run_q_sweep(config, jobs);
        return py::make_tuple(result.rows, result.bound_violations, result.split_violations, result.passed);
    }, py::arg("config"), py::arg("jobs") = 1);
}
