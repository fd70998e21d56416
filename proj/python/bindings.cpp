#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cpld/config.hpp"
#include "cpld/errors.hpp"
#include "cpld/estimate.hpp"
#include "cpld/rate.hpp"
#include "cpld/validation.hpp"

namespace py = pybind11;
using namespace cpld;

namespace {

std::string describe_rate_result(const RateFunctionResult& r) {
    std::ostringstream out;
    out << "RateFunctionResult(u=" << fmt17(r.u) << ", value=" << fmt17(r.value) << ", branch='"
        << to_string(r.branch) << '\'';
    if (r.lambda_star) out << ", lambda_star=" << fmt17(*r.lambda_star);
    out << ')';
    return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Rate functions, simulation and rare-event estimation for nonnegative "
              "compound Poisson processes";

    py::register_exception<usage_error>(m, "UsageError", PyExc_ValueError);
    py::register_exception<divergence_error>(m, "DivergenceError", PyExc_ValueError);
    py::register_exception<boundary_error>(m, "BoundaryError", PyExc_ValueError);
    py::register_exception<numeric_error>(m, "NumericError", PyExc_RuntimeError);

    py::class_<RandomStream>(m, "RandomStream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def_static("substream", &RandomStream::substream, py::arg("master_seed"),
                    py::arg("index"))
        .def("uniform01", &RandomStream::uniform01)
        .def("exponential", &RandomStream::exponential, py::arg("mean"))
        .def("gamma", &RandomStream::gamma, py::arg("shape"), py::arg("scale"));

    py::enum_<MarkFamily>(m, "MarkFamily")
        .value("Exponential", MarkFamily::Exponential)
        .value("Gamma", MarkFamily::Gamma)
        .value("PointMass", MarkFamily::PointMass)
        .value("ZeroInflated", MarkFamily::ZeroInflated)
        .value("Empirical", MarkFamily::Empirical);

    py::class_<MarkDistribution>(m, "MarkDistribution")
        .def_static("exponential", &MarkDistribution::exponential, py::arg("mean"))
        .def_static("gamma", &MarkDistribution::gamma, py::arg("shape"), py::arg("scale"))
        .def_static("point_mass", &MarkDistribution::point_mass, py::arg("value"))
        .def_static("zero_inflated", &MarkDistribution::zero_inflated, py::arg("p0"),
                    py::arg("base"))
        .def_static("empirical",
                    py::overload_cast<std::vector<double>, std::vector<double>>(
                        &MarkDistribution::empirical),
                    py::arg("values"), py::arg("weights"))
        .def_static("empirical_uniform",
                    py::overload_cast<std::vector<double>>(&MarkDistribution::empirical),
                    py::arg("values"))
        .def_static("empirical_from_file", &MarkDistribution::empirical_from_file,
                    py::arg("path"))
        .def_static("from_spec", &MarkDistribution::from_spec, py::arg("spec"))
        .def_property_readonly("family", &MarkDistribution::family)
        .def_property_readonly("lambda_max", &MarkDistribution::lambda_max)
        .def_property_readonly("atom_at_zero", &MarkDistribution::atom_at_zero)
        .def_property_readonly("mean", &MarkDistribution::mean)
        .def_property_readonly("support_min", &MarkDistribution::support_min)
        .def_property_readonly("support_max", &MarkDistribution::support_max)
        .def("exponential_moment", &MarkDistribution::exponential_moment, py::arg("lam"),
             py::arg("order"))
        .def("mgf_minus_one", &MarkDistribution::mgf_minus_one, py::arg("lam"))
        .def("log_mgf", &MarkDistribution::log_mgf, py::arg("lam"))
        .def("tilted_mean", &MarkDistribution::tilted_mean, py::arg("lam"))
        .def("tilted_second_moment", &MarkDistribution::tilted_second_moment, py::arg("lam"))
        .def("tilt", &MarkDistribution::tilt, py::arg("lam"))
        .def("sample", &MarkDistribution::sample, py::arg("rng"))
        .def("cdf", &MarkDistribution::cdf, py::arg("x"))
        .def("to_spec", &MarkDistribution::to_spec)
        .def("__repr__",
             [](const MarkDistribution& d) { return "MarkDistribution('" + d.to_spec() + "')"; });

    py::class_<CompoundPoissonModel>(m, "CompoundPoissonModel")
        .def(py::init<double, MarkDistribution>(), py::arg("rate"), py::arg("marks"))
        .def_property_readonly("rate", &CompoundPoissonModel::rate)
        .def_property_readonly("marks", &CompoundPoissonModel::marks)
        .def_property_readonly("mean_drift", &CompoundPoissonModel::mean_drift)
        .def("tilted", &CompoundPoissonModel::tilted, py::arg("lam"));

    m.def("cumulant", &cumulant, py::arg("model"), py::arg("lam"));
    m.def("cumulant_derivative", &cumulant_derivative, py::arg("model"), py::arg("lam"),
          py::arg("order"));
    m.def("laplace_transform", &laplace_transform, py::arg("model"), py::arg("lam"),
          py::arg("t"));
    m.def("discrete_logmgf", &discrete_logmgf, py::arg("dist"), py::arg("lam"));
    m.def("discrete_logmgf_derivative", &discrete_logmgf_derivative, py::arg("dist"),
          py::arg("lam"), py::arg("order"));

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("tol_lambda", &SolverConfig::tol_lambda)
        .def_readwrite("tol_residual", &SolverConfig::tol_residual)
        .def_readwrite("max_iter", &SolverConfig::max_iter)
        .def_readwrite("lambda_floor", &SolverConfig::lambda_floor);

    py::enum_<TiltStatus>(m, "TiltStatus")
        .value("Converged", TiltStatus::Converged)
        .value("FloorCapped", TiltStatus::FloorCapped)
        .value("Boundary", TiltStatus::Boundary);

    py::class_<TiltResult>(m, "TiltResult")
        .def_readonly("status", &TiltResult::status)
        .def_readonly("lambda_star", &TiltResult::lambda_star)
        .def_readonly("u_max", &TiltResult::u_max)
        .def_readonly("residual", &TiltResult::residual)
        .def_readonly("iterations", &TiltResult::iterations)
        .def("solved", &TiltResult::solved);

    py::enum_<RateBranch>(m, "RateBranch")
        .value("Interior", RateBranch::Interior)
        .value("ZeroAtom", RateBranch::ZeroAtom)
        .value("BoundaryLinear", RateBranch::BoundaryLinear)
        .value("Infinite", RateBranch::Infinite);

    py::class_<RateFunctionResult>(m, "RateFunctionResult")
        .def_readonly("u", &RateFunctionResult::u)
        .def_readonly("value", &RateFunctionResult::value)
        .def_readonly("lambda_star", &RateFunctionResult::lambda_star)
        .def_readonly("branch", &RateFunctionResult::branch)
        .def("__repr__", &describe_rate_result);

    m.def("solve_tilt", &solve_tilt, py::arg("model"), py::arg("u"),
          py::arg("config") = SolverConfig{});
    m.def("solve_tilt_discrete", &solve_tilt_discrete, py::arg("dist"), py::arg("u"),
          py::arg("config") = SolverConfig{});
    m.def("rate_function", &rate_function, py::arg("model"), py::arg("u"),
          py::arg("config") = SolverConfig{});
    m.def("rate_function_discrete", &rate_function_discrete, py::arg("dist"), py::arg("u"),
          py::arg("config") = SolverConfig{});
    m.def("closed_form_rate_exp_continuous", &closed_form_rate_exp_continuous, py::arg("r"),
          py::arg("u"));
    m.def("closed_form_rate_exp_discrete", &closed_form_rate_exp_discrete, py::arg("u"));
    m.def("brute_force_rate", &brute_force_rate, py::arg("model"), py::arg("u"),
          py::arg("lambda_grid"));

    py::class_<Jump>(m, "Jump")
        .def_readonly("time", &Jump::time)
        .def_readonly("mark", &Jump::mark)
        .def("__repr__", [](const Jump& j) {
            return "Jump(time=" + fmt17(j.time) + ", mark=" + fmt17(j.mark) + ")";
        });

    py::class_<PathSample>(m, "PathSample")
        .def(py::init<double, std::vector<Jump>>(), py::arg("horizon"), py::arg("jumps"))
        .def_property_readonly("horizon", &PathSample::horizon)
        .def_property_readonly("jumps", &PathSample::jumps)
        .def_property_readonly("total", &PathSample::total)
        .def_property_readonly("s_t", &PathSample::s_t)
        .def_property_readonly("jump_count", &PathSample::jump_count)
        .def_property_readonly("jump_count_positive", &PathSample::jump_count_positive);

    m.def("simulate_path", &simulate_path, py::arg("model"), py::arg("t"), py::arg("rng"));
    m.def("simulate_tilted_path", &simulate_tilted_path, py::arg("model"), py::arg("lam"),
          py::arg("t"), py::arg("rng"));
    m.def("log_likelihood_ratio", &log_likelihood_ratio, py::arg("model"), py::arg("lam"),
          py::arg("path"));
    m.def("simulate_paths", &simulate_paths, py::arg("model"), py::arg("t"), py::arg("n"),
          py::arg("seed"), py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());

    py::enum_<EstimateMethod>(m, "EstimateMethod")
        .value("CrudeMC", EstimateMethod::CrudeMC)
        .value("ImportanceSampling", EstimateMethod::ImportanceSampling)
        .value("Exact", EstimateMethod::Exact);

    py::class_<EventWindow>(m, "EventWindow")
        .def(py::init<double, double>(), py::arg("u"), py::arg("delta"))
        .def_readwrite("u", &EventWindow::u)
        .def_readwrite("delta", &EventWindow::delta)
        .def("contains", &EventWindow::contains, py::arg("s"));

    py::class_<EstimateResult>(m, "EstimateResult")
        .def_readonly("p_hat", &EstimateResult::p_hat)
        .def_readonly("std_err", &EstimateResult::std_err)
        .def_readonly("n_paths", &EstimateResult::n_paths)
        .def_readonly("method", &EstimateResult::method)
        .def_readonly("log_decay", &EstimateResult::log_decay)
        .def_readonly("t", &EstimateResult::t)
        .def("__repr__", [](const EstimateResult& r) {
            return "EstimateResult(method='" + std::string(to_string(r.method)) +
                   "', p_hat=" + fmt17(r.p_hat) + ", std_err=" + fmt17(r.std_err) + ")";
        });

    py::class_<LaplaceEstimate>(m, "LaplaceEstimate")
        .def_readonly("mean", &LaplaceEstimate::mean)
        .def_readonly("std_err", &LaplaceEstimate::std_err)
        .def_readonly("n_paths", &LaplaceEstimate::n_paths);

    py::class_<DecayPoint>(m, "DecayPoint")
        .def_readonly("t", &DecayPoint::t)
        .def_readonly("log_decay", &DecayPoint::log_decay)
        .def_readonly("std_err_log", &DecayPoint::std_err_log)
        .def_readonly("estimate", &DecayPoint::estimate);

    m.def("mc_probability", &mc_probability, py::arg("model"), py::arg("window"), py::arg("t"),
          py::arg("n"), py::arg("seed"), py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("is_probability", &is_probability, py::arg("model"), py::arg("window"), py::arg("t"),
          py::arg("n"), py::arg("seed"), py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("zero_probability", &zero_probability, py::arg("model"), py::arg("t"));
    m.def("chernoff_tail_bound", &chernoff_tail_bound, py::arg("model"), py::arg("j"),
          py::arg("t"), py::arg("tilt") = std::nullopt);
    m.def("empirical_laplace", &empirical_laplace, py::arg("model"), py::arg("lam"),
          py::arg("t"), py::arg("n"), py::arg("seed"), py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("decay_rate_curve", &decay_rate_curve, py::arg("model"), py::arg("window"),
          py::arg("t_grid"), py::arg("n"), py::arg("seed"), py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("to_json_record", &to_json_record, py::arg("result"), py::arg("u") = std::nullopt,
          py::arg("delta") = std::nullopt, py::arg("seed") = std::nullopt);

    m.def(
        "run_acceptance",
        [](const std::string& cli_path, int workers, const std::vector<int>& criteria) {
            ValidationOptions options;
            options.cli_path = cli_path;
            options.workers = workers;
            return run_acceptance(options, criteria, nullptr);
        },
        py::arg("cli_path") = std::string(), py::arg("workers") = 0,
        py::arg("criteria") = std::vector<int>{}, py::call_guard<py::gil_scoped_release>());

    py::class_<CheckResult>(m, "CheckResult")
        .def_readonly("criterion", &CheckResult::criterion)
        .def_readonly("name", &CheckResult::name)
        .def_readonly("pass_", &CheckResult::pass)
        .def_readonly("observed", &CheckResult::observed)
        .def_readonly("requirement", &CheckResult::requirement)
        .def_readonly("detail", &CheckResult::detail);

    m.attr("__version__") = "0.1.0";
}
