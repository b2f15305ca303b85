#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "mexec/builtin.hpp"
#include "mexec/checks.hpp"
#include "mexec/commands.hpp"
#include "mexec/csv.hpp"
#include "mexec/error.hpp"
#include "mexec/montecarlo.hpp"
#include "mexec/optimal.hpp"
#include "mexec/scenario.hpp"

namespace py = pybind11;
using namespace mexec;

namespace {

Matrix stack(const std::vector<Vector>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return out;
}

py::dict solve(const MarketSpec& spec) {
    const CoefficientSet coeffs = derive_coefficients(spec);
    const OptimalSolution sol = optimal_strategy(spec, coeffs, make_feedback(spec, coeffs));
    const Table table = solution_table(coeffs.grid(), sol.plan, sol.deviation, sol.hidden);
    Matrix rows(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(table.header.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        for (std::size_t j = 0; j < table.header.size(); ++j)
            rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table.rows[i][j];
    py::dict out;
    out["cost"] = sol.cost;
    out["columns"] = table.header;
    out["table"] = rows;
    out["x"] = stack(sol.plan.values);
    out["d"] = stack(sol.deviation.values);
    out["h"] = stack(sol.hidden.values);
    out["x_terminal"] = sol.plan.terminal;
    out["d_terminal"] = sol.deviation.terminal;
    return out;
}

double cost_of(const MarketSpec& spec) {
    const CoefficientSet coeffs = derive_coefficients(spec);
    return optimal_cost(spec, coeffs, make_feedback(spec, coeffs));
}

py::list audit(const MarketSpec& spec) {
    py::list out;
    for (const auto& c : assumption_audit(spec).checks) {
        py::dict row;
        row["name"] = c.name;
        row["status"] = to_string(c.status);
        row["hard"] = c.hard;
        row["detail"] = c.detail;
        out.append(row);
    }
    return out;
}

py::dict monte_carlo(const MarketSpec& spec, std::size_t paths, std::uint64_t seed, unsigned workers,
                     const std::string& rule) {
    const CoefficientSet coeffs = derive_coefficients(spec);
    StrategyRule strategy = FeedbackRule{};
    if (rule == "immediate_close")
        strategy = FixedPlanRule{immediate_close(spec)};
    else if (rule != "feedback")
        fail(ErrorKind::Configuration, "rule must be 'feedback' or 'immediate_close'");
    const MCEstimate e = mc_cost(spec, coeffs, strategy, SimConfig{paths, seed, 0, workers});
    py::dict out;
    out["mean"] = e.mean;
    out["std_error"] = e.std_error;
    out["n_paths"] = e.n_paths;
    return out;
}

}  // namespace

PYBIND11_MODULE(_mexec, m) {
    m.doc() = "Optimal multi-asset execution with cross impact";

    // Kept alive by the module attribute for the life of the interpreter.
    static PyObject* error_type = py::exception<Error>(m, "MexecError", PyExc_RuntimeError).ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const py::object cls = py::reinterpret_borrow<py::object>(error_type);
            py::object instance = cls(std::string(to_string(e.kind())) + ": " + e.what());
            instance.attr("kind") = to_string(e.kind());
            PyErr_SetObject(error_type, instance.ptr());
        }
    });

    py::class_<MarketSpec>(m, "MarketSpec")
        .def_readonly("assets", &MarketSpec::assets)
        .def_readonly("factors", &MarketSpec::factors)
        .def_readonly("horizon", &MarketSpec::horizon)
        .def_readonly("frame", &MarketSpec::frame)
        .def_readonly("lambda0", &MarketSpec::lambda0)
        .def_readwrite("x0", &MarketSpec::x0)
        .def_readwrite("d0", &MarketSpec::d0)
        .def_readwrite("terminal_target", &MarketSpec::terminal_target)
        .def_readwrite("grid_steps", &MarketSpec::grid_steps)
        .def("has_noise", &MarketSpec::has_noise)
        .def("has_targets", &MarketSpec::has_targets)
        .def("to_json", [](const MarketSpec& s) { return scenario_to_json(Scenario{s, std::nullopt}); });

    m.def("builtin_spec", [](const std::string& id) { return builtin_spec(id); }, py::arg("id"));
    m.def("builtin_spec_ids", &builtin_spec_ids);
    m.def("constant_market", &constant_market, py::arg("gamma"), py::arg("rho"), py::arg("horizon"), py::arg("x0"),
          py::arg("grid_steps") = 1000);
    m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text).spec; }, py::arg("text"));
    m.def("load_scenario", [](const std::filesystem::path& p) { return load_scenario(p).spec; }, py::arg("path"));

    m.def("solve", &solve, py::arg("spec"), "Optimal strategy, deviation and hidden state in the CSV layout.");
    m.def("optimal_cost", &cost_of, py::arg("spec"));
    m.def("audit", &audit, py::arg("spec"));
    m.def("kappa_bounds", [](const MarketSpec& spec) {
        const KappaReport r = kappa_definiteness(derive_coefficients(spec));
        return py::make_tuple(r.min_eigenvalue, r.max_eigenvalue);
    }, py::arg("spec"));
    m.def("conley_criterion", &conley_criterion, py::arg("gamma"), py::arg("rho"));
    m.def("monte_carlo", &monte_carlo, py::arg("spec"), py::arg("paths") = 10000, py::arg("seed") = 0,
          py::arg("workers") = 1, py::arg("rule") = "feedback");
    m.def("asymmetric_roundtrip", &asymmetric_roundtrip, py::arg("gamma_tilde"), py::arg("rho"), py::arg("n_blocks"),
          py::arg("h"), py::arg("direction") = std::nullopt);
    m.def("blowup_demo", &blowup_demo, py::arg("horizon"), py::arg("k"), py::arg("x"));
    m.def("write_example", [](const std::string& id, const std::filesystem::path& out_dir) {
        std::ostringstream log;
        if (cmd_example(id, out_dir, log) != kExitOk) fail(ErrorKind::Configuration, log.str());
    }, py::arg("id"), py::arg("out_dir"), "Writes the CSV behind a built-in example.");
    m.def("example_ids", &example_ids);
}
