#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bhdimer/approx.hpp"
#include "bhdimer/bethe.hpp"
#include "bhdimer/errors.hpp"
#include "bhdimer/exact.hpp"
#include "bhdimer/fock.hpp"
#include "bhdimer/model.hpp"
#include "bhdimer/sweep.hpp"

namespace py = pybind11;
using namespace bhd;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-site Bose-Hubbard spectra, Bethe roots and closed-form estimates";

    // messages start with the error kind, e.g. "RegimeBoundary: ..."
    py::register_exception<Error>(m, "BhdError", PyExc_RuntimeError);

    py::class_<PhysicalParams>(m, "PhysicalParams")
        .def(py::init([](double epsilon, double J, double U, double V, int N) {
                 PhysicalParams p{epsilon, J, U, V, N};
                 validate(p);
                 return p;
             }),
             py::arg("epsilon"), py::arg("J"), py::arg("U"), py::arg("V"), py::arg("N"))
        .def_readwrite("epsilon", &PhysicalParams::epsilon)
        .def_readwrite("J", &PhysicalParams::J)
        .def_readwrite("U", &PhysicalParams::U)
        .def_readwrite("V", &PhysicalParams::V)
        .def_readwrite("N", &PhysicalParams::N)
        .def("__repr__", [](const PhysicalParams& p) {
            std::ostringstream os;
            os << "PhysicalParams(epsilon=" << p.epsilon << ", J=" << p.J << ", U=" << p.U << ", V=" << p.V
               << ", N=" << p.N << ")";
            return os.str();
        });

    py::class_<ReducedParams>(m, "ReducedParams")
        .def(py::init<double, double, int>(), py::arg("c"), py::arg("delta"), py::arg("N"))
        .def_property_readonly("c", &ReducedParams::c)
        .def_property_readonly("c2", &ReducedParams::c2)
        .def_property_readonly("delta", &ReducedParams::delta)
        .def_property_readonly("N", &ReducedParams::N)
        .def("__eq__", [](const ReducedParams& a, const ReducedParams& b) { return a == b; })
        .def("__repr__", [](const ReducedParams& r) {
            std::ostringstream os;
            os << "ReducedParams(c=" << r.c() << ", delta=" << r.delta() << ", N=" << r.N() << ")";
            return os.str();
        });

    m.def("reduce", &reduce);
    m.def("map_energy_to_physical", &map_energy_to_physical, py::arg("E"), py::arg("params"));

    m.def("reduced_spectrum",
          [](const ReducedParams& r) { return reduced_spectrum(r).energies; });
    m.def("physical_spectrum",
          [](const PhysicalParams& p) { return physical_spectrum(p).energies; });
    m.def("eigenvectors", [](const ReducedParams& r) { return *reduced_spectrum(r, true).amplitudes; },
          "rows are unit eigenvectors in the b-occupation basis");
    m.def("reduced_trace", &reduced_trace);

    py::class_<SolverOptions>(m, "SolverOptions")
        .def(py::init<>())
        .def_readwrite("tol", &SolverOptions::tol)
        .def_readwrite("max_iter", &SolverOptions::max_iter)
        .def_readwrite("max_halvings", &SolverOptions::max_halvings)
        .def_readwrite("max_step", &SolverOptions::max_step)
        .def_readwrite("boundary_guard", &SolverOptions::boundary_guard)
        .def_readwrite("continuation", &SolverOptions::continuation)
        .def_readwrite("cross_validate", &SolverOptions::cross_validate);

    py::class_<BetheState>(m, "BetheState")
        .def_readonly("roots", &BetheState::roots)
        .def_readonly("sigma", &BetheState::sigma)
        .def_readonly("params", &BetheState::params)
        .def_readonly("residual_norm", &BetheState::residual_norm)
        .def_readonly("iterations", &BetheState::iterations)
        .def_readonly("continuation_steps", &BetheState::continuation_steps)
        .def("to_json", [](const BetheState& s) { return state_to_json(s).dump(); })
        .def_static("from_json",
                    [](const std::string& text) { return state_from_json(nlohmann::json::parse(text)); });

    py::class_<DiagnosticsReport>(m, "DiagnosticsReport")
        .def_property_readonly("ok", &DiagnosticsReport::ok)
        .def_readonly("distinct", &DiagnosticsReport::distinct)
        .def_readonly("conjugate_closed", &DiagnosticsReport::conjugate_closed)
        .def_readonly("residual_ok", &DiagnosticsReport::residual_ok)
        .def_readonly("residual_norm", &DiagnosticsReport::residual_norm)
        .def_readonly("real_negative", &DiagnosticsReport::real_negative)
        .def_readonly("head_offset", &DiagnosticsReport::head_offset)
        .def_readonly("min_gap_ratio", &DiagnosticsReport::min_gap_ratio)
        .def_readonly("notes", &DiagnosticsReport::notes);

    m.def("solve_ground", &solve_ground, py::arg("params"), py::arg("options") = SolverOptions{});
    m.def("solve_first_excited", &solve_first_excited, py::arg("params"),
          py::arg("options") = SolverOptions{});
    m.def("make_state", &make_state, py::arg("roots"), py::arg("params"), py::arg("sigma") = 0);
    m.def("energy_from_roots", py::overload_cast<const BetheState&>(&energy_from_roots));
    m.def("validate_state", &validate_state, py::arg("state"), py::arg("tol") = 1e-10);
    m.def("shift_state", &shift_state);
    m.def("equidistant_init", &equidistant_init);

    m.def("formulas", [] {
        std::vector<std::string> out;
        for (FormulaId f : all_formulas()) out.push_back(to_string(f));
        return out;
    });
    m.def(
        "estimate",
        [](const std::string& name, const ReducedParams& r, std::optional<PhysicalParams> p) {
            auto id = formula_from_string(name);
            if (!id) throw Error(ErrorKind::InvalidParams, "unknown formula " + name);
            EnergyEstimate e = evaluate_formula(*id, r, p);
            return py::make_tuple(e.value, e.in_validity_regime);
        },
        py::arg("formula"), py::arg("params"), py::arg("physical") = py::none(),
        "returns (value, in_validity_regime)");
    m.def("lambda_linear", &lambda_linear);
    m.def("regime", [](const ReducedParams& r) { return std::string(to_string(regime(r))); });

    m.def("stirling_D", [](int M, int k) { return stirling_D(M, k).convert_to<std::string>(); },
          "exact value as a decimal string");
    m.def("ket_expansion", [](const BetheState& s) { return ket_expansion(s).coeffs; });
    m.def("bra_expansion", [](const BetheState& s) { return bra_expansion(s).coeffs; });
    m.def(
        "expectation",
        [](const BetheState& s, const std::string& name) {
            for (ObservableKind k : {ObservableKind::NumberA, ObservableKind::NumberB, ObservableKind::ABdag,
                                     ObservableKind::AdagB, ObservableKind::NaNb, ObservableKind::Total,
                                     ObservableKind::Hamiltonian})
                if (name == to_string(k)) return expectation(s, Observable{k, {}});
            throw Error(ErrorKind::InvalidParams, "unknown observable " + name);
        },
        py::arg("state"), py::arg("observable"));
    m.def("expectation_matrix",
          [](const BetheState& s, const std::vector<std::vector<double>>& a) {
              return expectation(s, Observable{ObservableKind::Custom, a});
          });

    m.def(
        "sweep_csv",
        [](const std::string& spec_json) {
            std::ostringstream os;
            write_records_csv(os, run_sweep(sweep_spec_from_json(nlohmann::json::parse(spec_json))));
            return os.str();
        },
        py::arg("spec_json"));
    m.def("fit_alpha", [](const std::vector<std::pair<int, std::optional<double>>>& pts) {
        AlphaFit f = fit_alpha(pts);
        return py::make_tuple(f.alpha, f.residual, f.used);
    });
}
