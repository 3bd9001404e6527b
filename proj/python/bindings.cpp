#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "posner/acceptance.hpp"
#include "posner/aklt.hpp"
#include "posner/codes.hpp"
#include "posner/estimates.hpp"
#include "posner/experiments.hpp"
#include "posner/machine.hpp"
#include "posner/protocols.hpp"
#include "posner/qstate.hpp"
#include "posner/spin_algebra.hpp"

namespace py = pybind11;
using namespace posner;

namespace {

SingletPattern make_pattern(const std::vector<std::pair<int, int>>& pairs) {
    SingletPattern p{pairs};
    p.validate();
    return p;
}

}  // namespace

PYBIND11_MODULE(_posner, m) {
    m.doc() = "dense simulator for the Posner model of quantum computation";

    py::class_<QState>(m, "QState")
        .def_static("pure", &QState::pure, py::arg("amplitudes"), py::arg("labels"))
        .def_static("mixed", &QState::mixed, py::arg("rho"), py::arg("labels"))
        .def_static("basis_state", &QState::basis_state)
        .def_static("maximally_mixed", &QState::maximally_mixed)
        .def_property_readonly("labels", &QState::labels)
        .def_property_readonly("num_qubits", &QState::num_qubits)
        .def_property_readonly("is_pure", &QState::is_pure)
        .def("amplitudes", &QState::amplitudes, py::return_value_policy::copy)
        .def("density", &QState::as_density)
        .def("overlap", &QState::overlap)
        .def("to_json", &QState::to_json)
        .def_static("from_json", &QState::from_json);

    py::class_<DenseOperator>(m, "DenseOperator")
        .def(py::init<Matrix, std::vector<int>>(), py::arg("matrix"), py::arg("target_labels"))
        .def_readonly("matrix", &DenseOperator::matrix)
        .def_readonly("target_labels", &DenseOperator::target_labels)
        .def("is_unitary", &DenseOperator::is_unitary, py::arg("tol") = 1e-12)
        .def("is_hermitian", &DenseOperator::is_hermitian, py::arg("tol") = 1e-12)
        .def("is_projector", &DenseOperator::is_projector, py::arg("tol") = kOperatorTol);

    m.def("kron", &kron);
    m.def("apply", &apply);
    m.def("partial_trace", &partial_trace);
    m.def("expectation", &expectation);
    m.def("measure_pvm", &measure_pvm, py::arg("state"), py::arg("projectors"),
          py::arg("seed") = std::nullopt, py::arg("forced_outcome") = std::nullopt);

    py::class_<PvmResult>(m, "PvmResult")
        .def_readonly("outcome", &PvmResult::outcome)
        .def_readonly("probability", &PvmResult::probability)
        .def_readonly("probabilities", &PvmResult::probabilities)
        .def_readonly("post_state", &PvmResult::post_state);

    m.def("build_pauli", &build_pauli);
    m.def("build_rotation", &build_rotation);
    m.def("build_c_operator", &build_c_operator);
    m.def("build_tau_projector", &build_tau_projector);
    m.def("build_sz_total", &build_sz_total);
    m.def("build_s2_trio", &build_s2_trio);
    m.def("trio_basis_csv", &trio_basis_csv);
    m.def("charge_basis_csv", &charge_basis_csv);

    py::class_<TrioBasisElement>(m, "TrioBasisElement")
        .def_readonly("name", &TrioBasisElement::name)
        .def_readonly("vector", &TrioBasisElement::vector)
        .def_readonly("s123", &TrioBasisElement::s123)
        .def_readonly("m123", &TrioBasisElement::m123)
        .def_readonly("tau123", &TrioBasisElement::tau123);
    m.def("build_trio_basis", &build_trio_basis, py::return_value_policy::reference);

    py::class_<ChargeBasisElement>(m, "ChargeBasisElement")
        .def_readonly("name", &ChargeBasisElement::name)
        .def_readonly("vector", &ChargeBasisElement::vector)
        .def_readonly("tau", &ChargeBasisElement::tau)
        .def_readonly("s123", &ChargeBasisElement::s123)
        .def_readonly("s456", &ChargeBasisElement::s456)
        .def_readonly("m123", &ChargeBasisElement::m123)
        .def_readonly("m456", &ChargeBasisElement::m456)
        .def_readonly("m16", &ChargeBasisElement::m16)
        .def_readonly("decomposition", &ChargeBasisElement::decomposition);
    m.def("build_charge_basis", &build_charge_basis, py::return_value_policy::reference);

    py::class_<PosnerRegister>(m, "PosnerRegister")
        .def_readonly("name", &PosnerRegister::name)
        .def_readonly("labels", &PosnerRegister::labels);

    py::class_<BindResult>(m, "BindResult")
        .def_readonly("bound", &BindResult::bound)
        .def_readonly("probability", &BindResult::probability);

    py::class_<Machine>(m, "Machine")
        .def(py::init<>())
        .def("prepare_singlet", &Machine::prepare_singlet)
        .def("form_posner", &Machine::form_posner, py::return_value_policy::reference)
        .def("permute_hextuple", &Machine::permute_hextuple)
        .def("rotate_hextuple", &Machine::rotate_hextuple)
        .def("rotate_dodectuple", &Machine::rotate_dodectuple)
        .def("attempt_binding", &Machine::attempt_binding, py::arg("a"), py::arg("b"),
             py::arg("seed") = std::nullopt, py::arg("force_outcome") = std::nullopt)
        .def("separate", &Machine::separate)
        .def("hydrolyze", &Machine::hydrolyze)
        .def("hydrolyze_pair", &Machine::hydrolyze_pair)
        .def("tau_weight", &Machine::tau_weight)
        .def("state", &Machine::state, py::return_value_policy::copy)
        .def("num_qubits", &Machine::num_qubits)
        .def("check_invariants", &Machine::check_invariants);

    m.def("run_script", &run_script);
    m.def("coarse_bell_check", [] {
        const CoarseBellReport r = Machine::coarse_bell_check();
        return py::make_tuple(r.max_residual, r.combinations_checked);
    });

    py::class_<Code>(m, "Code")
        .def_readonly("name", &Code::name)
        .def_readonly("codewords", &Code::codewords);
    py::class_<CriteriaReport>(m, "CriteriaReport")
        .def_readonly("pass_", &CriteriaReport::pass)
        .def_readonly("worst_violation", &CriteriaReport::worst_violation)
        .def_readonly("worst_entry", &CriteriaReport::worst_entry)
        .def("to_json", &CriteriaReport::to_json);
    m.def("build_qutrit_code", &build_qutrit_code);
    m.def("build_repetition_code", &build_repetition_code);
    m.def("all_single_qubit_paulis", &all_single_qubit_paulis);
    m.def("check_detection", &check_detection, py::arg("code"), py::arg("errors"),
          py::arg("tol") = kOperatorTol);
    m.def("check_correction", &check_correction, py::arg("code"), py::arg("errors"),
          py::arg("tol") = kOperatorTol);

    m.def("prepare_phi_theta", &prepare_phi_theta);
    m.def("tau_weights", &tau_weights);
    m.def("binding_probability",
          [](const std::vector<std::pair<int, int>>& pairs) {
              return binding_probability(make_pattern(pairs));
          });
    m.def("random_rotation_average",
          [](const std::vector<std::pair<int, int>>& pairs, int n, std::uint64_t seed) {
              const RotationAverage a = random_rotation_average(make_pattern(pairs), n, seed);
              return py::make_tuple(a.mean, a.stderr_mean);
          });

    py::class_<TauQutritBasis>(m, "TauQutritBasis")
        .def_static("from_theta", &TauQutritBasis::from_theta)
        .def_readonly("vectors", &TauQutritBasis::vectors);
    py::class_<TeleportResult>(m, "TeleportResult")
        .def_readonly("bound", &TeleportResult::bound)
        .def_readonly("p_bind", &TeleportResult::p_bind)
        .def_readonly("c_state", &TeleportResult::c_state)
        .def_readonly("c_sector_distribution", &TeleportResult::c_sector_distribution);
    m.def("incoherent_teleport", &incoherent_teleport, py::arg("coefficients"), py::arg("basis"),
          py::arg("seed") = std::nullopt, py::arg("force_bound") = std::nullopt);

    py::class_<Lattice>(m, "Lattice")
        .def_static("single_posner", &Lattice::single_posner)
        .def_static("two_posner_closed", &Lattice::two_posner_closed)
        .def_static("two_posner_open", &Lattice::two_posner_open)
        .def_static("from_json", &Lattice::from_json)
        .def("to_json", &Lattice::to_json);
    py::class_<CircuitBuildResult>(m, "CircuitBuildResult")
        .def_readonly("state", &CircuitBuildResult::state)
        .def_readonly("state_with_stubs", &CircuitBuildResult::state_with_stubs)
        .def_readonly("posner_labels_flat", &CircuitBuildResult::posner_labels_flat)
        .def_readonly("stub_labels", &CircuitBuildResult::stub_labels)
        .def_readonly("binding_attempts", &CircuitBuildResult::binding_attempts);
    m.def("build_aklt_prime_circuit", &build_aklt_prime_circuit, py::arg("lattice"),
          py::arg("force_success"), py::arg("seed") = std::nullopt);
    m.def("contract_peps", &contract_peps);
    m.def("first_binding_probability", &first_binding_probability);

    py::class_<SiteSpinResult>(m, "SiteSpinResult")
        .def_readonly("good", &SiteSpinResult::good)
        .def_readonly("probability", &SiteSpinResult::probability)
        .def_readonly("post_state", &SiteSpinResult::post_state);
    m.def("measure_site_spin", &measure_site_spin, py::arg("state"), py::arg("posner_labels"),
          py::arg("seed") = std::nullopt, py::arg("force_good") = std::nullopt);

    py::class_<PovmFResult>(m, "PovmFResult")
        .def_readonly("outcome", &PovmFResult::outcome)
        .def_readonly("probability", &PovmFResult::probability)
        .def_readonly("post_state", &PovmFResult::post_state)
        .def_readonly("off_sector", &PovmFResult::off_sector);
    m.def("measure_povm_F", &measure_povm_F, py::arg("state"), py::arg("trio_labels"),
          py::arg("seed") = std::nullopt, py::arg("force_outcome") = std::nullopt);

    m.def("estimate_diffusion", [](double T, double eta, double r, double l) {
        const DiffusionResult d = estimate_diffusion({T, eta, r, l});
        return py::make_tuple(d.diffusion_constant, d.diffusion_time_s);
    });
    m.def("estimate_rotation_time", &estimate_rotation_time);

    m.def("run_experiment", [](const std::string& cfg) { return run_experiment(cfg).to_json(); });
    m.def("run_acceptance", [](std::optional<int> only) {
        py::list out;
        for (const auto& c : run_acceptance(only))
            out.append(py::make_tuple(c.id, c.name, c.pass, c.detail));
        return out;
    }, py::arg("only") = std::nullopt);
}
