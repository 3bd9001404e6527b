#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "posner/qstate.hpp"
#include "posner/spin_algebra.hpp"

namespace posner {

struct PosnerRegister {
    std::string name;
    std::array<int, 6> labels;  // geometry order r1..r6, fixed at formation
};

struct BindResult {
    bool bound;
    double probability;  // of the bound outcome
};

struct CoarseBellReport {
    double max_residual;       // worst deviation from the coarse-grained Bell action
    int combinations_checked;  // choices of (|1_tau>, |2_tau>)
};

// A registry of qubits and molecules evolving under the Posner instruction set.
// The global state is a pure state vector over all live qubits (cap 18).
class Machine {
public:
    Machine() = default;

    // op 1: append a fresh singlet pair; returns the two new labels.
    std::pair<int, int> prepare_singlet();

    // op 2: group six live, unowned qubits into a molecule. The label order is
    // the geometry assignment; the logical state is untouched.
    const PosnerRegister& form_posner(const std::string& name, const std::array<int, 6>& labels);

    // op 3a: apply C to a register's qubits.
    void permute_hextuple(const std::string& name);

    // ops 3b / 6a: identical single-qubit rotations on all qubits of one
    // register or of a bound pair.
    void rotate_hextuple(const std::string& name, const std::array<double, 3>& axis, double theta);
    void rotate_dodectuple(const std::string& a, const std::string& b,
                           const std::array<double, 3>& axis, double theta);

    // op 5: measure {Pi_AB, 1 - Pi_AB}. Pass a seed to sample, or force the
    // outcome (classical postselection). On success the pair is bound.
    BindResult attempt_binding(const std::string& a, const std::string& b,
                               std::optional<std::uint64_t> seed,
                               std::optional<bool> force_outcome = std::nullopt);

    // op 6b: unbind without touching the state.
    void separate(const std::string& a, const std::string& b);

    // ops 3c / 6c: dissolve register(s); labels become free, state untouched.
    void hydrolyze(const std::string& name);
    void hydrolyze_pair(const std::string& a, const std::string& b);

    // Dense Pi_AB on the 4096-dim pair space (verification only; the machine
    // itself applies projectors in factored form).
    DenseOperator build_binding_projector(const std::string& a, const std::string& b) const;

    // tr expectation of Pi_{tau=j} on one register.
    double tau_weight(const std::string& name, int j) const;

    // Apply Pi_{tau=0} to one register, renormalizing; throws if annihilated.
    void project_tau0(const std::string& name);

    const QState& state() const { return state_; }
    void set_state(QState s);
    const std::map<std::string, PosnerRegister>& posners() const { return posners_; }
    const std::set<std::pair<std::string, std::string>>& bound_pairs() const { return bound_pairs_; }
    bool is_bound(const std::string& name) const;
    int num_qubits() const { return state_valid_ ? state_.num_qubits() : 0; }

    void check_invariants() const;

    // Pi_AB analysed on span{|1t,1t>,...,|2t,2t>}: acts as the Psi Bell-pair
    // projector sum, 1 - Pi_AB as the Phi sum, under 1t -> 0, 2t -> 1.
    static CoarseBellReport coarse_bell_check();

private:
    const PosnerRegister& posner(const std::string& name) const;
    void require_unbound(const std::string& name) const;

    // |psi> -> (C_A^k (x) C_B^k) |psi> (amplitude permutation, no matrices).
    Vector apply_ck_pair(const Vector& amp, const PosnerRegister& a, const PosnerRegister& b,
                         int k) const;
    Vector apply_binding_projector(const Vector& amp, const PosnerRegister& a,
                                   const PosnerRegister& b) const;

    QState state_ = QState::pure((Vector(1) << Complex(1.0)).finished(), {});
    bool state_valid_ = true;
    std::map<std::string, PosnerRegister> posners_;
    std::set<std::pair<std::string, std::string>> bound_pairs_;
    int next_label_ = 0;
};

// Executes a JSON program (array of {op, args..., seed?}) against a fresh
// machine and returns a JSON trace of outcomes and probabilities.
std::string run_script(const std::string& program_json);

}  // namespace posner
