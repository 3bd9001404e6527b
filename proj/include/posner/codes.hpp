#pragma once

#include <string>
#include <vector>

#include "posner/qstate.hpp"

namespace posner {

// A labeled set of orthonormal codewords in a physical qubit space.
struct Code {
    std::string name;
    std::vector<QState> codewords;  // pure states over the same labels
    int logical_dim() const { return static_cast<int>(codewords.size()); }
    void check_orthonormal(double tol = kStateTol) const;
};

using ErrorSet = std::vector<DenseOperator>;

// Per-error (detection) or per-error-pair (correction) criteria data:
// the matrix <j| E |k> resp. <j| Eb^dag Ea |k>, the fitted constant
// (mean diagonal), and the worst deviation from C * delta_jk.
struct CriteriaEntry {
    std::string error_label;
    Matrix matrix;
    Complex constant;
    double max_violation;
};

struct CriteriaReport {
    std::string code_name;
    bool correction;  // false: detection criteria
    std::vector<CriteriaEntry> entries;
    bool pass;
    double worst_violation;
    std::string worst_entry;
    std::string to_json() const;
};

// One Posner <-> one logical qutrit; |j_L> occupies the tau = j sector.
Code build_qutrit_code(const std::vector<int>& six_labels);

// |0_L> = |000000>, |1_L> = |111111>.
Code build_repetition_code(const std::vector<int>& six_labels);

// All 3n single-qubit Paulis on the code's physical qubits.
ErrorSet all_single_qubit_paulis(const std::vector<int>& labels);

CriteriaReport check_detection(const Code& code, const ErrorSet& errors, double tol = kOperatorTol);
CriteriaReport check_correction(const Code& code, const ErrorSet& errors, double tol = kOperatorTol);

}  // namespace posner
