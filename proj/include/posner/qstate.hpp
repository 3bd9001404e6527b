#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "posner/rng.hpp"

namespace posner {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr int kMaxQubits = 18;           // desk-scale cap
inline constexpr double kStateTol = 1e-10;      // state invariants
inline constexpr double kOperatorTol = 1e-9;    // operator identities

// A k-qubit operator together with the qubit ids it acts on. Label order
// matters: label i is the i-th most significant bit of the matrix index.
struct DenseOperator {
    Matrix matrix;
    std::vector<int> target_labels;

    DenseOperator() = default;
    DenseOperator(Matrix m, std::vector<int> labels);

    int num_qubits() const { return static_cast<int>(target_labels.size()); }
    Eigen::Index dim() const { return matrix.rows(); }

    DenseOperator adjoint() const { return {matrix.adjoint(), target_labels}; }
    bool is_unitary(double tol = 1e-12) const;
    bool is_hermitian(double tol = 1e-12) const;
    bool is_projector(double tol = kOperatorTol) const;
};

DenseOperator kron(const DenseOperator& a, const DenseOperator& b);

// Pure state vector or density matrix over labeled qubits.
// Label 0 of the label list is the most significant bit of the basis index.
class QState {
public:
    enum class Kind { Pure, Mixed };

    static QState pure(Vector amplitudes, std::vector<int> labels);
    static QState mixed(Matrix rho, std::vector<int> labels);
    static QState basis_state(const std::vector<int>& bits, std::vector<int> labels);
    static QState maximally_mixed(std::vector<int> labels);

    Kind kind() const { return kind_; }
    bool is_pure() const { return kind_ == Kind::Pure; }
    int num_qubits() const { return static_cast<int>(labels_.size()); }
    Eigen::Index dim() const { return Eigen::Index(1) << num_qubits(); }
    const std::vector<int>& labels() const { return labels_; }
    const Vector& amplitudes() const;
    const Matrix& density() const;

    // Position of a label in the tensor order; throws for unknown labels.
    int position_of(int label) const;

    // Density matrix view regardless of kind (|psi><psi| for pure states).
    Matrix as_density() const;

    void check_invariants() const;  // throws std::runtime_error on violation

    // |<a|b>| for pure states, Uhlmann fidelity otherwise; label sets must match.
    double overlap(const QState& other) const;

    std::string to_json() const;
    static QState from_json(const std::string& text);

private:
    QState(Kind kind, std::vector<int> labels) : kind_(kind), labels_(std::move(labels)) {}

    Kind kind_;
    std::vector<int> labels_;
    Vector amp_;   // pure
    Matrix rho_;   // mixed
};

// Embed `op` on its target labels (identity elsewhere) and apply to `s`.
QState apply(const DenseOperator& op, const QState& s);

// Apply without renormalizing (used for projector arithmetic); pure only.
Vector apply_unnormalized(const DenseOperator& op, const Vector& amp,
                          const std::vector<int>& state_labels);

// Reduced state over `keep` (in the requested order).
QState partial_trace(const QState& s, const std::vector<int>& keep);

// Same state with the labels permuted into the requested order.
QState reorder_labels(const QState& s, const std::vector<int>& new_order);

struct PvmResult {
    int outcome;
    double probability;
    std::vector<double> probabilities;  // full Born distribution
    QState post_state;
};

// Projective measurement. Outcome sampled when a seed is given, otherwise the
// caller must force one via `forced_outcome`. Post state follows the Lueders
// rule; the failure branch of a two-element PVM {P, 1-P} on a mixed state
// reduces to (rho - {P,rho} + P rho P) / (1 - tr(P rho)).
PvmResult measure_pvm(const QState& s, const std::vector<DenseOperator>& projectors,
                      std::optional<std::uint64_t> rng_seed,
                      std::optional<int> forced_outcome = std::nullopt);

std::vector<double> pvm_probabilities(const QState& s, const std::vector<DenseOperator>& projectors);

Complex expectation(const QState& s, const DenseOperator& op);

}  // namespace posner
