#pragma once

#include <array>
#include <string>
#include <vector>

#include "posner/qstate.hpp"

namespace posner {

// omega = exp(+i 2 pi / 3); tau sector labels are stored canonically in {0,1,2}.
inline const Complex kOmega{-0.5, 0.8660254037844386467637231707529362};

Matrix pauli_matrix(char axis);  // 'x', 'y', 'z'

DenseOperator build_pauli(char axis, int label);

// exp(-i (theta/2) n.sigma) on one qubit.
DenseOperator build_rotation(const std::array<double, 3>& axis, double theta, int label);

// 64-dim cyclic permutation |m1 m2 m3 m4 m5 m6> -> |m3 m1 m2 m6 m4 m5>
// on the six ordered labels (positions r1..r6).
DenseOperator build_c_operator(const std::vector<int>& six_labels);

// Pi_{tau=j} = (1/3) sum_k omega^{-jk} C^k.
DenseOperator build_tau_projector(int j, const std::vector<int>& six_labels);

// S^z = sum_i sigma^z_i / 2 over the given labels.
DenseOperator build_sz_total(const std::vector<int>& labels);

// (S_a + S_b + S_c)^2 for a trio, S_i = sigma_i / 2.
DenseOperator build_s2_trio(const std::vector<int>& three_labels);

// Projector onto the s = 3/2 (fully symmetric) subspace of a trio.
DenseOperator build_s32_projector(const std::vector<int>& three_labels);

struct TrioBasisElement {
    std::string name;   // 000, W, Wbar, 111, w, wbar, w2, w2bar
    Vector vector;      // 8-dim
    double s123;        // 1/2 or 3/2
    double m123;        // -3/2 .. 3/2
    int tau123;         // 0, 1, 2
};

struct ChargeBasisElement {
    std::string name;   // c^k_{tau=j}
    Vector vector;      // 64-dim
    int tau;            // 0, 1, 2
    double s123, s456;
    double m123, m456;
    double m16;         // m123 + m456
    int tau123, tau456;
    std::string decomposition;  // e.g. "|W>|Wbar>"
};

// The eight symmetric-basis trio states with their quantum numbers.
const std::vector<TrioBasisElement>& build_trio_basis();

// All 64 products of trio states, grouped by tau = (tau123 + tau456) mod 3
// into sectors of size 24 / 20 / 20, ordered as tabulated.
const std::vector<ChargeBasisElement>& build_charge_basis();

const TrioBasisElement& trio_element(const std::string& name);

// CSV dumps of the basis tables (columns follow the tabulated quantum numbers).
std::string trio_basis_csv();
std::string charge_basis_csv();

// |psi> -> C^k |psi> where C acts on the six given bit positions (0 = MSB)
// of an n-qubit amplitude vector. Pure amplitude permutation.
Vector apply_c_power(const Vector& amp, int n, const std::array<int, 6>& positions, int k);

// Projector Pi_{tau=j} applied in factored form on the six positions.
Vector apply_tau_projector(const Vector& amp, int n, const std::array<int, 6>& positions, int j);

}  // namespace posner
