#pragma once

#include <array>
#include <optional>
#include <vector>

#include "posner/qstate.hpp"
#include "posner/spin_algebra.hpp"

namespace posner {

// Sector-resolved qutrit basis |0_t>, |1_t>, |2_t> for one molecule.
// Default construction takes the normalized tau-sector components of the
// three-singlet preparation |phi(theta)>.
struct TauQutritBasis {
    std::array<Vector, 3> vectors;  // 64-dim, Pi_{tau=j} v_j = v_j
    double theta;

    static TauQutritBasis from_theta(double theta);
    static TauQutritBasis from_vectors(std::array<Vector, 3> vs);  // injected basis
    Vector encode(const std::array<Complex, 3>& c) const;           // sum_j c_j |j_t>
};

// Three singlets, one per triangle plus one across, with one intra-triangle
// spin rotated about y. The preparation angle theta enters as a Bloch
// rotation through 2*theta, so the sector weights are
// w0 = (cos 2theta + 2)/6 and w1 = w2 = (4 - cos 2theta)/12.
QState prepare_phi_theta(double theta);

std::array<double, 3> tau_weights(const QState& six_qubit_state);

// A two-molecule entanglement pattern on positions 0..11 (A = 0..5, B = 6..11).
// Each pair is a singlet; every uncovered position is an external leg traced
// to 1/2 identity.
struct SingletPattern {
    std::vector<std::pair<int, int>> pairs;
    void validate() const;  // distinct positions in range
    std::vector<int> external_legs() const;
};

// Exact tr(Pi_AB rho) for the pattern state; evaluated in factored form,
// no 4096 x 4096 matrix is built.
double binding_probability(const SingletPattern& pattern);

// Same, with an arbitrary single-qubit unitary applied to each position first.
double binding_probability_rotated(const SingletPattern& pattern,
                                   const std::array<Matrix, 12>& rotations);

struct RotationAverage {
    double mean;
    double stderr_mean;
    int samples;
};

// Monte-Carlo average of the binding probability under independent
// Haar-random single-qubit rotations of all twelve positions.
RotationAverage random_rotation_average(const SingletPattern& pattern, int n_samples,
                                        std::uint64_t seed);

// Haar on SU(2): uniform axis on the sphere, rotation angle on [0, 2*pi) with
// density sin^2(theta/2)/pi (rejection-sampled).
Matrix haar_su2(Rng& rng);

struct TeleportResult {
    bool bound;                        // binding branch of the AB measurement
    double p_bind;                     // probability of the bound branch
    QState c_state;                    // reduced state of molecule C (64-dim)
    std::array<double, 3> c_sector_distribution;
};

// Incoherent teleportation of the weights |c_j|^2 from molecule A to C.
// B and C are prepared in the projected pair state built from |+_t, +_t>.
TeleportResult incoherent_teleport(const std::array<Complex, 3>& coefficients,
                                   const TauQutritBasis& basis,
                                   std::optional<std::uint64_t> seed,
                                   std::optional<bool> force_bound = std::nullopt);

// Expected branch-conditional sector distributions for given weights.
std::array<double, 3> success_distribution(const std::array<Complex, 3>& c);
std::array<double, 3> failure_distribution(const std::array<Complex, 3>& c);

class Machine;

// Proposition-2 schedule: bind-and-separate A-B, B-C, C-A, then every further
// molecule against a projected one. With force_success every register ends
// with Pi_{tau=0} expectation 1.
void tau_zero_cascade(Machine& machine, const std::vector<std::string>& names, bool force_success,
                      std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace posner
