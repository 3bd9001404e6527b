#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "posner/qstate.hpp"

namespace posner {

// A desk-scale fragment of the trivalent singlet lattice. Triangles carry
// three legs each; every posner pairs two triangles through leg 2 (the
// intra-molecule bond). Every edge joins a plus triangle (first of its
// posner) to a minus triangle. Legs not covered by an edge are boundary
// stubs, traced to 1/2 identity in the circuit route.
struct Lattice {
    struct Leg {
        int triangle;
        int leg;  // 0, 1, 2
        bool operator==(const Leg&) const = default;
    };
    int num_triangles = 0;
    std::vector<std::pair<Leg, Leg>> edges;
    std::vector<std::pair<int, int>> posners;  // (plus triangle, minus triangle)

    void validate() const;
    bool is_plus(int triangle) const;
    std::vector<Leg> boundary_legs() const;
    int num_posners() const { return static_cast<int>(posners.size()); }

    static Lattice from_json(const std::string& text);
    std::string to_json() const;

    // One posner with an internal bond and four boundary legs.
    static Lattice single_posner();
    // Two posners, all eight external legs paired across (closed, 12 qubits).
    static Lattice two_posner_closed();
    // Two posners sharing a single edge, ten boundary legs (open).
    static Lattice two_posner_open();
};

// PEPS tensor in the printed convention: entries indexed by three physical
// bits, two bond-dimension-2 virtual legs and the bond-dimension-6 leg
// v3 = (v3_tilde, tau). T+ is nonzero only when every virtual leg equals the
// matching physical bit; T- mirrors it with physical bit a3 = 1 - v3_tilde.
struct PepsTensor {
    std::string name;  // "T+" or "T-"
    // [a1a2a3][v1][v2][v3] with v3 = 2 * tau + v3_tilde ... see entry()
    Complex entry(int a1, int a2, int a3, int v1, int v2, int v3) const;
    bool plus;
};

std::pair<PepsTensor, PepsTensor> build_peps_tensors();

// Pack (v3_tilde, tau) into the bond-dimension-6 index.
int v3_index(int v3_tilde, int tau);

struct CircuitBuildResult {
    QState state;            // boundary legs traced out (mixed when open)
    QState state_with_stubs; // pure state including the boundary stub qubits
    std::vector<int> posner_labels_flat;  // 6 labels per posner
    std::vector<int> stub_labels;
    int binding_attempts;    // total attempts in the projection stage
};

// Circuit route: singlets per edge (plus boundary stubs), molecules formed,
// tau = 0 projection of every posner. With force_success the projections are
// postselected; otherwise binding attempts are sampled and a failed attempt is
// refreshed by restoring the pre-attempt state before retrying.
// The projection uses the bind-and-separate schedule when a helper molecule
// fits under the qubit cap, and the equivalent direct sector projection when
// it does not.
CircuitBuildResult build_aklt_prime_circuit(const Lattice& lattice, bool force_success,
                                            std::optional<std::uint64_t> seed = std::nullopt);

// Tensor-network route: contracts the sector-resolved site tensors over the
// lattice bonds. Boundary legs become stub qubits (same layout as the circuit
// route's state_with_stubs).
QState contract_peps(const Lattice& lattice);

// Probability that two lattice posners bind on a first attempt, evaluated on
// their reduced pair state (shared singlets kept, everything else traced).
double first_binding_probability(const Lattice& lattice, int posner_a, int posner_b);

struct SiteSpinResult {
    bool good;          // S^2 x S^2 outcome labeled by the 3/2 pair
    double probability; // of the good outcome
    QState post_state;
};

// Two-outcome PVM {Pi_3/2 x Pi_3/2, complement} on one posner's six qubits.
SiteSpinResult measure_site_spin(const QState& state, const std::array<int, 6>& posner_labels,
                                 std::optional<std::uint64_t> seed,
                                 std::optional<bool> force_good = std::nullopt);

struct PovmFResult {
    int outcome;         // 0 = x, 1 = y, 2 = z
    double probability;
    QState post_state;
    bool off_sector;     // set when the trio was not s = 3/2 to within 1e-6
};

// Site POVM {F_x, F_y, F_z}; complete on the s = 3/2 subspace.
PovmFResult measure_povm_F(const QState& state, const std::array<int, 3>& trio_labels,
                           std::optional<std::uint64_t> seed,
                           std::optional<int> force_outcome = std::nullopt);

}  // namespace posner
