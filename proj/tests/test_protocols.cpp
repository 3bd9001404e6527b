#include <doctest.h>

#include "posner/machine.hpp"
#include "posner/protocols.hpp"
#include "posner/rng.hpp"

using namespace posner;

TEST_CASE("phi(theta) weights") {
    for (double theta : {0.0, 0.37, 1.2, 2.7}) {
        const auto w = tau_weights(prepare_phi_theta(theta));
        const double c2 = std::cos(2 * theta);
        CHECK(w[0] == doctest::Approx((c2 + 2) / 6).epsilon(1e-12));
        CHECK(w[1] == doctest::Approx((4 - c2) / 12).epsilon(1e-12));
        CHECK(w[2] == doctest::Approx((4 - c2) / 12).epsilon(1e-12));
    }
    const auto w = tau_weights(prepare_phi_theta(0.7853981633974483));
    for (double x : w) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("tau qutrit basis") {
    const TauQutritBasis basis = TauQutritBasis::from_theta(0.9);
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(basis.vectors[j].norm() - 1.0) < 1e-12);
        Vector proj = apply_tau_projector(basis.vectors[j], 6, {0, 1, 2, 3, 4, 5}, j);
        CHECK((proj - basis.vectors[j]).norm() < 1e-12);
        for (int k = 0; k < j; ++k)
            CHECK(std::abs(basis.vectors[j].dot(basis.vectors[k])) < 1e-12);
    }

    // injection validates sector membership
    std::array<Vector, 3> bad = {basis.vectors[1], basis.vectors[0], basis.vectors[2]};
    CHECK_THROWS_AS(TauQutritBasis::from_vectors(bad), std::invalid_argument);

    std::array<Complex, 3> not_normalized = {1.0, 1.0, 0.0};
    CHECK_THROWS_AS(basis.encode(not_normalized), std::invalid_argument);
}

TEST_CASE("binding probabilities for the tabulated patterns") {
    CHECK(binding_probability({{}}) == doctest::Approx(43.0 / 128.0).epsilon(1e-14));
    CHECK(binding_probability({{{3, 6}, {4, 7}}}) == doctest::Approx(0.34375).epsilon(1e-14));
    CHECK(binding_probability({{{3, 6}, {4, 7}, {5, 8}}}) == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(binding_probability({{{0, 6}, {1, 7}, {2, 8}, {3, 9}, {4, 10}, {5, 11}}}) ==
          doctest::Approx(1.0).epsilon(1e-14));
    // a single bridging singlet evaluates exactly to the baseline
    CHECK(binding_probability({{{3, 6}}}) == doctest::Approx(43.0 / 128.0).epsilon(1e-14));

    SingletPattern overlapping{{{0, 1}, {1, 2}}};
    CHECK_THROWS_AS(binding_probability(overlapping), std::invalid_argument);
}

TEST_CASE("binding probability is invariant under identical singlet-pair rotations") {
    Rng rng(41);
    SingletPattern pattern{{{3, 6}, {4, 7}}};
    const double base = binding_probability(pattern);
    for (int trial = 0; trial < 4; ++trial) {
        std::array<Matrix, 12> us;
        for (auto& u : us) u = Matrix::Identity(2, 2);
        const Matrix u = haar_su2(rng);
        us[3] = u;
        us[6] = u;  // both members of the (3,6) singlet
        CHECK(binding_probability_rotated(pattern, us) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("haar sampling looks uniform on the Bloch sphere") {
    Rng rng(4242);
    const int n = 3000;
    double mx = 0, my = 0, mz = 0;
    for (int i = 0; i < n; ++i) {
        const Matrix u = haar_su2(rng);
        // Bloch vector of U|0>
        const Complex a = u(0, 0), b = u(1, 0);
        mx += 2 * (std::conj(a) * b).real();
        my += 2 * (std::conj(a) * b).imag();
        mz += std::norm(a) - std::norm(b);
    }
    const double norm = std::sqrt(mx * mx + my * my + mz * mz) / n;
    CHECK(norm < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("rotation averaging converges to the baseline") {
    SingletPattern pattern{{{3, 6}, {4, 7}}};
    const RotationAverage avg = random_rotation_average(pattern, 2000, 9001);
    CHECK(std::abs(avg.mean - 43.0 / 128.0) <= 3.0 * avg.stderr_mean);

    // degenerate n = 1 path with identity-like draw is still a probability
    const RotationAverage one = random_rotation_average(pattern, 1, 1);
    CHECK(one.samples == 1);
    CHECK(one.mean >= 0.0);
    CHECK(one.mean <= 1.0);

    // fully entangled pairs average to the baseline as well
    SingletPattern six{{{0, 6}, {1, 7}, {2, 8}, {3, 9}, {4, 10}, {5, 11}}};
    const RotationAverage avg6 = random_rotation_average(six, 2000, 777);
    CHECK(std::abs(avg6.mean - 43.0 / 128.0) <= 4.0 * avg6.stderr_mean);
}

TEST_CASE("incoherent teleportation of a deterministic sector state") {
    const TauQutritBasis basis = TauQutritBasis::from_theta(0.7853981633974483);
    std::array<Complex, 3> c = {1.0, 0.0, 0.0};

    const TeleportResult succ = incoherent_teleport(c, basis, std::nullopt, true);
    CHECK(succ.c_sector_distribution[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(succ.c_sector_distribution[1] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(succ.c_sector_distribution[2] == doctest::Approx(0.0).epsilon(1e-10));

    const TeleportResult fail = incoherent_teleport(c, basis, std::nullopt, false);
    CHECK(fail.c_sector_distribution[0] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(fail.c_sector_distribution[1] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fail.c_sector_distribution[2] == doctest::Approx(0.5).epsilon(1e-10));

    // both calls evaluate the same Born probability for the bound branch
    CHECK(succ.p_bind == doctest::Approx(fail.p_bind).epsilon(1e-12));
    CHECK(succ.p_bind == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    succ.c_state.check_invariants();
}

TEST_CASE("teleportation distributions and the superdense accounting") {
    Rng rng(2024);
    const TauQutritBasis basis = TauQutritBasis::from_theta(0.33);
    for (int trial = 0; trial < 10; ++trial) {
        std::array<Complex, 3> c;
        double n2 = 0;
        for (auto& x : c) {
            x = Complex(rng.normal(), rng.normal());
            n2 += std::norm(x);
        }
        for (auto& x : c) x /= std::sqrt(n2);

        const TeleportResult succ = incoherent_teleport(c, basis, std::nullopt, true);
        const TeleportResult fail = incoherent_teleport(c, basis, std::nullopt, false);
        const auto ws = success_distribution(c);
        const auto wf = failure_distribution(c);
        for (int j = 0; j < 3; ++j) {
            CHECK(succ.c_sector_distribution[j] == doctest::Approx(ws[j]).epsilon(1e-9));
            CHECK(fail.c_sector_distribution[j] == doctest::Approx(wf[j]).epsilon(1e-9));
        }
        // branch probabilities are a distribution
        CHECK(succ.p_bind == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

        // the weights reconstruct exactly from the failure-branch record:
        // q_j = 1 - 2 p'_j
        for (int j = 0; j < 3; ++j)
            CHECK(1.0 - 2.0 * fail.c_sector_distribution[j] ==
                  doctest::Approx(ws[j]).epsilon(1e-9));
    }
}

TEST_CASE("sampled teleportation runs are seed-deterministic") {
    const TauQutritBasis basis = TauQutritBasis::from_theta(0.5);
    std::array<Complex, 3> c = {0.6, 0.48, 0.64};
    const TeleportResult a = incoherent_teleport(c, basis, 555, std::nullopt);
    const TeleportResult b = incoherent_teleport(c, basis, 555, std::nullopt);
    CHECK(a.bound == b.bound);
    CHECK(a.p_bind == doctest::Approx(b.p_bind));
}

TEST_CASE("tau-zero cascade projects every molecule") {
    Machine m;
    std::vector<std::string> names;
    for (int p = 0; p < 3; ++p) {
        std::array<int, 6> labels{};
        for (int s = 0; s < 3; ++s) {
            auto [a, b] = m.prepare_singlet();
            labels[s] = a;
            labels[3 + s] = b;
        }
        names.push_back("P" + std::to_string(p));
        m.form_posner(names.back(), labels);
    }
    tau_zero_cascade(m, names, true);
    for (const auto& n : names) CHECK(m.tau_weight(n, 0) == doctest::Approx(1.0).epsilon(1e-9));
    m.check_invariants();

    Machine small;
    CHECK_THROWS_AS(tau_zero_cascade(small, {"A", "B"}, true), std::invalid_argument);
}
