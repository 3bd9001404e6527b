#include <doctest.h>

#include <algorithm>
#include <map>

#include "posner/qstate.hpp"
#include "posner/rng.hpp"
#include "posner/spin_algebra.hpp"

using namespace posner;

namespace {

const std::vector<int> kSix = {0, 1, 2, 3, 4, 5};

std::map<long, int> eigenvalue_multiset(const Matrix& hermitian, double scale = 1e6) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
    std::map<long, int> counts;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        counts[std::lround(es.eigenvalues()(i) * scale)]++;
    return counts;
}

}  // namespace

TEST_CASE("rotations") {
    DenseOperator r0 = build_rotation({0, 0, 1}, 0.0, 0);
    CHECK((r0.matrix - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);

    // y rotation through pi/2 maps |0> to the equal superposition
    QState zero = QState::basis_state({0}, {0});
    QState plus = apply(build_rotation({0, 1, 0}, 1.5707963267948966, 0), zero);
    CHECK(std::abs(plus.amplitudes()(0) - Complex(1 / std::sqrt(2.0))) < 1e-12);
    CHECK(std::abs(plus.amplitudes()(1) - Complex(1 / std::sqrt(2.0))) < 1e-12);

    Rng rng(3);
    for (int i = 0; i < 5; ++i) {
        const double z = rng.uniform(-1.0, 1.0), ph = rng.uniform(0.0, 6.28), th = rng.uniform(0.0, 6.28);
        const double s = std::sqrt(1 - z * z);
        std::array<double, 3> ax = {s * std::cos(ph), s * std::sin(ph), z};
        Matrix prod = build_rotation(ax, th, 0).matrix * build_rotation(ax, -th, 0).matrix;
        CHECK((prod - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(build_rotation(ax, th, 0).is_unitary(1e-12));
    }
    CHECK_THROWS_AS(build_rotation({1, 1, 0}, 1.0, 0), std::invalid_argument);
}

TEST_CASE("permutation operator C") {
    DenseOperator c = build_c_operator(kSix);
    QState all_up = QState::basis_state({0, 0, 0, 0, 0, 0}, kSix);
    CHECK(apply(c, all_up).overlap(all_up) == doctest::Approx(1.0));

    QState one = QState::basis_state({1, 0, 0, 0, 0, 0}, kSix);
    QState moved = apply(c, one);
    CHECK(moved.overlap(QState::basis_state({0, 1, 0, 0, 0, 0}, kSix)) ==
          doctest::Approx(1.0));

    Matrix c3 = c.matrix * c.matrix * c.matrix;
    CHECK((c3 - Matrix::Identity(64, 64)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(c.is_unitary(0.0));
    CHECK_THROWS_AS(build_c_operator({0, 1, 2}), std::invalid_argument);
}

TEST_CASE("tau sector projectors") {
    std::array<DenseOperator, 3> pis = {build_tau_projector(0, kSix), build_tau_projector(1, kSix),
                                        build_tau_projector(2, kSix)};
    const int ranks[3] = {24, 20, 20};
    Matrix sum = Matrix::Zero(64, 64);
    for (int j = 0; j < 3; ++j) {
        CHECK(pis[j].matrix.trace().real() == doctest::Approx(ranks[j]).epsilon(1e-12));
        CHECK(pis[j].is_hermitian(1e-10));
        CHECK((pis[j].matrix * pis[j].matrix - pis[j].matrix).cwiseAbs().maxCoeff() < 1e-10);
        sum += pis[j].matrix;
    }
    CHECK((sum - Matrix::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-12);

    // C Pi_1 = omega Pi_1, by direct matrix multiplication
    Matrix c = build_c_operator(kSix).matrix;
    CHECK((c * pis[1].matrix - kOmega * pis[1].matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("spin operators") {
    DenseOperator sz = build_sz_total(kSix);
    QState all_up = QState::basis_state({0, 0, 0, 0, 0, 0}, kSix);
    CHECK(expectation(all_up, sz).real() == doctest::Approx(3.0));

    DenseOperator s2 = build_s2_trio({0, 1, 2});
    const Vector& w = trio_element("W").vector;
    CHECK((s2.matrix * w - 1.5 * 2.5 * w).cwiseAbs().maxCoeff() < 1e-12);

    // trio spectrum: s = 1/2 twice and s = 3/2 once
    auto trio_counts = eigenvalue_multiset(s2.matrix);
    CHECK(trio_counts[std::lround(0.75 * 1e6)] == 4);
    CHECK(trio_counts[std::lround(3.75 * 1e6)] == 4);

    // spectrum of S2_123 + S2_456 matches the distributed direct sum
    Matrix pair_sum(64, 64);
    Matrix s2m = s2.matrix;
    pair_sum.setZero();
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            pair_sum.block(i * 8, j * 8, 8, 8) += s2m(i, j) * Matrix::Identity(8, 8);
            if (i == j) pair_sum.block(i * 8, j * 8, 8, 8) += s2m;
        }
    auto pair_counts = eigenvalue_multiset(pair_sum);
    CHECK(pair_counts[std::lround(1.5 * 1e6)] == 16);   // (1/2, 1/2) blocks
    CHECK(pair_counts[std::lround(4.5 * 1e6)] == 32);   // mixed blocks
    CHECK(pair_counts[std::lround(7.5 * 1e6)] == 16);   // (3/2, 3/2) block

    // total spin of all six qubits decomposes as 0^5 + 1^9 + 2^5 + 3
    Matrix total = Matrix::Zero(64, 64);
    for (char axis : {'x', 'y', 'z'}) {
        Matrix comp = Matrix::Zero(64, 64);
        for (int q = 0; q < 6; ++q) {
            DenseOperator op = build_pauli(axis, q);
            Matrix embedded(64, 64);
            for (Eigen::Index col = 0; col < 64; ++col) {
                Vector e = Vector::Zero(64);
                e(col) = 1.0;
                embedded.col(col) = apply_unnormalized(op, e, kSix);
            }
            comp += 0.5 * embedded;
        }
        total += comp * comp;
    }
    auto total_counts = eigenvalue_multiset(total);
    CHECK(total_counts[0] == 5);                        // s=0, five copies
    CHECK(total_counts[std::lround(2.0 * 1e6)] == 27);  // s=1, nine copies x dim 3
    CHECK(total_counts[std::lround(6.0 * 1e6)] == 25);  // s=2, five copies x dim 5
    CHECK(total_counts[std::lround(12.0 * 1e6)] == 7);  // s=3, one copy x dim 7
}

TEST_CASE("trio basis matches the tabulated coefficients exactly") {
    const auto& basis = build_trio_basis();
    REQUIRE(basis.size() == 8);
    const double r3 = 1.0 / std::sqrt(3.0);
    const Vector& w = trio_element("W").vector;
    CHECK(w(4).real() == doctest::Approx(r3).epsilon(1e-15));  // |100>
    CHECK(w(2).real() == doctest::Approx(r3).epsilon(1e-15));  // |010>
    CHECK(w(1).real() == doctest::Approx(r3).epsilon(1e-15));  // |001>

    const Vector& omega_el = trio_element("w").vector;
    CHECK(std::abs(omega_el(4) - Complex(r3)) < 1e-15);
    CHECK(std::abs(omega_el(2) - r3 * kOmega * kOmega) < 1e-15);
    CHECK(std::abs(omega_el(1) - r3 * kOmega) < 1e-15);
    CHECK(trio_element("w").tau123 == 1);
    CHECK(trio_element("w").m123 == doctest::Approx(0.5));

    Matrix c3 = Matrix::Zero(8, 8);
    for (int b = 0; b < 8; ++b) {
        const int b0 = (b >> 2) & 1, b1 = (b >> 1) & 1, b2 = b & 1;
        c3((b2 << 2) | (b0 << 1) | b1, b) = 1.0;
    }
    DenseOperator s2 = build_s2_trio({0, 1, 2});
    Matrix sz = Matrix::Zero(8, 8);
    for (int b = 0; b < 8; ++b) {
        double m = 0;
        for (int q = 0; q < 3; ++q) m += ((b >> (2 - q)) & 1) ? -0.5 : 0.5;
        sz(b, b) = m;
    }
    const Complex omega_pow[3] = {1.0, kOmega, kOmega * kOmega};
    for (const auto& el : basis) {
        CHECK(std::abs(el.vector.norm() - 1.0) < 1e-14);
        CHECK((c3 * el.vector - omega_pow[el.tau123] * el.vector).norm() < 1e-12);
        CHECK((s2.matrix * el.vector - el.s123 * (el.s123 + 1) * el.vector).norm() < 1e-12);
        CHECK((sz * el.vector - el.m123 * el.vector).norm() < 1e-12);
    }
}

TEST_CASE("charge basis tables") {
    const auto& basis = build_charge_basis();
    REQUIRE(basis.size() == 64);
    int counts[3] = {0, 0, 0};
    for (const auto& el : basis) counts[el.tau]++;
    CHECK(counts[0] == 24);
    CHECK(counts[1] == 20);
    CHECK(counts[2] == 20);

    // first tau=0 row: |000>|000> with m16 = 3
    CHECK(basis.front().decomposition == "|000>|000>");
    CHECK(basis.front().m16 == doctest::Approx(3.0));

    // quantum numbers satisfied by every element
    Matrix c = build_c_operator(kSix).matrix;
    Matrix sz = build_sz_total(kSix).matrix;
    const Complex omega_pow[3] = {1.0, kOmega, kOmega * kOmega};
    for (const auto& el : basis) {
        CHECK((c * el.vector - omega_pow[el.tau] * el.vector).norm() < 1e-12);
        CHECK((sz * el.vector - el.m16 * el.vector).norm() < 1e-12);
        CHECK(el.m16 == doctest::Approx(el.m123 + el.m456));
    }

    // orthonormality
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = i; j < basis.size(); ++j) {
            const Complex g = basis[i].vector.dot(basis[j].vector);
            CHECK(std::abs(g - Complex(i == j ? 1.0 : 0.0)) < 1e-12);
        }
}

TEST_CASE("commuting charges") {
    Matrix c = build_c_operator(kSix).matrix;
    Matrix sz = build_sz_total(kSix).matrix;
    CHECK((c * sz - sz * c).cwiseAbs().maxCoeff() < 1e-10);

    Matrix s2a = build_s2_trio({0, 1, 2}).matrix;
    Matrix s2b = build_s2_trio({3, 4, 5}).matrix;
    Matrix s2prod(64, 64);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) s2prod.block(i * 8, j * 8, 8, 8) = s2a(i, j) * s2b;
    CHECK((c * s2prod - s2prod * c).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("factored C application agrees with the dense operator") {
    Rng rng(8);
    Vector v(64);
    for (int i = 0; i < 64; ++i) v(i) = Complex(rng.normal(), rng.normal());
    v /= v.norm();
    Matrix c = build_c_operator(kSix).matrix;
    Vector dense = c * c * v;
    Vector fact = apply_c_power(v, 6, {0, 1, 2, 3, 4, 5}, 2);
    CHECK((dense - fact).cwiseAbs().maxCoeff() < 1e-14);

    Vector pj = apply_tau_projector(v, 6, {0, 1, 2, 3, 4, 5}, 1);
    Vector pj_dense = build_tau_projector(1, kSix).matrix * v;
    CHECK((pj - pj_dense).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("csv dumps") {
    const std::string trio = trio_basis_csv();
    CHECK(std::count(trio.begin(), trio.end(), '\n') == 9);  // header + 8 rows
    const std::string charge = charge_basis_csv();
    CHECK(std::count(charge.begin(), charge.end(), '\n') == 65);  // header + 64 rows
}
