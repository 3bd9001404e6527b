#include <doctest.h>

#include "posner/qstate.hpp"
#include "posner/rng.hpp"
#include "posner/spin_algebra.hpp"

using namespace posner;

namespace {

QState singlet(int l0, int l1) {
    Vector v = Vector::Zero(4);
    const double r2 = 1.0 / std::sqrt(2.0);
    v(1) = r2;
    v(2) = -r2;
    return QState::pure(std::move(v), {l0, l1});
}

Vector random_state(Rng& rng, int n) {
    Vector v(Eigen::Index(1) << n);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(rng.normal(), rng.normal());
    return v / v.norm();
}

DenseOperator random_unitary(Rng& rng, int label) {
    const double z = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 6.283185307179586);
    const double s = std::sqrt(1.0 - z * z);
    return build_rotation({s * std::cos(phi), s * std::sin(phi), z},
                          rng.uniform(0.0, 6.283185307179586), label);
}

}  // namespace

TEST_CASE("kron basics") {
    DenseOperator i2a{Matrix::Identity(2, 2), {0}};
    DenseOperator i2b{Matrix::Identity(2, 2), {1}};
    DenseOperator i4 = kron(i2a, i2b);
    CHECK((i4.matrix - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(i4.target_labels == std::vector<int>{0, 1});

    // sigma_z (x) sigma_z flips the sign of |01>
    DenseOperator zz = kron(build_pauli('z', 0), build_pauli('z', 1));
    QState s01 = QState::basis_state({0, 1}, {0, 1});
    QState out = apply(zz, s01);
    CHECK(std::abs(out.amplitudes()(1) - Complex(-1.0)) < 1e-15);

    // trace multiplicativity, expected value computed by direct 2x2 multiplies
    Matrix p0(2, 2), pp(2, 2);
    p0 << 1, 0, 0, 0;
    pp << 0.5, 0.5, 0.5, 0.5;
    const Complex direct = p0.trace() * pp.trace();
    DenseOperator k = kron(DenseOperator{p0, {3}}, DenseOperator{pp, {7}});
    CHECK(std::abs(k.matrix.trace() - direct) < 1e-14);

    CHECK_THROWS_AS(kron(i2a, DenseOperator{Matrix::Identity(2, 2), {0}}), std::invalid_argument);
}

TEST_CASE("apply embeds operators by label") {
    QState zero = QState::basis_state({0}, {0});
    QState flipped = apply(build_pauli('x', 0), zero);
    CHECK(std::abs(flipped.amplitudes()(1) - Complex(1.0)) < 1e-15);

    // pi rotation about y maps |0> to |1> up to a global phase
    QState rot = apply(build_rotation({0, 1, 0}, 3.14159265358979323846, 0), zero);
    CHECK(std::abs(std::abs(rot.amplitudes()(1)) - 1.0) < 1e-12);

    // permutation operator on a six-qubit basis state
    QState s = QState::basis_state({1, 0, 0, 0, 0, 0}, {0, 1, 2, 3, 4, 5});
    QState moved = apply(build_c_operator({0, 1, 2, 3, 4, 5}), s);
    QState want = QState::basis_state({0, 1, 0, 0, 0, 0}, {0, 1, 2, 3, 4, 5});
    CHECK(moved.overlap(want) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(apply(build_pauli('x', 9), zero), std::invalid_argument);

    // mixed states are conjugated
    QState mm = QState::maximally_mixed({0});
    QState after = apply(build_pauli('x', 0), mm);
    CHECK((after.density() - mm.density()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("partial trace") {
    QState pair = singlet(0, 1);
    QState half = partial_trace(pair, {0});
    CHECK((half.density() - Matrix::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff() < 1e-12);

    QState zz = QState::basis_state({0, 0}, {0, 1});
    QState first = partial_trace(zz, {0});
    Matrix want(2, 2);
    want << 1, 0, 0, 0;
    CHECK((first.density() - want).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(partial_trace(pair, {}), std::invalid_argument);

    // requested label order is honored
    Rng rng(5);
    QState s = QState::pure(random_state(rng, 3), {7, 8, 9});
    QState a = partial_trace(s, {7, 9});
    QState b = partial_trace(s, {9, 7});
    QState b_reordered = reorder_labels(b, {7, 9});
    CHECK((a.density() - b_reordered.density()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("discarded-qubit unitaries do not affect the reduced state") {
    Rng rng(11);
    QState s = QState::pure(random_state(rng, 4), {0, 1, 2, 3});
    QState reduced = partial_trace(s, {0, 1});
    for (int trial = 0; trial < 5; ++trial) {
        QState t = apply(random_unitary(rng, 2), s);
        t = apply(random_unitary(rng, 3), t);
        QState reduced2 = partial_trace(t, {0, 1});
        CHECK((reduced.density() - reduced2.density()).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("measure_pvm") {
    Matrix p0(2, 2), p1(2, 2);
    p0 << 1, 0, 0, 0;
    p1 << 0, 0, 0, 1;
    std::vector<DenseOperator> pvm = {{p0, {0}}, {p1, {0}}};

    Vector plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    QState s = QState::pure(plus, {0});
    PvmResult r = measure_pvm(s, pvm, 1234);
    CHECK(r.probabilities[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.probabilities[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.probabilities[0] + r.probabilities[1] == doctest::Approx(1.0).epsilon(1e-12));
    r.post_state.check_invariants();

    // incomplete PVM rejected
    CHECK_THROWS_AS(measure_pvm(s, {pvm[0]}, 1), std::invalid_argument);
    // non-idempotent element rejected
    Matrix h(2, 2);
    h << 0.5, 0.5, 0.5, -0.5;
    CHECK_THROWS_AS(measure_pvm(s, {DenseOperator{h, {0}}, DenseOperator{h, {0}}}, 1),
                    std::invalid_argument);
    // forcing a zero-probability branch fails
    QState zero = QState::basis_state({0}, {0});
    CHECK_THROWS_AS(measure_pvm(zero, pvm, std::nullopt, 1), std::runtime_error);

    // deterministic branch: projector onto the singlet fires with certainty
    QState pair = singlet(0, 1);
    Matrix proj = pair.as_density();
    std::vector<DenseOperator> pvm2 = {
        {proj, {0, 1}}, {Matrix::Identity(4, 4) - proj, {0, 1}}};
    PvmResult r2 = measure_pvm(pair, pvm2, 9);
    CHECK(r2.outcome == 0);
    CHECK(r2.probability == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mixed-state failure branch matches the explicit update formula") {
    Rng rng(21);
    Matrix g(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    QState s = QState::mixed(rho, {0, 1});

    QState pair = singlet(0, 1);
    Matrix proj = pair.as_density();
    std::vector<DenseOperator> pvm = {
        {proj, {0, 1}}, {Matrix::Identity(4, 4) - proj, {0, 1}}};
    PvmResult fail = measure_pvm(s, pvm, std::nullopt, 1);

    const Matrix anti = proj * rho + rho * proj;
    Matrix explicit_update = rho - anti + proj * rho * proj;
    explicit_update /= 1.0 - (proj * rho).trace().real();
    CHECK((fail.post_state.density() - explicit_update).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("expectation values") {
    QState zero = QState::basis_state({0}, {0});
    CHECK(expectation(zero, build_pauli('z', 0)).real() == doctest::Approx(1.0));
    QState pair = singlet(0, 1);
    DenseOperator zz = kron(build_pauli('z', 0), build_pauli('z', 1));
    CHECK(expectation(pair, zz).real() == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("label permutation invariance") {
    Rng rng(31);
    Vector amp = random_state(rng, 3);
    QState s = QState::pure(amp, {0, 1, 2});
    QState t = reorder_labels(s, {2, 0, 1});
    DenseOperator op = kron(build_pauli('x', 0), build_pauli('z', 2));
    CHECK(std::abs(expectation(s, op) - expectation(t, op)) < 1e-12);
    QState rs = partial_trace(s, {1});
    QState rt = partial_trace(t, {1});
    CHECK((rs.density() - rt.density()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("state invariants and caps") {
    Vector bad(2);
    bad << 1.0, 1.0;  // unnormalized
    CHECK_THROWS_AS(QState::pure(bad, {0}), std::runtime_error);

    Matrix nh(2, 2);
    nh << 0.5, 0.3, 0.1, 0.5;  // not Hermitian
    CHECK_THROWS_AS(QState::mixed(nh, {0}), std::runtime_error);

    std::vector<int> many(19);
    for (int i = 0; i < 19; ++i) many[i] = i;
    CHECK_THROWS_AS(QState::pure(Vector::Zero(Eigen::Index(1) << 19), many),
                    std::invalid_argument);
}

TEST_CASE("json round trip") {
    Rng rng(47);
    QState s = QState::pure(random_state(rng, 2), {4, 5});
    QState back = QState::from_json(s.to_json());
    CHECK(back.labels() == s.labels());
    CHECK(s.overlap(back) == doctest::Approx(1.0).epsilon(1e-12));

    QState m = partial_trace(s, {4});
    QState mback = QState::from_json(m.to_json());
    CHECK((m.density() - mback.density()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("rng determinism and split") {
    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng c(99);
    Rng child = c.split();
    CHECK(child.next() != c.next());
}
