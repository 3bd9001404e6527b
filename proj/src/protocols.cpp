#include "posner/protocols.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "posner/machine.hpp"

namespace posner {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

Vector singlet_product(int n, const std::vector<std::pair<int, int>>& pairs) {
    // positions not covered must not exist; caller guarantees full coverage
    std::vector<int> order;
    Vector st(1);
    st(0) = 1.0;
    const double r2 = 1.0 / std::sqrt(2.0);
    for (const auto& [a, b] : pairs) {
        Vector next = Vector::Zero(st.size() * 4);
        for (Eigen::Index i = 0; i < st.size(); ++i) {
            next(i * 4 + 1) = st(i) * r2;
            next(i * 4 + 2) = -st(i) * r2;
        }
        st = std::move(next);
        order.push_back(a);
        order.push_back(b);
    }
    // permute from the build order into ascending position order
    Vector out = Vector::Zero(st.size());
    std::vector<int> shift(n);
    for (int q = 0; q < n; ++q) {
        const auto it = std::find(order.begin(), order.end(), q);
        if (it == order.end()) throw std::logic_error("singlet_product: uncovered position");
        shift[q] = static_cast<int>(it - order.begin());
    }
    for (Eigen::Index i = 0; i < st.size(); ++i) {
        std::uint64_t o = 0;
        for (int q = 0; q < n; ++q)
            if ((i >> (n - 1 - shift[q])) & 1) o |= 1ULL << (n - 1 - q);
        out(static_cast<Eigen::Index>(o)) = st(i);
    }
    return out;
}

const std::array<int, 6> kFirstSix = {0, 1, 2, 3, 4, 5};

}  // namespace

QState prepare_phi_theta(double theta) {
    Vector v = singlet_product(6, {{0, 1}, {3, 4}, {2, 5}});
    // Bloch rotation through 2*theta about y on the first spin
    std::vector<int> labels = {0, 1, 2, 3, 4, 5};
    v = apply_unnormalized(build_rotation({0.0, 1.0, 0.0}, 2.0 * theta, 0), v, labels);
    return QState::pure(std::move(v), labels);
}

std::array<double, 3> tau_weights(const QState& s) {
    if (s.num_qubits() != 6) throw std::invalid_argument("tau_weights needs a six-qubit state");
    std::array<double, 3> w{};
    if (s.is_pure()) {
        for (int j = 0; j < 3; ++j) {
            Vector p = apply_tau_projector(s.amplitudes(), 6, kFirstSix, j);
            w[j] = p.squaredNorm();
        }
    } else {
        for (int j = 0; j < 3; ++j) {
            DenseOperator proj = build_tau_projector(j, s.labels());
            w[j] = expectation(s, proj).real();
        }
    }
    return w;
}

TauQutritBasis TauQutritBasis::from_theta(double theta) {
    const QState phi = prepare_phi_theta(theta);
    TauQutritBasis basis;
    basis.theta = theta;
    for (int j = 0; j < 3; ++j) {
        Vector comp = apply_tau_projector(phi.amplitudes(), 6, kFirstSix, j);
        const double norm = comp.norm();
        if (norm < 1e-12)
            throw std::runtime_error("tau sector component vanishes; basis undefined");
        basis.vectors[j] = comp / norm;
    }
    return basis;
}

TauQutritBasis TauQutritBasis::from_vectors(std::array<Vector, 3> vs) {
    TauQutritBasis basis;
    basis.theta = std::nan("");
    for (int j = 0; j < 3; ++j) {
        if (vs[j].size() != 64) throw std::invalid_argument("basis vectors must be 64-dim");
        if (std::abs(vs[j].norm() - 1.0) > kStateTol)
            throw std::invalid_argument("basis vectors must be normalized");
        Vector proj = apply_tau_projector(vs[j], 6, kFirstSix, j);
        if ((proj - vs[j]).norm() > kOperatorTol)
            throw std::invalid_argument("vector " + std::to_string(j) +
                                        " is not a tau=" + std::to_string(j) + " eigenstate");
        basis.vectors[j] = std::move(vs[j]);
    }
    return basis;
}

Vector TauQutritBasis::encode(const std::array<Complex, 3>& c) const {
    double norm2 = 0.0;
    for (const Complex& x : c) norm2 += std::norm(x);
    if (std::abs(norm2 - 1.0) > kStateTol)
        throw std::invalid_argument("qutrit coefficients must be normalized");
    Vector v = Vector::Zero(64);
    for (int j = 0; j < 3; ++j) v += c[j] * vectors[j];
    return v;
}

void SingletPattern::validate() const {
    std::set<int> seen;
    for (const auto& [a, b] : pairs) {
        for (int q : {a, b}) {
            if (q < 0 || q >= 12)
                throw std::invalid_argument("pattern positions must lie in 0..11");
            if (!seen.insert(q).second)
                throw std::invalid_argument("position " + std::to_string(q) +
                                            " appears in two pairs");
        }
    }
}

std::vector<int> SingletPattern::external_legs() const {
    std::set<int> covered;
    for (const auto& [a, b] : pairs) {
        covered.insert(a);
        covered.insert(b);
    }
    std::vector<int> legs;
    for (int q = 0; q < 12; ++q)
        if (!covered.count(q)) legs.push_back(q);
    return legs;
}

namespace {

// Factors of the pattern density matrix: per-factor positions and matrix.
struct Factor {
    std::vector<int> positions;
    Matrix matrix;
};

std::vector<Factor> pattern_factors(const SingletPattern& pattern) {
    pattern.validate();
    std::vector<Factor> factors;
    Matrix singlet = Matrix::Zero(4, 4);
    singlet(1, 1) = 0.5;
    singlet(2, 2) = 0.5;
    singlet(1, 2) = -0.5;
    singlet(2, 1) = -0.5;
    for (const auto& [a, b] : pattern.pairs) factors.push_back({{a, b}, singlet});
    for (int leg : pattern.external_legs())
        factors.push_back({{leg}, Matrix::Identity(2, 2) * 0.5});
    return factors;
}

// tr(P rho) for the permutation (C^k on A positions) x (C^k on B positions),
// rho given as a product of small factors. Runs over the 4096 apex indices.
double trace_ck_pair(const std::vector<Factor>& factors, int k) {
    static constexpr int kSrc[3][6] = {
        {0, 1, 2, 3, 4, 5},
        {2, 0, 1, 5, 3, 4},
        {1, 2, 0, 4, 5, 3},
    };
    Complex total = 0.0;
    for (int m = 0; m < 4096; ++m) {
        int bits[12], pre[12];
        for (int p = 0; p < 12; ++p) bits[p] = (m >> (11 - p)) & 1;
        // pre = C^{-k} applied to the ket index: <pre| rho |bits>
        // P|v> = |perm(v)> with perm(v)[p] = v[src[p]]; <m|P = <pre(m)| where
        // pre(m)[src[p]] = m[p].
        for (int blk = 0; blk < 2; ++blk)
            for (int p = 0; p < 6; ++p) pre[blk * 6 + kSrc[k][p]] = bits[blk * 6 + p];
        Complex prod = 1.0;
        for (const auto& f : factors) {
            int r = 0, c = 0;
            for (int q : f.positions) {
                r = (r << 1) | pre[q];
                c = (c << 1) | bits[q];
            }
            prod *= f.matrix(r, c);
            if (prod == Complex(0.0)) break;
        }
        total += prod;
    }
    return total.real();
}

double binding_probability_factors(const std::vector<Factor>& factors) {
    double p = 0.0;
    for (int k = 0; k < 3; ++k) p += trace_ck_pair(factors, k);
    return p / 3.0;
}

}  // namespace

double binding_probability(const SingletPattern& pattern) {
    return binding_probability_factors(pattern_factors(pattern));
}

double binding_probability_rotated(const SingletPattern& pattern,
                                   const std::array<Matrix, 12>& rotations) {
    std::vector<Factor> factors = pattern_factors(pattern);
    for (auto& f : factors) {
        Matrix u;
        if (f.positions.size() == 2) {
            u = Matrix(4, 4);
            const Matrix& a = rotations[f.positions[0]];
            const Matrix& b = rotations[f.positions[1]];
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) u.block(i * 2, j * 2, 2, 2) = a(i, j) * b;
        } else {
            u = rotations[f.positions[0]];
        }
        f.matrix = u * f.matrix * u.adjoint();
    }
    return binding_probability_factors(factors);
}

Matrix haar_su2(Rng& rng) {
    const double z = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const std::array<double, 3> axis = {s * std::cos(phi), s * std::sin(phi), z};
    double theta;
    for (;;) {
        theta = rng.uniform(0.0, 2.0 * kPi);
        const double h = std::sin(theta / 2);
        if (rng.uniform() <= h * h) break;
    }
    return build_rotation(axis, theta, 0).matrix;
}

RotationAverage random_rotation_average(const SingletPattern& pattern, int n_samples,
                                        std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("need at least one sample");
    Rng rng(seed);
    double sum = 0.0, sum2 = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        std::array<Matrix, 12> us;
        for (int q = 0; q < 12; ++q) us[q] = haar_su2(rng);
        const double p = binding_probability_rotated(pattern, us);
        sum += p;
        sum2 += p * p;
    }
    const double mean = sum / n_samples;
    double stderr_mean = 0.0;
    if (n_samples > 1) {
        const double var = (sum2 - n_samples * mean * mean) / (n_samples - 1);
        stderr_mean = std::sqrt(std::max(0.0, var) / n_samples);
    }
    return {mean, stderr_mean, n_samples};
}

std::array<double, 3> success_distribution(const std::array<Complex, 3>& c) {
    return {std::norm(c[0]), std::norm(c[1]), std::norm(c[2])};
}

std::array<double, 3> failure_distribution(const std::array<Complex, 3>& c) {
    const double q0 = std::norm(c[0]), q1 = std::norm(c[1]), q2 = std::norm(c[2]);
    return {(q1 + q2) / 2, (q2 + q0) / 2, (q0 + q1) / 2};
}

TeleportResult incoherent_teleport(const std::array<Complex, 3>& coefficients,
                                   const TauQutritBasis& basis,
                                   std::optional<std::uint64_t> seed,
                                   std::optional<bool> force_bound) {
    // molecule A on positions 0..5, B on 6..11, C on 12..17
    const Vector psi = basis.encode(coefficients);
    std::array<Complex, 3> plus = {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0),
                                   1.0 / std::sqrt(3.0)};
    const Vector plus_vec = basis.encode(plus);

    // Pi_BC |+t, +t> normalized (the projected pair state)
    Vector bc(4096);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j) bc(i * 64 + j) = plus_vec(i) * plus_vec(j);
    const std::array<int, 6> posB = {0, 1, 2, 3, 4, 5};
    const std::array<int, 6> posC = {6, 7, 8, 9, 10, 11};
    Vector bc_proj = bc;
    for (int k = 1; k < 3; ++k) {
        Vector tmp = apply_c_power(bc, 12, posB, k);
        bc_proj += apply_c_power(tmp, 12, posC, k);
    }
    bc_proj /= 3.0;
    bc_proj /= bc_proj.norm();

    Vector chi(64 * 4096);
    for (int a = 0; a < 64; ++a) chi.segment(Eigen::Index(a) * 4096, 4096) = psi(a) * bc_proj;

    const std::array<int, 6> posA18 = {0, 1, 2, 3, 4, 5};
    const std::array<int, 6> posB18 = {6, 7, 8, 9, 10, 11};
    Vector projected = chi;
    for (int k = 1; k < 3; ++k) {
        Vector tmp = apply_c_power(chi, 18, posA18, k);
        projected += apply_c_power(tmp, 18, posB18, k);
    }
    projected /= 3.0;
    const double p_bind = projected.squaredNorm();

    bool bound;
    if (force_bound) {
        bound = *force_bound;
        if ((bound ? p_bind : 1.0 - p_bind) < 1e-15)
            throw std::runtime_error("forced teleport branch has zero probability");
    } else if (seed) {
        Rng rng(*seed);
        bound = rng.uniform() < p_bind;
    } else {
        throw std::invalid_argument("incoherent_teleport: need a seed or a forced branch");
    }

    Vector branch = bound ? projected : Vector(chi - projected);
    branch /= branch.norm();

    // reduced state of C (last six qubits): rho_C = M^dag M for the
    // (AB-config x C-config) reshape of the branch vector
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        reshaped(branch.data(), 4096, 64);
    Matrix rho_c = reshaped.adjoint() * reshaped;
    rho_c = (rho_c + rho_c.adjoint()).eval() / 2.0;
    std::vector<int> c_labels = {12, 13, 14, 15, 16, 17};
    QState c_state = QState::mixed(std::move(rho_c), c_labels);

    std::array<double, 3> dist{};
    for (int j = 0; j < 3; ++j) {
        Vector comp = apply_tau_projector(branch, 18, {12, 13, 14, 15, 16, 17}, j);
        dist[j] = comp.squaredNorm();
    }
    return {bound, p_bind, std::move(c_state), dist};
}

void tau_zero_cascade(Machine& machine, const std::vector<std::string>& names, bool force_success,
                      std::optional<std::uint64_t> seed) {
    if (names.size() < 3) throw std::invalid_argument("cascade needs at least three molecules");
    for (const auto& n : names)
        if (machine.is_bound(n)) throw std::invalid_argument("cascade molecules must be unbound");

    Rng rng(seed.value_or(0));
    auto step = [&](const std::string& a, const std::string& b) {
        std::optional<std::uint64_t> s;
        std::optional<bool> force;
        if (force_success)
            force = true;
        else
            s = rng.next();
        BindResult r = machine.attempt_binding(a, b, s, force);
        if (r.bound) machine.separate(a, b);
    };
    step(names[0], names[1]);
    step(names[1], names[2]);
    step(names[2], names[0]);
    for (size_t i = 3; i < names.size(); ++i) step(names[i], names[0]);
}

}  // namespace posner
