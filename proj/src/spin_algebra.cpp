#include "posner/spin_algebra.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace posner {

namespace {

Vector ket3(int b0, int b1, int b2) {
    Vector v = Vector::Zero(8);
    v((b0 << 2) | (b1 << 1) | b2) = 1.0;
    return v;
}

constexpr double kInvSqrt3 = 0.57735026918962576450914878050196;

}  // namespace

Matrix pauli_matrix(char axis) {
    Matrix m(2, 2);
    switch (axis) {
        case 'x': m << 0, 1, 1, 0; break;
        case 'y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
        case 'z': m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("pauli axis must be x, y or z");
    }
    return m;
}

DenseOperator build_pauli(char axis, int label) {
    return {pauli_matrix(axis), {label}};
}

DenseOperator build_rotation(const std::array<double, 3>& axis, double theta, int label) {
    const double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (std::abs(norm - 1.0) > 1e-12)
        throw std::invalid_argument("rotation axis must be a unit vector");
    Matrix h = axis[0] * pauli_matrix('x') + axis[1] * pauli_matrix('y') + axis[2] * pauli_matrix('z');
    Matrix u = std::cos(theta / 2) * Matrix::Identity(2, 2) -
               Complex(0, 1) * std::sin(theta / 2) * h;
    return {std::move(u), {label}};
}

DenseOperator build_c_operator(const std::vector<int>& six_labels) {
    if (six_labels.size() != 6)
        throw std::invalid_argument("C operator needs exactly six labels");
    // new position p takes the old value at src[p]
    static constexpr int src[6] = {2, 0, 1, 5, 3, 4};
    Matrix c = Matrix::Zero(64, 64);
    for (int b = 0; b < 64; ++b) {
        int bits[6];
        for (int p = 0; p < 6; ++p) bits[p] = (b >> (5 - p)) & 1;
        int nb = 0;
        for (int p = 0; p < 6; ++p) nb = (nb << 1) | bits[src[p]];
        c(nb, b) = 1.0;
    }
    return {std::move(c), six_labels};
}

DenseOperator build_tau_projector(int j, const std::vector<int>& six_labels) {
    if (j < 0 || j > 2) throw std::invalid_argument("tau sector must be 0, 1 or 2");
    DenseOperator c = build_c_operator(six_labels);
    const Complex omega_pow[3] = {1.0, kOmega, kOmega * kOmega};
    Matrix acc = Matrix::Identity(64, 64);
    Matrix ck = Matrix::Identity(64, 64);
    for (int k = 1; k < 3; ++k) {
        ck = c.matrix * ck;
        acc += omega_pow[(3 - (j * k) % 3) % 3] * ck;  // omega^{-jk}
    }
    return {acc / 3.0, six_labels};
}

DenseOperator build_sz_total(const std::vector<int>& labels) {
    const int n = static_cast<int>(labels.size());
    const Eigen::Index d = Eigen::Index(1) << n;
    Matrix m = Matrix::Zero(d, d);
    for (Eigen::Index b = 0; b < d; ++b) {
        double mz = 0.0;
        for (int p = 0; p < n; ++p) mz += ((b >> (n - 1 - p)) & 1) ? -0.5 : 0.5;
        m(b, b) = mz;
    }
    return {std::move(m), labels};
}

DenseOperator build_s2_trio(const std::vector<int>& three_labels) {
    if (three_labels.size() != 3)
        throw std::invalid_argument("trio spin-squared needs exactly three labels");
    Matrix total = Matrix::Zero(8, 8);
    for (char axis : {'x', 'y', 'z'}) {
        Matrix s = 0.5 * pauli_matrix(axis);
        Matrix sum = Matrix::Zero(8, 8);
        for (int q = 0; q < 3; ++q) {
            Matrix term = Matrix::Identity(1, 1);
            for (int p = 0; p < 3; ++p) {
                Matrix f = (p == q) ? s : Matrix::Identity(2, 2);
                Matrix next(term.rows() * 2, term.cols() * 2);
                for (Eigen::Index i = 0; i < term.rows(); ++i)
                    for (Eigen::Index jj = 0; jj < term.cols(); ++jj)
                        next.block(i * 2, jj * 2, 2, 2) = term(i, jj) * f;
                term = std::move(next);
            }
            sum += term;
        }
        total += sum * sum;
    }
    return {std::move(total), three_labels};
}

DenseOperator build_s32_projector(const std::vector<int>& three_labels) {
    if (three_labels.size() != 3)
        throw std::invalid_argument("s=3/2 projector needs exactly three labels");
    Matrix p = Matrix::Zero(8, 8);
    for (const auto& el : build_trio_basis())
        if (el.s123 > 1.0) p += el.vector * el.vector.adjoint();
    return {std::move(p), three_labels};
}

const std::vector<TrioBasisElement>& build_trio_basis() {
    static const std::vector<TrioBasisElement> basis = [] {
        const Complex w = kOmega, w2 = kOmega * kOmega;
        std::vector<TrioBasisElement> b;
        b.push_back({"000", ket3(0, 0, 0), 1.5, 1.5, 0});
        b.push_back({"W", kInvSqrt3 * (ket3(1, 0, 0) + ket3(0, 1, 0) + ket3(0, 0, 1)), 1.5, 0.5, 0});
        b.push_back({"Wbar", kInvSqrt3 * (ket3(0, 1, 1) + ket3(1, 0, 1) + ket3(1, 1, 0)), 1.5, -0.5, 0});
        b.push_back({"111", ket3(1, 1, 1), 1.5, -1.5, 0});
        b.push_back({"w", kInvSqrt3 * (ket3(1, 0, 0) + w2 * ket3(0, 1, 0) + w * ket3(0, 0, 1)), 0.5, 0.5, 1});
        b.push_back({"wbar", kInvSqrt3 * (ket3(0, 1, 1) + w2 * ket3(1, 0, 1) + w * ket3(1, 1, 0)), 0.5, -0.5, 1});
        b.push_back({"w2", kInvSqrt3 * (ket3(1, 0, 0) + w * ket3(0, 1, 0) + w2 * ket3(0, 0, 1)), 0.5, 0.5, 2});
        b.push_back({"w2bar", kInvSqrt3 * (ket3(0, 1, 1) + w * ket3(1, 0, 1) + w2 * ket3(1, 1, 0)), 0.5, -0.5, 2});
        return b;
    }();
    return basis;
}

const TrioBasisElement& trio_element(const std::string& name) {
    for (const auto& el : build_trio_basis())
        if (el.name == name) return el;
    throw std::invalid_argument("unknown trio basis element: " + name);
}

namespace {

// Sector tables: ordered pairs of trio-element names, tau = 0, 1, 2.
const std::vector<std::pair<const char*, const char*>> kTau0 = {
    {"000", "000"}, {"000", "W"}, {"000", "Wbar"}, {"000", "111"},
    {"W", "000"}, {"W", "W"}, {"W", "Wbar"}, {"W", "111"},
    {"Wbar", "000"}, {"Wbar", "W"}, {"Wbar", "Wbar"}, {"Wbar", "111"},
    {"111", "000"}, {"111", "W"}, {"111", "Wbar"}, {"111", "111"},
    {"w", "w2"}, {"w", "w2bar"}, {"w2", "w"}, {"w2", "wbar"},
    {"wbar", "w2"}, {"wbar", "w2bar"}, {"w2bar", "w"}, {"w2bar", "wbar"}};

const std::vector<std::pair<const char*, const char*>> kTau1 = {
    {"000", "w"}, {"000", "wbar"}, {"W", "w"}, {"W", "wbar"},
    {"Wbar", "w"}, {"Wbar", "wbar"}, {"111", "w"}, {"111", "wbar"},
    {"w", "000"}, {"w", "W"}, {"w", "Wbar"}, {"w", "111"},
    {"w2", "w2"}, {"w2", "w2bar"},
    {"wbar", "000"}, {"wbar", "W"}, {"wbar", "Wbar"}, {"wbar", "111"},
    {"w2bar", "w2"}, {"w2bar", "w2bar"}};

const std::vector<std::pair<const char*, const char*>> kTau2 = {
    {"000", "w2"}, {"000", "w2bar"}, {"W", "w2"}, {"W", "w2bar"},
    {"Wbar", "w2"}, {"Wbar", "w2bar"}, {"111", "w2"}, {"111", "w2bar"},
    {"w", "w"}, {"w", "wbar"},
    {"w2", "000"}, {"w2", "W"}, {"w2", "Wbar"}, {"w2", "111"},
    {"wbar", "w"}, {"wbar", "wbar"},
    {"w2bar", "000"}, {"w2bar", "W"}, {"w2bar", "Wbar"}, {"w2bar", "111"}};

}  // namespace

const std::vector<ChargeBasisElement>& build_charge_basis() {
    static const std::vector<ChargeBasisElement> basis = [] {
        std::vector<ChargeBasisElement> out;
        out.reserve(64);
        const std::vector<std::pair<int, const std::vector<std::pair<const char*, const char*>>*>>
            tables = {{0, &kTau0}, {1, &kTau1}, {2, &kTau2}};
        for (const auto& [tau, table] : tables) {
            int k = 0;
            for (const auto& [an, bn] : *table) {
                const TrioBasisElement& a = trio_element(an);
                const TrioBasisElement& b = trio_element(bn);
                ChargeBasisElement el;
                el.name = "c^" + std::to_string(++k) + "_(tau=" + std::to_string(tau) + ")";
                el.vector = Vector(64);
                for (int i = 0; i < 8; ++i)
                    for (int j = 0; j < 8; ++j)
                        el.vector(i * 8 + j) = a.vector(i) * b.vector(j);
                el.tau = tau;
                el.s123 = a.s123;
                el.s456 = b.s123;
                el.m123 = a.m123;
                el.m456 = b.m123;
                el.m16 = a.m123 + b.m123;
                el.tau123 = a.tau123;
                el.tau456 = b.tau123;
                el.decomposition = "|" + a.name + ">|" + b.name + ">";
                if ((a.tau123 + b.tau123) % 3 != tau)
                    throw std::logic_error("charge-basis table inconsistency");
                out.push_back(std::move(el));
            }
        }
        return out;
    }();
    return basis;
}

std::string trio_basis_csv() {
    std::ostringstream os;
    os << "state,s123,m123,tau\n";
    for (const auto& el : build_trio_basis())
        os << el.name << "," << el.s123 << "," << el.m123 << "," << el.tau123 << "\n";
    return os.str();
}

Vector apply_c_power(const Vector& amp, int n, const std::array<int, 6>& positions, int k) {
    static constexpr int kSrc[3][6] = {
        {0, 1, 2, 3, 4, 5},
        {2, 0, 1, 5, 3, 4},
        {1, 2, 0, 4, 5, 3},
    };
    k = ((k % 3) + 3) % 3;
    if (k == 0) return amp;

    // the permuted index only depends on the six targeted bits; precompute the
    // 64 masked rewrites and sweep the vector once
    std::uint64_t clear_mask = 0;
    for (int p = 0; p < 6; ++p) clear_mask |= 1ULL << (n - 1 - positions[p]);
    std::array<std::uint64_t, 64> gather_mask{}, rewrite{};
    for (int cfg = 0; cfg < 64; ++cfg) {
        std::uint64_t in_bits = 0, out_bits = 0;
        for (int p = 0; p < 6; ++p)
            if ((cfg >> (5 - p)) & 1) in_bits |= 1ULL << (n - 1 - positions[p]);
        for (int p = 0; p < 6; ++p) {
            const int srcbit = (cfg >> (5 - kSrc[k][p])) & 1;
            if (srcbit) out_bits |= 1ULL << (n - 1 - positions[p]);
        }
        gather_mask[cfg] = in_bits;
        rewrite[cfg] = out_bits;
    }
    Vector out(amp.size());
    for (Eigen::Index i = 0; i < amp.size(); ++i) {
        int cfg = 0;
        for (int p = 0; p < 6; ++p)
            cfg = (cfg << 1) | static_cast<int>((i >> (n - 1 - positions[p])) & 1);
        const std::uint64_t o = (static_cast<std::uint64_t>(i) & ~clear_mask) | rewrite[cfg];
        out(static_cast<Eigen::Index>(o)) = amp(i);
    }
    return out;
}

Vector apply_tau_projector(const Vector& amp, int n, const std::array<int, 6>& positions, int j) {
    const Complex omega_pow[3] = {1.0, kOmega, kOmega * kOmega};
    Vector acc = amp;
    for (int k = 1; k < 3; ++k)
        acc += omega_pow[(3 - (j * k) % 3) % 3] * apply_c_power(amp, n, positions, k);
    return acc / 3.0;
}

std::string charge_basis_csv() {
    std::ostringstream os;
    os << "state,s123,s456,m123,m456,m16,tau123,tau456,tau,decomposition\n";
    for (const auto& el : build_charge_basis())
        os << el.name << "," << el.s123 << "," << el.s456 << "," << el.m123 << "," << el.m456
           << "," << el.m16 << "," << el.tau123 << "," << el.tau456 << "," << el.tau << ","
           << el.decomposition << "\n";
    return os.str();
}

}  // namespace posner
