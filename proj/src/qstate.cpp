#include "posner/qstate.hpp"

#include <algorithm>
#include <json.hpp>
#include <set>
#include <stdexcept>

using json = nlohmann::json;

namespace posner {

namespace {

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(Eigen::Index n) {
    int k = 0;
    while ((Eigen::Index(1) << k) < n) ++k;
    return k;
}

void require_distinct(const std::vector<int>& labels) {
    std::set<int> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size())
        throw std::invalid_argument("qubit labels must be distinct");
}

}  // namespace

DenseOperator::DenseOperator(Matrix m, std::vector<int> labels)
    : matrix(std::move(m)), target_labels(std::move(labels)) {
    if (matrix.rows() != matrix.cols())
        throw std::invalid_argument("operator matrix must be square");
    if (!is_power_of_two(matrix.rows()))
        throw std::invalid_argument("operator dimension must be a power of two");
    if ((Eigen::Index(1) << target_labels.size()) != matrix.rows())
        throw std::invalid_argument("operator dimension does not match target label count");
    require_distinct(target_labels);
}

bool DenseOperator::is_unitary(double tol) const {
    Matrix d = matrix.adjoint() * matrix - Matrix::Identity(dim(), dim());
    return d.cwiseAbs().maxCoeff() <= tol;
}

bool DenseOperator::is_hermitian(double tol) const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool DenseOperator::is_projector(double tol) const {
    if (!is_hermitian(tol)) return false;
    return ((matrix * matrix) - matrix).cwiseAbs().maxCoeff() <= tol;
}

DenseOperator kron(const DenseOperator& a, const DenseOperator& b) {
    for (int la : a.target_labels)
        for (int lb : b.target_labels)
            if (la == lb)
                throw std::invalid_argument("kron: target label collision on label " +
                                            std::to_string(la));
    Matrix out(a.dim() * b.dim(), a.dim() * b.dim());
    for (Eigen::Index i = 0; i < a.dim(); ++i)
        for (Eigen::Index j = 0; j < a.dim(); ++j)
            out.block(i * b.dim(), j * b.dim(), b.dim(), b.dim()) = a.matrix(i, j) * b.matrix;
    std::vector<int> labels = a.target_labels;
    labels.insert(labels.end(), b.target_labels.begin(), b.target_labels.end());
    return {std::move(out), std::move(labels)};
}

QState QState::pure(Vector amplitudes, std::vector<int> labels) {
    require_distinct(labels);
    if (!is_power_of_two(amplitudes.size()))
        throw std::invalid_argument("amplitude vector length must be a power of two");
    if (log2_exact(amplitudes.size()) != static_cast<int>(labels.size()))
        throw std::invalid_argument("amplitude length does not match label count");
    if (static_cast<int>(labels.size()) > kMaxQubits)
        throw std::invalid_argument("qubit cap exceeded (n <= 18)");
    QState s(Kind::Pure, std::move(labels));
    s.amp_ = std::move(amplitudes);
    s.check_invariants();
    return s;
}

QState QState::mixed(Matrix rho, std::vector<int> labels) {
    require_distinct(labels);
    if (rho.rows() != rho.cols() || !is_power_of_two(rho.rows()))
        throw std::invalid_argument("density matrix must be square with power-of-two dimension");
    if (log2_exact(rho.rows()) != static_cast<int>(labels.size()))
        throw std::invalid_argument("density dimension does not match label count");
    if (static_cast<int>(labels.size()) > kMaxQubits)
        throw std::invalid_argument("qubit cap exceeded (n <= 18)");
    QState s(Kind::Mixed, std::move(labels));
    s.rho_ = std::move(rho);
    s.check_invariants();
    return s;
}

QState QState::basis_state(const std::vector<int>& bits, std::vector<int> labels) {
    if (bits.size() != labels.size())
        throw std::invalid_argument("bit count must match label count");
    Vector v = Vector::Zero(Eigen::Index(1) << bits.size());
    Eigen::Index idx = 0;
    for (int b : bits) {
        if (b != 0 && b != 1) throw std::invalid_argument("bits must be 0 or 1");
        idx = (idx << 1) | b;
    }
    v(idx) = 1.0;
    return pure(std::move(v), std::move(labels));
}

QState QState::maximally_mixed(std::vector<int> labels) {
    const Eigen::Index d = Eigen::Index(1) << labels.size();
    return mixed(Matrix::Identity(d, d) / static_cast<double>(d), std::move(labels));
}

const Vector& QState::amplitudes() const {
    if (kind_ != Kind::Pure) throw std::logic_error("amplitudes() on a mixed state");
    return amp_;
}

const Matrix& QState::density() const {
    if (kind_ != Kind::Mixed) throw std::logic_error("density() on a pure state");
    return rho_;
}

int QState::position_of(int label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
        throw std::invalid_argument("unknown qubit label " + std::to_string(label));
    return static_cast<int>(it - labels_.begin());
}

Matrix QState::as_density() const {
    if (kind_ == Kind::Mixed) return rho_;
    return amp_ * amp_.adjoint();
}

void QState::check_invariants() const {
    if (kind_ == Kind::Pure) {
        const double norm = amp_.norm();
        if (std::abs(norm - 1.0) > kStateTol)
            throw std::runtime_error("pure state not normalized: |norm-1| = " +
                                     std::to_string(std::abs(norm - 1.0)));
    } else {
        if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kStateTol)
            throw std::runtime_error("density matrix not Hermitian");
        if (std::abs(rho_.trace().real() - 1.0) > kStateTol || std::abs(rho_.trace().imag()) > kStateTol)
            throw std::runtime_error("density matrix trace != 1");
        if (rho_.rows() <= 1024) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < -kStateTol)
                throw std::runtime_error("density matrix has a negative eigenvalue");
        } else {
            // full spectra above ten qubits cost minutes; the diagonal check
            // still catches sign errors from bad constructions
            if (rho_.diagonal().real().minCoeff() < -kStateTol)
                throw std::runtime_error("density matrix has a negative diagonal entry");
        }
    }
}

double QState::overlap(const QState& other) const {
    if (labels_ != other.labels_)
        throw std::invalid_argument("overlap: label lists differ");
    if (is_pure() && other.is_pure())
        return std::abs(amp_.dot(other.amp_));
    // sqrt-fidelity via eigenvalues of rho_a rho_b (both may be mixed)
    Matrix a = as_density(), b = other.as_density();
    Eigen::SelfAdjointEigenSolver<Matrix> ea(a);
    Matrix sq = ea.operatorSqrt();
    Eigen::SelfAdjointEigenSolver<Matrix> em(sq * b * sq);
    double f = 0.0;
    for (Eigen::Index i = 0; i < em.eigenvalues().size(); ++i)
        f += std::sqrt(std::max(0.0, em.eigenvalues()(i)));
    return f;
}

std::string QState::to_json() const {
    json j;
    j["kind"] = is_pure() ? "pure" : "mixed";
    j["n"] = num_qubits();
    j["labels"] = labels_;
    std::vector<double> re, im;
    if (is_pure()) {
        re.reserve(amp_.size());
        im.reserve(amp_.size());
        for (Eigen::Index i = 0; i < amp_.size(); ++i) {
            re.push_back(amp_(i).real());
            im.push_back(amp_(i).imag());
        }
    } else {
        re.reserve(rho_.size());
        im.reserve(rho_.size());
        for (Eigen::Index r = 0; r < rho_.rows(); ++r)
            for (Eigen::Index c = 0; c < rho_.cols(); ++c) {
                re.push_back(rho_(r, c).real());
                im.push_back(rho_(r, c).imag());
            }
    }
    j["re"] = re;
    j["im"] = im;
    return j.dump();
}

QState QState::from_json(const std::string& text) {
    json j = json::parse(text);
    const std::string kind = j.at("kind");
    std::vector<int> labels = j.at("labels").get<std::vector<int>>();
    std::vector<double> re = j.at("re").get<std::vector<double>>();
    std::vector<double> im = j.at("im").get<std::vector<double>>();
    if (re.size() != im.size()) throw std::invalid_argument("re/im length mismatch");
    if (kind == "pure") {
        Vector v(re.size());
        for (size_t i = 0; i < re.size(); ++i) v(i) = Complex(re[i], im[i]);
        return pure(std::move(v), std::move(labels));
    }
    const Eigen::Index d = Eigen::Index(1) << labels.size();
    if (static_cast<Eigen::Index>(re.size()) != d * d)
        throw std::invalid_argument("density entry count mismatch");
    Matrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c)
            m(r, c) = Complex(re[r * d + c], im[r * d + c]);
    return mixed(std::move(m), std::move(labels));
}

namespace {

// Bit positions (from MSB) of the operator targets inside the state order.
std::vector<int> target_positions(const DenseOperator& op, const std::vector<int>& state_labels) {
    std::vector<int> pos;
    pos.reserve(op.target_labels.size());
    for (int label : op.target_labels) {
        auto it = std::find(state_labels.begin(), state_labels.end(), label);
        if (it == state_labels.end())
            throw std::invalid_argument("operator targets unknown label " + std::to_string(label));
        pos.push_back(static_cast<int>(it - state_labels.begin()));
    }
    return pos;
}

}  // namespace

Vector apply_unnormalized(const DenseOperator& op, const Vector& amp,
                          const std::vector<int>& state_labels) {
    const int n = static_cast<int>(state_labels.size());
    const std::vector<int> pos = target_positions(op, state_labels);
    const int k = static_cast<int>(pos.size());
    const Eigen::Index dk = Eigen::Index(1) << k;

    // Shifts from MSB-position to bit index.
    std::vector<int> shift(k);
    for (int i = 0; i < k; ++i) shift[i] = n - 1 - pos[i];

    std::uint64_t rest_mask = (n == 64 ? ~0ULL : (1ULL << n) - 1);
    for (int i = 0; i < k; ++i) rest_mask &= ~(1ULL << shift[i]);

    Vector out = Vector::Zero(amp.size());
    // iterate over untargeted configurations by walking the masked indices
    std::uint64_t rest = 0;
    while (true) {
        // gather the 2^k slice
        Eigen::VectorXcd slice(dk);
        for (Eigen::Index t = 0; t < dk; ++t) {
            std::uint64_t idx = rest;
            for (int i = 0; i < k; ++i)
                if ((t >> (k - 1 - i)) & 1) idx |= 1ULL << shift[i];
            slice(t) = amp(static_cast<Eigen::Index>(idx));
        }
        Eigen::VectorXcd mixed = op.matrix * slice;
        for (Eigen::Index t = 0; t < dk; ++t) {
            std::uint64_t idx = rest;
            for (int i = 0; i < k; ++i)
                if ((t >> (k - 1 - i)) & 1) idx |= 1ULL << shift[i];
            out(static_cast<Eigen::Index>(idx)) = mixed(t);
        }
        if (rest == rest_mask) break;
        rest = (rest - rest_mask) & rest_mask;  // next subset of rest_mask
    }
    return out;
}

QState apply(const DenseOperator& op, const QState& s) {
    if (s.is_pure()) {
        Vector out = apply_unnormalized(op, s.amplitudes(), s.labels());
        return QState::pure(std::move(out), s.labels());
    }
    // conjugate U rho U^dagger, one side at a time via columns
    const Matrix& rho = s.density();
    Matrix tmp(rho.rows(), rho.cols());
    for (Eigen::Index c = 0; c < rho.cols(); ++c)
        tmp.col(c) = apply_unnormalized(op, rho.col(c), s.labels());
    Matrix out(rho.rows(), rho.cols());
    DenseOperator conj_op{op.matrix.conjugate(), op.target_labels};
    for (Eigen::Index r = 0; r < rho.rows(); ++r)
        out.row(r) = apply_unnormalized(conj_op, tmp.row(r).transpose(), s.labels()).transpose();
    return QState::mixed(std::move(out), s.labels());
}

QState partial_trace(const QState& s, const std::vector<int>& keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep list is empty");
    require_distinct(keep);
    const int n = s.num_qubits();
    std::vector<int> keep_pos;
    keep_pos.reserve(keep.size());
    for (int label : keep) keep_pos.push_back(s.position_of(label));

    std::vector<int> drop_pos;
    for (int p = 0; p < n; ++p)
        if (std::find(keep_pos.begin(), keep_pos.end(), p) == keep_pos.end())
            drop_pos.push_back(p);

    const int kq = static_cast<int>(keep_pos.size());
    const int dq = static_cast<int>(drop_pos.size());
    const Eigen::Index dk = Eigen::Index(1) << kq;
    const Eigen::Index dd = Eigen::Index(1) << dq;

    auto index_of = [&](Eigen::Index kcfg, Eigen::Index dcfg) {
        std::uint64_t idx = 0;
        for (int i = 0; i < kq; ++i)
            if ((kcfg >> (kq - 1 - i)) & 1) idx |= 1ULL << (n - 1 - keep_pos[i]);
        for (int i = 0; i < dq; ++i)
            if ((dcfg >> (dq - 1 - i)) & 1) idx |= 1ULL << (n - 1 - drop_pos[i]);
        return static_cast<Eigen::Index>(idx);
    };

    Matrix out = Matrix::Zero(dk, dk);
    if (s.is_pure()) {
        const Vector& a = s.amplitudes();
        Matrix cols(dk, dd);
        for (Eigen::Index d = 0; d < dd; ++d)
            for (Eigen::Index k = 0; k < dk; ++k) cols(k, d) = a(index_of(k, d));
        out.noalias() = cols * cols.adjoint();
    } else {
        const Matrix& rho = s.density();
        for (Eigen::Index r = 0; r < dk; ++r)
            for (Eigen::Index c = 0; c < dk; ++c) {
                Complex sum = 0.0;
                for (Eigen::Index d = 0; d < dd; ++d) sum += rho(index_of(r, d), index_of(c, d));
                out(r, c) = sum;
            }
    }
    return QState::mixed(std::move(out), keep);
}

QState reorder_labels(const QState& s, const std::vector<int>& new_order) {
    if (new_order.size() != s.labels().size())
        throw std::invalid_argument("reorder_labels: label count mismatch");
    const int n = s.num_qubits();
    std::vector<int> src(n);  // new position q reads the old position src[q]
    for (int q = 0; q < n; ++q) src[q] = s.position_of(new_order[q]);

    auto permute_index = [&](Eigen::Index i) {
        std::uint64_t o = 0;
        for (int q = 0; q < n; ++q)
            if ((i >> (n - 1 - src[q])) & 1) o |= 1ULL << (n - 1 - q);
        return static_cast<Eigen::Index>(o);
    };

    if (s.is_pure()) {
        const Vector& a = s.amplitudes();
        Vector out(a.size());
        for (Eigen::Index i = 0; i < a.size(); ++i) out(permute_index(i)) = a(i);
        return QState::pure(std::move(out), new_order);
    }
    const Matrix& rho = s.density();
    Matrix out(rho.rows(), rho.cols());
    for (Eigen::Index r = 0; r < rho.rows(); ++r)
        for (Eigen::Index c = 0; c < rho.cols(); ++c)
            out(permute_index(r), permute_index(c)) = rho(r, c);
    return QState::mixed(std::move(out), new_order);
}

std::vector<double> pvm_probabilities(const QState& s, const std::vector<DenseOperator>& projectors) {
    std::vector<double> p;
    p.reserve(projectors.size());
    for (const auto& proj : projectors) {
        const Complex e = expectation(s, proj);
        p.push_back(std::max(0.0, e.real()));
    }
    return p;
}

PvmResult measure_pvm(const QState& s, const std::vector<DenseOperator>& projectors,
                      std::optional<std::uint64_t> rng_seed, std::optional<int> forced_outcome) {
    if (projectors.empty()) throw std::invalid_argument("measure_pvm: empty PVM");
    // completeness and idempotence
    for (const auto& proj : projectors)
        if (!proj.is_projector(kOperatorTol))
            throw std::invalid_argument("measure_pvm: element is not a projector");
    Matrix sum = Matrix::Zero(projectors.front().dim(), projectors.front().dim());
    for (const auto& proj : projectors) {
        if (proj.target_labels != projectors.front().target_labels)
            throw std::invalid_argument("measure_pvm: PVM elements must share target labels");
        sum += proj.matrix;
    }
    if ((sum - Matrix::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff() > kOperatorTol)
        throw std::invalid_argument("measure_pvm: projectors do not sum to the identity");

    std::vector<double> probabilities = pvm_probabilities(s, projectors);

    int outcome;
    if (forced_outcome) {
        outcome = *forced_outcome;
        if (outcome < 0 || outcome >= static_cast<int>(projectors.size()))
            throw std::invalid_argument("measure_pvm: forced outcome out of range");
    } else if (rng_seed) {
        Rng rng(*rng_seed);
        const double u = rng.uniform();
        double acc = 0.0;
        outcome = static_cast<int>(projectors.size()) - 1;
        for (size_t i = 0; i < probabilities.size(); ++i) {
            acc += probabilities[i];
            if (u < acc) {
                outcome = static_cast<int>(i);
                break;
            }
        }
    } else {
        throw std::invalid_argument("measure_pvm: need a seed or a forced outcome");
    }

    const double p = probabilities[outcome];
    if (p < 1e-15)
        throw std::runtime_error("measure_pvm: branch has zero probability, cannot renormalize");

    const DenseOperator& proj = projectors[outcome];
    if (s.is_pure()) {
        Vector v = apply_unnormalized(proj, s.amplitudes(), s.labels());
        v /= v.norm();
        return PvmResult{outcome, p, std::move(probabilities), QState::pure(std::move(v), s.labels())};
    }
    // P rho P / tr(P rho); for the complement branch of {P, 1-P} this equals
    // (rho - {P,rho} + P rho P) / (1 - tr(P rho)).
    const Matrix& rho = s.density();
    Matrix tmp(rho.rows(), rho.cols());
    for (Eigen::Index c = 0; c < rho.cols(); ++c)
        tmp.col(c) = apply_unnormalized(proj, rho.col(c), s.labels());
    Matrix out(rho.rows(), rho.cols());
    DenseOperator conj_op{proj.matrix.conjugate(), proj.target_labels};
    for (Eigen::Index r = 0; r < rho.rows(); ++r)
        out.row(r) = apply_unnormalized(conj_op, tmp.row(r).transpose(), s.labels()).transpose();
    out /= out.trace().real();
    return PvmResult{outcome, p, std::move(probabilities), QState::mixed(std::move(out), s.labels())};
}

Complex expectation(const QState& s, const DenseOperator& op) {
    if (s.is_pure()) {
        Vector v = apply_unnormalized(op, s.amplitudes(), s.labels());
        return s.amplitudes().dot(v);
    }
    // tr(O rho) with O embedded: (O rho)(c,c) from column c
    const Matrix& rho = s.density();
    Complex tr = 0.0;
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
        Vector col = apply_unnormalized(op, rho.col(c), s.labels());
        tr += col(c);
    }
    return tr;
}

}  // namespace posner
