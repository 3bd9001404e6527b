#include "posner/codes.hpp"

#include <json.hpp>
#include <stdexcept>

#include "posner/spin_algebra.hpp"

using json = nlohmann::json;

namespace posner {

void Code::check_orthonormal(double tol) const {
    for (size_t j = 0; j < codewords.size(); ++j)
        for (size_t k = 0; k < codewords.size(); ++k) {
            const Complex g = codewords[j].amplitudes().dot(codewords[k].amplitudes());
            const double want = (j == k) ? 1.0 : 0.0;
            if (std::abs(g - Complex(want)) > tol)
                throw std::runtime_error("codewords not orthonormal in code " + name);
        }
}

namespace {

Vector antisym_pair(const Vector& a, const Vector& b) {
    Vector v(64);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) v(i * 8 + j) = a(i) * b(j) - b(i) * a(j);
    return v / std::sqrt(2.0);
}

}  // namespace

Code build_qutrit_code(const std::vector<int>& six_labels) {
    if (six_labels.size() != 6) throw std::invalid_argument("qutrit code needs six labels");
    const Vector& W = trio_element("W").vector;
    const Vector& Wb = trio_element("Wbar").vector;
    const Vector& w = trio_element("w").vector;
    const Vector& wb = trio_element("wbar").vector;
    const Vector& w2 = trio_element("w2").vector;
    const Vector& w2b = trio_element("w2bar").vector;
    Code code;
    code.name = "qutrit";
    code.codewords.push_back(QState::pure(antisym_pair(W, Wb), six_labels));
    code.codewords.push_back(QState::pure(antisym_pair(w2, w2b), six_labels));
    code.codewords.push_back(QState::pure(antisym_pair(w, wb), six_labels));
    code.check_orthonormal();
    return code;
}

Code build_repetition_code(const std::vector<int>& six_labels) {
    if (six_labels.size() != 6) throw std::invalid_argument("repetition code needs six labels");
    Code code;
    code.name = "repetition";
    code.codewords.push_back(QState::basis_state({0, 0, 0, 0, 0, 0}, six_labels));
    code.codewords.push_back(QState::basis_state({1, 1, 1, 1, 1, 1}, six_labels));
    code.check_orthonormal();
    return code;
}

ErrorSet all_single_qubit_paulis(const std::vector<int>& labels) {
    ErrorSet errors;
    for (int l : labels)
        for (char axis : {'x', 'y', 'z'}) errors.push_back(build_pauli(axis, l));
    return errors;
}

namespace {

std::string pauli_name(const DenseOperator& op) {
    std::string s = "E[";
    for (size_t i = 0; i < op.target_labels.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(op.target_labels[i]);
    }
    return s + "]";
}

CriteriaReport run_criteria(const Code& code, const std::vector<std::pair<std::string, Matrix>>& ops,
                            const std::vector<int>& labels, bool correction, double tol) {
    const int d = code.logical_dim();
    CriteriaReport report;
    report.code_name = code.name;
    report.correction = correction;
    report.pass = true;
    report.worst_violation = 0.0;

    for (const auto& [name, full] : ops) {
        CriteriaEntry entry;
        entry.error_label = name;
        entry.matrix = Matrix(d, d);
        for (int j = 0; j < d; ++j) {
            const Vector& cj = code.codewords[j].amplitudes();
            for (int k = 0; k < d; ++k)
                entry.matrix(j, k) = cj.dot(full * code.codewords[k].amplitudes());
        }
        entry.constant = entry.matrix.trace() / static_cast<double>(d);
        entry.max_violation = 0.0;
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                const Complex want = (j == k) ? entry.constant : Complex(0.0);
                entry.max_violation = std::max(entry.max_violation,
                                               std::abs(entry.matrix(j, k) - want));
            }
        if (entry.max_violation > report.worst_violation) {
            report.worst_violation = entry.max_violation;
            report.worst_entry = entry.error_label;
        }
        if (entry.max_violation > tol) report.pass = false;
        report.entries.push_back(std::move(entry));
    }
    (void)labels;
    return report;
}

// Error operator embedded on the code's full physical space.
Matrix embed(const DenseOperator& op, const std::vector<int>& labels) {
    const Eigen::Index dim = Eigen::Index(1) << labels.size();
    Matrix full(dim, dim);
    // build columns by applying to basis vectors
    for (Eigen::Index c = 0; c < dim; ++c) {
        Vector e = Vector::Zero(dim);
        e(c) = 1.0;
        full.col(c) = apply_unnormalized(op, e, labels);
    }
    return full;
}

}  // namespace

CriteriaReport check_detection(const Code& code, const ErrorSet& errors, double tol) {
    if (code.codewords.empty()) throw std::invalid_argument("empty code");
    const std::vector<int>& labels = code.codewords.front().labels();
    std::vector<std::pair<std::string, Matrix>> ops;
    ops.reserve(errors.size());
    for (const auto& e : errors) ops.emplace_back(pauli_name(e), embed(e, labels));
    return run_criteria(code, ops, labels, false, tol);
}

CriteriaReport check_correction(const Code& code, const ErrorSet& errors, double tol) {
    if (code.codewords.empty()) throw std::invalid_argument("empty code");
    const std::vector<int>& labels = code.codewords.front().labels();
    std::vector<Matrix> embedded;
    embedded.reserve(errors.size());
    for (const auto& e : errors) embedded.push_back(embed(e, labels));
    std::vector<std::pair<std::string, Matrix>> ops;
    for (size_t b = 0; b < errors.size(); ++b)
        for (size_t a = 0; a < errors.size(); ++a)
            ops.emplace_back(pauli_name(errors[b]) + "^dag " + pauli_name(errors[a]),
                             embedded[b].adjoint() * embedded[a]);
    return run_criteria(code, ops, labels, true, tol);
}

std::string CriteriaReport::to_json() const {
    json j;
    j["code"] = code_name;
    j["criteria"] = correction ? "correction" : "detection";
    j["pass"] = pass;
    j["worst_violation"] = worst_violation;
    j["worst_entry"] = worst_entry;
    json ents = json::array();
    for (const auto& e : entries) {
        json je;
        je["error"] = e.error_label;
        je["constant_re"] = e.constant.real();
        je["constant_im"] = e.constant.imag();
        je["max_violation"] = e.max_violation;
        json re = json::array(), im = json::array();
        for (Eigen::Index r = 0; r < e.matrix.rows(); ++r) {
            json rr = json::array(), ri = json::array();
            for (Eigen::Index c = 0; c < e.matrix.cols(); ++c) {
                rr.push_back(e.matrix(r, c).real());
                ri.push_back(e.matrix(r, c).imag());
            }
            re.push_back(rr);
            im.push_back(ri);
        }
        je["matrix_re"] = re;
        je["matrix_im"] = im;
        ents.push_back(je);
    }
    j["entries"] = ents;
    return j.dump(2);
}

}  // namespace posner
