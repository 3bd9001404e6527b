#include "posner/machine.hpp"

#include <algorithm>
#include <json.hpp>
#include <stdexcept>

using json = nlohmann::json;

namespace posner {

namespace {

std::pair<std::string, std::string> pair_key(const std::string& a, const std::string& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

std::pair<int, int> Machine::prepare_singlet() {
    if (num_qubits() + 2 > kMaxQubits)
        throw std::runtime_error("qubit capacity exceeded (cap 18)");
    const int l0 = next_label_++;
    const int l1 = next_label_++;
    const Vector& old = state_.amplitudes();
    Vector next = Vector::Zero(old.size() * 4);
    const double r2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < old.size(); ++i) {
        next(i * 4 + 1) = old(i) * r2;   // |01>
        next(i * 4 + 2) = -old(i) * r2;  // -|10>
    }
    std::vector<int> labels = state_.labels();
    labels.push_back(l0);
    labels.push_back(l1);
    state_ = QState::pure(std::move(next), std::move(labels));
    return {l0, l1};
}

const PosnerRegister& Machine::form_posner(const std::string& name, const std::array<int, 6>& labels) {
    if (posners_.count(name)) throw std::invalid_argument("posner name already in use: " + name);
    for (int l : labels) {
        state_.position_of(l);  // throws for dead labels
        for (const auto& [n, reg] : posners_)
            if (std::find(reg.labels.begin(), reg.labels.end(), l) != reg.labels.end())
                throw std::invalid_argument("label " + std::to_string(l) + " already owned by " + n);
    }
    std::set<int> distinct(labels.begin(), labels.end());
    if (distinct.size() != 6) throw std::invalid_argument("posner needs six distinct labels");
    auto [it, ok] = posners_.emplace(name, PosnerRegister{name, labels});
    (void)ok;
    return it->second;
}

const PosnerRegister& Machine::posner(const std::string& name) const {
    auto it = posners_.find(name);
    if (it == posners_.end()) throw std::invalid_argument("no such posner: " + name);
    return it->second;
}

bool Machine::is_bound(const std::string& name) const {
    for (const auto& [a, b] : bound_pairs_)
        if (a == name || b == name) return true;
    return false;
}

void Machine::require_unbound(const std::string& name) const {
    if (is_bound(name))
        throw std::runtime_error("posner " + name + " is bound; separate first");
}

void Machine::permute_hextuple(const std::string& name) {
    const PosnerRegister& reg = posner(name);
    require_unbound(name);
    std::array<int, 6> pos{};
    for (int p = 0; p < 6; ++p) pos[p] = state_.position_of(reg.labels[p]);
    Vector out = apply_c_power(state_.amplitudes(), state_.num_qubits(), pos, 1);
    state_ = QState::pure(std::move(out), state_.labels());
}

void Machine::rotate_hextuple(const std::string& name, const std::array<double, 3>& axis,
                              double theta) {
    const PosnerRegister& reg = posner(name);
    require_unbound(name);
    Vector amp = state_.amplitudes();
    for (int l : reg.labels)
        amp = apply_unnormalized(build_rotation(axis, theta, l), amp, state_.labels());
    state_ = QState::pure(std::move(amp), state_.labels());
}

void Machine::rotate_dodectuple(const std::string& a, const std::string& b,
                                const std::array<double, 3>& axis, double theta) {
    if (!bound_pairs_.count(pair_key(a, b)))
        throw std::runtime_error("posners " + a + "," + b + " are not bound");
    Vector amp = state_.amplitudes();
    for (const std::string& name : {a, b})
        for (int l : posner(name).labels)
            amp = apply_unnormalized(build_rotation(axis, theta, l), amp, state_.labels());
    state_ = QState::pure(std::move(amp), state_.labels());
}

Vector Machine::apply_ck_pair(const Vector& amp, const PosnerRegister& a, const PosnerRegister& b,
                              int k) const {
    if (k == 0) return amp;
    const int n = state_.num_qubits();
    std::array<int, 6> pa{}, pb{};
    for (int p = 0; p < 6; ++p) pa[p] = state_.position_of(a.labels[p]);
    for (int p = 0; p < 6; ++p) pb[p] = state_.position_of(b.labels[p]);
    return apply_c_power(apply_c_power(amp, n, pa, k), n, pb, k);
}

Vector Machine::apply_binding_projector(const Vector& amp, const PosnerRegister& a,
                                        const PosnerRegister& b) const {
    // Pi_AB = sum over tau sectors with tau_A + tau_B = 0 (mod 3), which
    // collapses to (1/3) sum_k C_A^k (x) C_B^k.
    Vector out = amp;
    out += apply_ck_pair(amp, a, b, 1);
    out += apply_ck_pair(amp, a, b, 2);
    return out / 3.0;
}

BindResult Machine::attempt_binding(const std::string& a, const std::string& b,
                                    std::optional<std::uint64_t> seed,
                                    std::optional<bool> force_outcome) {
    if (a == b) throw std::invalid_argument("cannot bind a posner to itself");
    const PosnerRegister& ra = posner(a);
    const PosnerRegister& rb = posner(b);
    require_unbound(a);
    require_unbound(b);

    const Vector& amp = state_.amplitudes();
    Vector projected = apply_binding_projector(amp, ra, rb);
    const double p_bind = projected.squaredNorm();

    bool bound;
    if (force_outcome) {
        bound = *force_outcome;
        const double p_branch = bound ? p_bind : 1.0 - p_bind;
        if (p_branch < 1e-15)
            throw std::runtime_error("forced binding outcome has zero probability");
    } else if (seed) {
        Rng rng(*seed);
        bound = rng.uniform() < p_bind;
    } else {
        throw std::invalid_argument("attempt_binding: need a seed or a forced outcome");
    }

    Vector post = bound ? projected : (amp - projected);
    post /= post.norm();
    state_ = QState::pure(std::move(post), state_.labels());
    if (bound) bound_pairs_.insert(pair_key(a, b));
    return {bound, p_bind};
}

void Machine::separate(const std::string& a, const std::string& b) {
    if (!bound_pairs_.erase(pair_key(a, b)))
        throw std::runtime_error("posners " + a + "," + b + " are not bound");
}

void Machine::hydrolyze(const std::string& name) {
    posner(name);
    if (is_bound(name))
        throw std::runtime_error("cannot hydrolyze bound posner " + name + "; separate first");
    posners_.erase(name);
}

void Machine::hydrolyze_pair(const std::string& a, const std::string& b) {
    auto key = pair_key(a, b);
    if (!bound_pairs_.count(key)) throw std::runtime_error("posners are not bound");
    bound_pairs_.erase(key);
    posners_.erase(a);
    posners_.erase(b);
}

DenseOperator Machine::build_binding_projector(const std::string& a, const std::string& b) const {
    if (a == b) throw std::invalid_argument("binding projector needs two distinct posners");
    const PosnerRegister& ra = posner(a);
    const PosnerRegister& rb = posner(b);
    std::vector<int> labels(ra.labels.begin(), ra.labels.end());
    labels.insert(labels.end(), rb.labels.begin(), rb.labels.end());
    DenseOperator c6 = build_c_operator(std::vector<int>(ra.labels.begin(), ra.labels.end()));
    Matrix out = Matrix::Zero(4096, 4096);
    Matrix ck = Matrix::Identity(64, 64);
    for (int k = 0; k < 3; ++k) {
        if (k > 0) ck = c6.matrix * ck;
        for (Eigen::Index i = 0; i < 64; ++i)
            for (Eigen::Index j = 0; j < 64; ++j)
                if (ck(i, j) != Complex(0.0)) out.block(i * 64, j * 64, 64, 64) += ck(i, j) * ck;
    }
    return {out / 3.0, labels};
}

double Machine::tau_weight(const std::string& name, int j) const {
    const PosnerRegister& reg = posner(name);
    std::array<int, 6> pos{};
    for (int p = 0; p < 6; ++p) pos[p] = state_.position_of(reg.labels[p]);
    const Vector& amp = state_.amplitudes();
    Vector proj = apply_tau_projector(amp, state_.num_qubits(), pos, j);
    return proj.squaredNorm();
}

void Machine::project_tau0(const std::string& name) {
    const PosnerRegister& reg = posner(name);
    std::array<int, 6> pos{};
    for (int p = 0; p < 6; ++p) pos[p] = state_.position_of(reg.labels[p]);
    Vector acc = apply_tau_projector(state_.amplitudes(), state_.num_qubits(), pos, 0);
    const double norm = acc.norm();
    if (norm < 1e-12) throw std::runtime_error("tau=0 projection annihilates the state");
    state_ = QState::pure(acc / norm, state_.labels());
}

void Machine::set_state(QState s) {
    if (!s.is_pure()) throw std::invalid_argument("machine state must be pure");
    state_ = std::move(s);
}

void Machine::check_invariants() const {
    state_.check_invariants();
    std::set<int> owned;
    for (const auto& [name, reg] : posners_)
        for (int l : reg.labels) {
            state_.position_of(l);
            if (!owned.insert(l).second)
                throw std::runtime_error("label owned by two posners");
        }
    for (const auto& [a, b] : bound_pairs_)
        if (!posners_.count(a) || !posners_.count(b))
            throw std::runtime_error("bound pair references a dissolved posner");
}

CoarseBellReport Machine::coarse_bell_check() {
    const auto& basis = build_charge_basis();
    std::vector<const ChargeBasisElement*> tau1, tau2;
    for (const auto& el : basis) {
        if (el.tau == 1 && tau1.size() < 2) tau1.push_back(&el);
        if (el.tau == 2 && tau2.size() < 2) tau2.push_back(&el);
    }

    Machine m;  // used only for the factored projector machinery
    PosnerRegister a{"A", {0, 1, 2, 3, 4, 5}};
    PosnerRegister b{"B", {6, 7, 8, 9, 10, 11}};
    std::vector<int> labels(12);
    for (int i = 0; i < 12; ++i) labels[i] = i;

    double worst = 0.0;
    int combos = 0;
    for (const auto* one : tau1)
        for (const auto* two : tau2) {
            ++combos;
            std::array<Vector, 2> v = {one->vector, two->vector};
            // basis {|11>, |12>, |21>, |22>} of the effective two-qubit space
            std::vector<Vector> span;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    Vector prod(4096);
                    for (int x = 0; x < 64; ++x)
                        for (int y = 0; y < 64; ++y) prod(x * 64 + y) = v[i](x) * v[j](y);
                    span.push_back(std::move(prod));
                }
            Machine tmp;
            tmp.state_ = QState::pure(span[0], labels);  // gives position_of a 12-qubit context
            // expected: Pi keeps |12>,|21| (Psi sector), annihilates |11>,|22>
            for (int col = 0; col < 4; ++col) {
                Vector proj = tmp.apply_binding_projector(span[col], a, b);
                for (int row = 0; row < 4; ++row) {
                    const Complex got = span[row].dot(proj);
                    const double want = (row == col && (col == 1 || col == 2)) ? 1.0 : 0.0;
                    worst = std::max(worst, std::abs(got - Complex(want)));
                }
            }
        }
    return {worst, combos};
}

// ---------------------------------------------------------------------------
// Script executor

std::string run_script(const std::string& program_json) {
    json program = json::parse(program_json);
    if (!program.is_array()) throw std::invalid_argument("script must be a JSON array");
    Machine m;
    json trace = json::array();
    for (const auto& ins : program) {
        const std::string op = ins.at("op");
        json rec;
        rec["op"] = op;
        if (op == "prepare_singlet") {
            auto [l0, l1] = m.prepare_singlet();
            rec["labels"] = {l0, l1};
        } else if (op == "form_posner") {
            std::array<int, 6> labels{};
            auto arr = ins.at("labels");
            if (arr.size() != 6) throw std::invalid_argument("form_posner needs 6 labels");
            for (int i = 0; i < 6; ++i) labels[i] = arr[i].get<int>();
            m.form_posner(ins.at("name"), labels);
            rec["name"] = ins.at("name");
        } else if (op == "permute_hextuple") {
            m.permute_hextuple(ins.at("name"));
        } else if (op == "rotate_hextuple" || op == "rotate_dodectuple") {
            auto ax = ins.at("axis");
            std::array<double, 3> axis = {ax[0].get<double>(), ax[1].get<double>(),
                                          ax[2].get<double>()};
            const double theta = ins.at("theta").get<double>();
            if (op == "rotate_hextuple")
                m.rotate_hextuple(ins.at("name"), axis, theta);
            else
                m.rotate_dodectuple(ins.at("a"), ins.at("b"), axis, theta);
        } else if (op == "attempt_binding") {
            std::optional<std::uint64_t> seed;
            std::optional<bool> force;
            if (ins.contains("seed")) seed = ins["seed"].get<std::uint64_t>();
            if (ins.contains("force")) force = ins["force"].get<std::string>() == "bind";
            BindResult r = m.attempt_binding(ins.at("a"), ins.at("b"), seed, force);
            rec["bound"] = r.bound;
            rec["probability"] = r.probability;
        } else if (op == "separate") {
            m.separate(ins.at("a"), ins.at("b"));
        } else if (op == "hydrolyze") {
            m.hydrolyze(ins.at("name"));
        } else if (op == "hydrolyze_pair") {
            m.hydrolyze_pair(ins.at("a"), ins.at("b"));
        } else if (op == "tau_weight") {
            rec["weights"] = {m.tau_weight(ins.at("name"), 0), m.tau_weight(ins.at("name"), 1),
                              m.tau_weight(ins.at("name"), 2)};
        } else {
            throw std::invalid_argument("unknown script op: " + op);
        }
        m.check_invariants();
        trace.push_back(rec);
    }
    json out;
    out["trace"] = trace;
    out["final_qubits"] = m.num_qubits();
    return out.dump(2);
}

}  // namespace posner
