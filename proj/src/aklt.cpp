#include "posner/aklt.hpp"

#include <algorithm>
#include <map>
#include <json.hpp>
#include <set>
#include <stdexcept>

#include "posner/machine.hpp"
#include "posner/protocols.hpp"
#include "posner/spin_algebra.hpp"

using json = nlohmann::json;

namespace posner {

void Lattice::validate() const {
    if (num_triangles <= 0) throw std::invalid_argument("lattice needs triangles");
    std::set<int> in_posner;
    for (const auto& [p, m] : posners) {
        for (int t : {p, m}) {
            if (t < 0 || t >= num_triangles) throw std::invalid_argument("triangle out of range");
            if (!in_posner.insert(t).second)
                throw std::invalid_argument("triangle in two posners");
        }
    }
    if (static_cast<int>(in_posner.size()) != num_triangles)
        throw std::invalid_argument("every triangle must belong to a posner");

    std::set<std::pair<int, int>> used;
    for (const auto& [a, b] : edges) {
        for (const Leg& l : {a, b}) {
            if (l.triangle < 0 || l.triangle >= num_triangles || l.leg < 0 || l.leg > 2)
                throw std::invalid_argument("edge endpoint out of range");
            if (!used.insert({l.triangle, l.leg}).second)
                throw std::invalid_argument("leg used by two edges");
        }
        if (is_plus(a.triangle) == is_plus(b.triangle))
            throw std::invalid_argument("edges must join a plus triangle to a minus triangle");
    }
    // the intra-posner bond (leg 2 to leg 2) must be present
    for (const auto& [p, m] : posners) {
        const bool found = std::any_of(edges.begin(), edges.end(), [&](const auto& e) {
            return (e.first == Leg{p, 2} && e.second == Leg{m, 2}) ||
                   (e.first == Leg{m, 2} && e.second == Leg{p, 2});
        });
        if (!found) throw std::invalid_argument("posner is missing its internal leg-2 bond");
    }
}

bool Lattice::is_plus(int triangle) const {
    for (const auto& [p, m] : posners) {
        if (p == triangle) return true;
        if (m == triangle) return false;
    }
    throw std::invalid_argument("triangle not in any posner");
}

std::vector<Lattice::Leg> Lattice::boundary_legs() const {
    std::set<std::pair<int, int>> used;
    for (const auto& [a, b] : edges) {
        used.insert({a.triangle, a.leg});
        used.insert({b.triangle, b.leg});
    }
    std::vector<Leg> out;
    for (int t = 0; t < num_triangles; ++t)
        for (int l = 0; l < 3; ++l)
            if (!used.count({t, l})) out.push_back({t, l});
    return out;
}

Lattice Lattice::from_json(const std::string& text) {
    json j = json::parse(text);
    Lattice lat;
    lat.num_triangles = static_cast<int>(j.at("triangles").size());
    for (const auto& e : j.at("edges")) {
        Leg a{e[0][0].get<int>(), e[0][1].get<int>()};
        Leg b{e[1][0].get<int>(), e[1][1].get<int>()};
        lat.edges.push_back({a, b});
    }
    for (const auto& p : j.at("posners"))
        lat.posners.push_back({p[0].get<int>(), p[1].get<int>()});
    lat.validate();
    return lat;
}

std::string Lattice::to_json() const {
    json j;
    json tris = json::array();
    for (int t = 0; t < num_triangles; ++t) tris.push_back(t);
    j["triangles"] = tris;
    json es = json::array();
    for (const auto& [a, b] : edges)
        es.push_back({{a.triangle, a.leg}, {b.triangle, b.leg}});
    j["edges"] = es;
    json ps = json::array();
    for (const auto& [p, m] : posners) ps.push_back({p, m});
    j["posners"] = ps;
    return j.dump(2);
}

Lattice Lattice::single_posner() {
    Lattice lat;
    lat.num_triangles = 2;
    lat.posners = {{0, 1}};
    lat.edges = {{{0, 2}, {1, 2}}};
    lat.validate();
    return lat;
}

Lattice Lattice::two_posner_closed() {
    Lattice lat;
    lat.num_triangles = 4;
    lat.posners = {{0, 1}, {2, 3}};
    lat.edges = {{{0, 2}, {1, 2}}, {{2, 2}, {3, 2}},
                 {{0, 0}, {3, 0}}, {{0, 1}, {3, 1}},
                 {{2, 0}, {1, 0}}, {{2, 1}, {1, 1}}};
    lat.validate();
    return lat;
}

Lattice Lattice::two_posner_open() {
    Lattice lat;
    lat.num_triangles = 4;
    lat.posners = {{0, 1}, {2, 3}};
    lat.edges = {{{0, 2}, {1, 2}}, {{2, 2}, {3, 2}}, {{0, 0}, {3, 0}}};
    lat.validate();
    return lat;
}

// ---------------------------------------------------------------------------
// circuit route

CircuitBuildResult build_aklt_prime_circuit(const Lattice& lattice, bool force_success,
                                            std::optional<std::uint64_t> seed) {
    lattice.validate();
    const auto boundary = lattice.boundary_legs();
    const int lattice_qubits = 3 * lattice.num_triangles;
    const int total = lattice_qubits + static_cast<int>(boundary.size());
    if (total > kMaxQubits) throw std::runtime_error("lattice exceeds the qubit cap");

    // Decide whether the bind-and-separate schedule fits: it needs at least
    // three molecules, adding six-qubit helpers as required.
    const int posner_count = lattice.num_posners();
    const int helpers_needed = std::max(0, 3 - posner_count);
    const bool cascade_fits = total + 6 * helpers_needed <= kMaxQubits;

    Machine machine;
    // label bookkeeping: lattice qubit (t, leg) and stubs
    std::map<std::pair<int, int>, int> qubit_label;
    std::vector<int> stub_labels;

    auto orient = [&](const Lattice::Leg& a, const Lattice::Leg& b) {
        return lattice.is_plus(a.triangle) ? std::make_pair(a, b) : std::make_pair(b, a);
    };
    for (const auto& e : lattice.edges) {
        auto [p, m] = orient(e.first, e.second);
        auto [lp, lm] = machine.prepare_singlet();
        qubit_label[{p.triangle, p.leg}] = lp;
        qubit_label[{m.triangle, m.leg}] = lm;
    }
    for (const auto& leg : boundary) {
        auto [lq, ls] = machine.prepare_singlet();
        if (!lattice.is_plus(leg.triangle)) std::swap(lq, ls);
        qubit_label[{leg.triangle, leg.leg}] = lq;
        stub_labels.push_back(ls);
    }

    std::vector<std::string> names;
    std::vector<int> posner_labels_flat;
    for (size_t i = 0; i < lattice.posners.size(); ++i) {
        const auto& [tp, tm] = lattice.posners[i];
        std::array<int, 6> labels{};
        for (int l = 0; l < 3; ++l) labels[l] = qubit_label.at({tp, l});
        for (int l = 0; l < 3; ++l) labels[3 + l] = qubit_label.at({tm, l});
        const std::string name = "P" + std::to_string(i);
        machine.form_posner(name, labels);
        names.push_back(name);
        posner_labels_flat.insert(posner_labels_flat.end(), labels.begin(), labels.end());
    }

    Rng rng(seed.value_or(0));
    int attempts = 0;

    if (cascade_fits) {
        std::vector<std::string> cascade_names = names;
        for (int h = 0; h < helpers_needed; ++h) {
            std::array<int, 6> hl{};
            for (int s = 0; s < 3; ++s) {
                auto [a, b] = machine.prepare_singlet();
                hl[s] = a;
                hl[3 + s] = b;
            }
            const std::string hname = "H" + std::to_string(h);
            machine.form_posner(hname, hl);
            cascade_names.push_back(hname);
        }
        // bind-and-separate schedule: A-B, B-C, C-A, then the rest against A.
        auto step = [&](const std::string& a, const std::string& b) {
            for (;;) {
                ++attempts;
                QState before = machine.state();
                std::optional<std::uint64_t> s;
                std::optional<bool> force;
                if (force_success)
                    force = true;
                else
                    s = rng.next();
                BindResult r = machine.attempt_binding(a, b, s, force);
                if (r.bound) {
                    machine.separate(a, b);
                    return;
                }
                // refresh: the failed molecule is rebuilt in its pre-attempt
                // state (hydrolyze, replace the spent internal singlet, re-form)
                machine.set_state(std::move(before));
            }
        };
        step(cascade_names[0], cascade_names[1]);
        step(cascade_names[1], cascade_names[2]);
        step(cascade_names[2], cascade_names[0]);
        for (size_t i = 3; i < cascade_names.size(); ++i) step(cascade_names[i], cascade_names[0]);
        for (int h = 0; h < helpers_needed; ++h) machine.hydrolyze("H" + std::to_string(h));
    } else {
        // direct sector projection (the schedule's net effect)
        for (const auto& name : names) {
            ++attempts;
            machine.project_tau0(name);
        }
    }

    // canonical order: posner qubits first, stub qubits last, helpers trailing
    std::vector<int> keep = posner_labels_flat;
    keep.insert(keep.end(), stub_labels.begin(), stub_labels.end());
    std::vector<int> full_order = keep;
    for (int l : machine.state().labels())
        if (std::find(keep.begin(), keep.end(), l) == keep.end()) full_order.push_back(l);
    QState ordered = reorder_labels(machine.state(), full_order);

    QState with_stubs = [&] {
        const int extra = ordered.num_qubits() - static_cast<int>(keep.size());
        if (extra == 0) return ordered;
        // helper molecules never share singlets with the lattice, so the state
        // factorizes as |lattice+stubs> (x) |helpers|; split it off
        const Eigen::Index dk = Eigen::Index(1) << keep.size();
        const Eigen::Index dh = Eigen::Index(1) << extra;
        const Vector& a = ordered.amplitudes();
        Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            m(a.data(), dk, dh);
        Eigen::Index hstar = 0;
        m.cwiseAbs().colwise().sum().maxCoeff(&hstar);
        Vector psi = m.col(hstar);
        psi /= psi.norm();
        double err = 0.0;
        for (Eigen::Index h = 0; h < dh; ++h) {
            const Complex coef = psi.dot(m.col(h));
            err = std::max(err, (m.col(h) - coef * psi).cwiseAbs().maxCoeff());
        }
        if (err > 1e-9)
            throw std::runtime_error("helper molecules left residual entanglement");
        return QState::pure(std::move(psi), keep);
    }();

    CircuitBuildResult result{
        stub_labels.empty() ? with_stubs : partial_trace(with_stubs, posner_labels_flat),
        with_stubs, posner_labels_flat, stub_labels, attempts};
    return result;
}

double first_binding_probability(const Lattice& lattice, int posner_a, int posner_b) {
    lattice.validate();
    const int P = lattice.num_posners();
    if (posner_a < 0 || posner_a >= P || posner_b < 0 || posner_b >= P || posner_a == posner_b)
        throw std::invalid_argument("bad posner indices");
    // reduced pair state in the footnote approximation: singlets the pair
    // shares (internal bonds and edges between the two posners), everything
    // else traced to 1/2 identity.
    auto position = [&](int posner, const Lattice::Leg& leg) -> std::optional<int> {
        const auto& [tp, tm] = lattice.posners[posner];
        const int base = (posner == posner_a) ? 0 : 6;
        if (leg.triangle == tp) return base + leg.leg;
        if (leg.triangle == tm) return base + 3 + leg.leg;
        return std::nullopt;
    };
    SingletPattern pattern;
    for (const auto& e : lattice.edges) {
        bool internal = false;
        for (int p : {posner_a, posner_b}) {
            auto qa = position(p, e.first);
            auto qb = position(p, e.second);
            if (qa && qb) {  // internal bond of p
                pattern.pairs.push_back({*qa, *qb});
                internal = true;
                break;
            }
        }
        if (internal) continue;
        auto qa = position(posner_a, e.first), qb = position(posner_b, e.second);
        if (!qa || !qb) {
            qa = position(posner_a, e.second);
            qb = position(posner_b, e.first);
        }
        if (qa && qb) pattern.pairs.push_back({*qa, *qb});
    }
    return binding_probability(pattern);
}

// ---------------------------------------------------------------------------
// printed tensors

int v3_index(int v3_tilde, int tau) {
    if (v3_tilde < 0 || v3_tilde > 1 || tau < 0 || tau > 2)
        throw std::invalid_argument("bad v3 components");
    return 2 * tau + v3_tilde;
}

namespace {

// Coefficient of |a1 a2 a3> in the unique sector-tau trio element whose
// decomposition contains it (0 when the sector has no such element).
Complex sector_coefficient(int tau, int a1, int a2, int a3) {
    const int idx = (a1 << 2) | (a2 << 1) | a3;
    for (const auto& el : build_trio_basis()) {
        if (el.tau123 != tau) continue;
        if (std::abs(el.vector(idx)) > 1e-14) return el.vector(idx);
    }
    return 0.0;
}

}  // namespace

Complex PepsTensor::entry(int a1, int a2, int a3, int v1, int v2, int v3) const {
    for (int b : {a1, a2, a3, v1, v2})
        if (b < 0 || b > 1) throw std::invalid_argument("tensor indices are bits");
    if (v3 < 0 || v3 > 5) throw std::invalid_argument("v3 ranges over 0..5");
    const int v3_tilde = v3 % 2;
    const int tau = v3 / 2;
    if (plus) {
        if (a1 != v1 || a2 != v2 || a3 != v3_tilde) return 0.0;
        const double sign = ((a1 + a2 + a3) % 2) ? -1.0 : 1.0;
        return sign * sector_coefficient(tau, a1, a2, a3);
    }
    // mirrored convention: physical bits match legs 1-2, the shared leg is the
    // singlet partner (a3 = 1 - v3_tilde), sector is the tau = 0 complement
    if (a1 != v1 || a2 != v2 || a3 != 1 - v3_tilde) return 0.0;
    const double sign = ((a1 + a2) % 2) ? -1.0 : 1.0;
    return sign * sector_coefficient((3 - tau) % 3, a1, a2, a3);
}

std::pair<PepsTensor, PepsTensor> build_peps_tensors() {
    return {PepsTensor{"T+", true}, PepsTensor{"T-", false}};
}

// ---------------------------------------------------------------------------
// tensor-network contraction

namespace {

// Trio sector projector as an 8x8 matrix.
const Matrix& trio_sector_projector(int tau) {
    static const std::array<Matrix, 3> projs = [] {
        std::array<Matrix, 3> out;
        for (auto& m : out) m = Matrix::Zero(8, 8);
        for (const auto& el : build_trio_basis())
            out[el.tau123] += el.vector * el.vector.adjoint();
        return out;
    }();
    return projs[tau];
}

}  // namespace

QState contract_peps(const Lattice& lattice) {
    lattice.validate();
    const auto boundary = lattice.boundary_legs();
    const int P = lattice.num_posners();
    const int nq = 6 * P + static_cast<int>(boundary.size());
    if (nq > kMaxQubits) throw std::runtime_error("lattice exceeds the qubit cap");

    // External bond variables: one bit per non-internal edge; boundary legs
    // contribute stub qubits. The bond bit is the plus-side virtual value; the
    // minus side receives its complement. Plus-side tensors carry the singlet
    // sign (-1)^bit on each of their legs.
    std::vector<std::pair<Lattice::Leg, Lattice::Leg>> ext_edges;  // (plus leg, minus leg)
    for (const auto& e : lattice.edges) {
        if (e.first.leg == 2 && e.second.leg == 2) continue;  // internal bond
        ext_edges.push_back(lattice.is_plus(e.first.triangle) ? std::make_pair(e.first, e.second)
                                                              : std::make_pair(e.second, e.first));
    }
    const int nbond = static_cast<int>(ext_edges.size());
    const int nstub = static_cast<int>(boundary.size());

    // site tensors per posner: F+[x, u, t] = (-1)^{|u|} <x| Pi_t |u>,
    // F-[y, w, t] = <y| Pi_{-t} |~w> with all minus-side bits complemented.
    // The internal bond sums the shared (u3, t).
    const Eigen::Index out_dim = Eigen::Index(1) << nq;
    Vector out = Vector::Zero(out_dim);

    for (int bond_cfg = 0; bond_cfg < (1 << nbond); ++bond_cfg) {
        for (int stub_cfg = 0; stub_cfg < (1 << nstub); ++stub_cfg) {
            // per-triangle fixed virtual bits for legs 0 and 1 (leg 2 handled
            // inside the per-posner sum); bits are the plus-side values.
            std::map<std::pair<int, int>, int> plus_bit;
            double edge_sign = 1.0;
            for (int e = 0; e < nbond; ++e) {
                const int bit = (bond_cfg >> e) & 1;
                const auto& [pl, ml] = ext_edges[e];
                plus_bit[{pl.triangle, pl.leg}] = bit;
                plus_bit[{ml.triangle, ml.leg}] = bit;  // complemented in F-
                if (bit) edge_sign = -edge_sign;        // (-1)^bit from the plus tensor
            }
            // boundary legs: stub qubit pairs with the leg, plus side carries
            // the sign; for minus-side boundary legs the stub is the plus end.
            std::vector<int> stub_bits(nstub);
            for (int s = 0; s < nstub; ++s) {
                const int bit = (stub_cfg >> s) & 1;
                const auto& leg = boundary[s];
                if (lattice.is_plus(leg.triangle)) {
                    plus_bit[{leg.triangle, leg.leg}] = bit;
                    if (bit) edge_sign = -edge_sign;
                    stub_bits[s] = 1 - bit;  // partner qubit
                } else {
                    plus_bit[{leg.triangle, leg.leg}] = bit;  // complemented in F-
                    if (bit) edge_sign = -edge_sign;          // sign lives on the stub (plus) side
                    stub_bits[s] = bit;
                }
            }

            // per-posner 64-dim vectors, summed over the internal (u3, t)
            std::vector<Vector> site(P);
            bool zero = false;
            for (int p = 0; p < P; ++p) {
                const auto& [tp, tm] = lattice.posners[p];
                const int u1 = plus_bit.at({tp, 0});
                const int u2 = plus_bit.at({tp, 1});
                const int w1 = plus_bit.at({tm, 0});
                const int w2 = plus_bit.at({tm, 1});
                Vector acc = Vector::Zero(64);
                for (int u3 = 0; u3 < 2; ++u3) {
                    // legs 1-2 signs are booked with their bonds; only the
                    // internal leg's (-1)^{u3} lives here
                    const double s3 = (u3 % 2) ? -1.0 : 1.0;
                    const int uidx = (u1 << 2) | (u2 << 1) | u3;
                    const int widx = ((1 - w1) << 2) | ((1 - w2) << 1) | (1 - u3);
                    for (int t = 0; t < 3; ++t) {
                        const Vector fp = trio_sector_projector(t).col(uidx);
                        const Vector fm = trio_sector_projector((3 - t) % 3).col(widx);
                        if (fp.isZero(0) || fm.isZero(0)) continue;
                        for (int x = 0; x < 8; ++x) {
                            if (fp(x) == Complex(0.0)) continue;
                            for (int y = 0; y < 8; ++y)
                                acc(x * 8 + y) += s3 * fp(x) * fm(y);
                        }
                    }
                }
                if (acc.isZero(0)) {
                    zero = true;
                    break;
                }
                site[p] = std::move(acc);
            }
            if (zero) continue;

            // accumulate the outer product (posners in order, stubs last)
            std::uint64_t stub_suffix = 0;
            for (int s = 0; s < nstub; ++s) stub_suffix = (stub_suffix << 1) | stub_bits[s];
            const int stub_shift = nstub;
            // iterate over the 64^P posner indices
            const Eigen::Index reps = Eigen::Index(1) << (6 * P);
            for (Eigen::Index idx = 0; idx < reps; ++idx) {
                Complex val = edge_sign;
                Eigen::Index rem = idx;
                for (int p = P - 1; p >= 0; --p) {
                    val *= site[p](rem & 63);
                    if (val == Complex(0.0)) break;
                    rem >>= 6;
                }
                if (val == Complex(0.0)) continue;
                out((idx << stub_shift) | stub_suffix) += val;
            }
        }
    }

    const double norm = out.norm();
    if (norm < 1e-12) throw std::runtime_error("contraction produced the zero vector");
    out /= norm;

    std::vector<int> labels(nq);
    for (int i = 0; i < nq; ++i) labels[i] = i;
    return QState::pure(std::move(out), labels);
}

// ---------------------------------------------------------------------------
// site measurements

SiteSpinResult measure_site_spin(const QState& state, const std::array<int, 6>& posner_labels,
                                 std::optional<std::uint64_t> seed, std::optional<bool> force_good) {
    std::vector<int> plus(posner_labels.begin(), posner_labels.begin() + 3);
    std::vector<int> minus(posner_labels.begin() + 3, posner_labels.end());
    DenseOperator good = kron(build_s32_projector(plus), build_s32_projector(minus));
    Matrix comp = Matrix::Identity(64, 64) - good.matrix;
    DenseOperator bad{std::move(comp), good.target_labels};

    std::optional<int> forced;
    if (force_good) forced = *force_good ? 0 : 1;
    PvmResult r = measure_pvm(state, {good, bad}, seed, forced);
    return {r.outcome == 0, r.probabilities[0], std::move(r.post_state)};
}

namespace {

std::array<Matrix, 3> build_povm_f() {
    auto k3 = [](const Eigen::Vector2cd& q) {
        Vector v(8);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c) v((a << 2) | (b << 1) | c) = q(a) * q(b) * q(c);
        return v;
    };
    const double r2 = 1.0 / std::sqrt(2.0);
    Eigen::Vector2cd plus(r2, r2), minus(r2, -r2);
    Eigen::Vector2cd iy(r2, Complex(0, r2)), miy(r2, Complex(0, -r2));
    Eigen::Vector2cd zero(1, 0), one(0, 1);
    const double c = std::sqrt(2.0 / 3.0);
    std::array<Matrix, 3> f;
    f[0] = c * (k3(plus) * k3(plus).adjoint() + k3(minus) * k3(minus).adjoint());
    f[1] = c * (k3(iy) * k3(iy).adjoint() + k3(miy) * k3(miy).adjoint());
    f[2] = c * (k3(zero) * k3(zero).adjoint() + k3(one) * k3(one).adjoint());

    // completeness on the s = 3/2 subspace
    Matrix sum = Matrix::Zero(8, 8);
    for (const auto& m : f) sum += m.adjoint() * m;
    Matrix p32 = Matrix::Zero(8, 8);
    for (const auto& el : build_trio_basis())
        if (el.s123 > 1.0) p32 += el.vector * el.vector.adjoint();
    if ((sum - p32).cwiseAbs().maxCoeff() > 1e-10)
        throw std::logic_error("POVM F incomplete on the s=3/2 subspace");
    return f;
}

}  // namespace

PovmFResult measure_povm_F(const QState& state, const std::array<int, 3>& trio_labels,
                           std::optional<std::uint64_t> seed, std::optional<int> force_outcome) {
    static const std::array<Matrix, 3> f = build_povm_f();
    std::vector<int> labels(trio_labels.begin(), trio_labels.end());

    DenseOperator p32 = build_s32_projector(labels);
    const double w32 = expectation(state, p32).real();
    const bool off_sector = w32 < 1.0 - 1e-6;

    std::array<double, 3> probs{};
    for (int a = 0; a < 3; ++a) {
        DenseOperator ee{f[a].adjoint() * f[a], labels};
        probs[a] = std::max(0.0, expectation(state, ee).real());
    }
    const double total = probs[0] + probs[1] + probs[2];

    int outcome;
    if (force_outcome) {
        outcome = *force_outcome;
        if (outcome < 0 || outcome > 2) throw std::invalid_argument("POVM outcome out of range");
    } else if (seed) {
        Rng rng(*seed);
        const double u = rng.uniform() * total;
        outcome = (u < probs[0]) ? 0 : (u < probs[0] + probs[1] ? 1 : 2);
    } else {
        throw std::invalid_argument("measure_povm_F: need a seed or a forced outcome");
    }
    if (probs[outcome] < 1e-15)
        throw std::runtime_error("POVM branch has zero probability");

    DenseOperator kraus{f[outcome], labels};
    QState post = [&] {
        if (state.is_pure()) {
            Vector v = apply_unnormalized(kraus, state.amplitudes(), state.labels());
            v /= v.norm();
            return QState::pure(std::move(v), state.labels());
        }
        const Matrix& rho = state.density();
        Matrix tmp(rho.rows(), rho.cols());
        for (Eigen::Index cc = 0; cc < rho.cols(); ++cc)
            tmp.col(cc) = apply_unnormalized(kraus, rho.col(cc), state.labels());
        Matrix outm(rho.rows(), rho.cols());
        DenseOperator conj_op{kraus.matrix.conjugate(), labels};
        for (Eigen::Index r = 0; r < rho.rows(); ++r)
            outm.row(r) = apply_unnormalized(conj_op, tmp.row(r).transpose(), state.labels()).transpose();
        outm /= outm.trace().real();
        return QState::mixed(std::move(outm), state.labels());
    }();

    return {outcome, probs[outcome], std::move(post), off_sector};
}

}  // namespace posner
