#include "biloc/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "biloc/common.hpp"

namespace biloc {

using Eigen::MatrixXcd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

void check_density(const MatrixXcd& rho, const char* name, double tol) {
    if (rho.rows() != rho.cols()) throw InputError(std::string(name) + " is not square");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) {
        throw InputError(std::string(name) + " is not Hermitian");
    }
    if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol) {
        throw InputError(std::string(name) + " does not have unit trace");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) {
        throw InputError(std::string(name) + " is not positive semidefinite");
    }
}

}  // namespace

Scenario QuantumModel::scenario() const {
    Scenario sc;
    for (int pi = 0; pi < 3; ++pi) {
        const auto& ps = povms[static_cast<size_t>(pi)];
        if (ps.empty() || ps[0].empty()) throw InputError("model POVM list is empty");
        sc.settings[static_cast<size_t>(pi)] = static_cast<int>(ps.size());
        sc.outcomes[static_cast<size_t>(pi)] = static_cast<int>(ps[0].size());
    }
    sc.validate();
    return sc;
}

void QuantumModel::validate(double tol) const {
    for (int d : dims) {
        if (d < 1 || d > 4) throw InputError("model dimensions must be in 1..4");
    }
    if (sigmaABA.rows() != dims[0] * dims[1]) throw InputError("sigmaABA dimension mismatch");
    if (sigmaBCC.rows() != dims[2] * dims[3]) throw InputError("sigmaBCC dimension mismatch");
    check_density(sigmaABA, "sigmaABA", tol);
    check_density(sigmaBCC, "sigmaBCC", tol);

    const int party_dim[3] = {dims[0], dims[1] * dims[2], dims[3]};
    const char* party_name[3] = {"A", "B", "C"};
    for (int pi = 0; pi < 3; ++pi) {
        const auto& ps = povms[static_cast<size_t>(pi)];
        if (ps.empty()) throw InputError("model POVM list is empty");
        const size_t n_out = ps[0].size();
        for (size_t x = 0; x < ps.size(); ++x) {
            if (ps[x].size() != n_out) throw InputError("ragged POVM outcome lists");
            MatrixXcd sum = MatrixXcd::Zero(party_dim[pi], party_dim[pi]);
            for (const auto& e : ps[x]) {
                if (e.rows() != party_dim[pi] || e.cols() != party_dim[pi]) {
                    throw InputError(std::string("POVM element dimension mismatch for party ") +
                                     party_name[pi]);
                }
                if ((e - e.adjoint()).cwiseAbs().maxCoeff() > tol) {
                    throw InputError("POVM element is not Hermitian");
                }
                Eigen::SelfAdjointEigenSolver<MatrixXcd> es(e, Eigen::EigenvaluesOnly);
                if (es.eigenvalues().minCoeff() < -tol) {
                    throw InputError("POVM element is not positive semidefinite");
                }
                sum += e;
            }
            if ((sum - MatrixXcd::Identity(party_dim[pi], party_dim[pi])).cwiseAbs().maxCoeff() >
                tol) {
                throw InputError(std::string("POVM for party ") + party_name[pi] + " setting " +
                                 std::to_string(x) + " does not sum to identity");
            }
        }
    }
}

Distribution simulate_distribution(const QuantumModel& m, const Scenario& sc) {
    m.validate();
    if (m.scenario() != sc) throw InputError("model cardinalities do not match the scenario");

    const int dA = m.dims[0], dBA = m.dims[1], dBC = m.dims[2], dC = m.dims[3];
    const MatrixXcd state = kron(m.sigmaABA, m.sigmaBCC);

    const auto& mm = sc.settings;
    const auto& kk = sc.outcomes;
    std::vector<double> p(static_cast<size_t>(mm[0]) * mm[1] * mm[2] * kk[0] * kk[1] * kk[2], 0.0);
    size_t flat = 0;
    const MatrixXcd idA = MatrixXcd::Identity(dA, dA);
    const MatrixXcd idC = MatrixXcd::Identity(dC, dC);
    (void)dBA;
    (void)dBC;
    for (int x = 0; x < mm[0]; ++x)
        for (int y = 0; y < mm[1]; ++y)
            for (int z = 0; z < mm[2]; ++z)
                for (int a = 0; a < kk[0]; ++a)
                    for (int b = 0; b < kk[1]; ++b)
                        for (int g = 0; g < kk[2]; ++g) {
                            const MatrixXcd op =
                                kron(kron(m.povms[0][static_cast<size_t>(x)][static_cast<size_t>(a)],
                                          m.povms[1][static_cast<size_t>(y)][static_cast<size_t>(b)]),
                                     m.povms[2][static_cast<size_t>(z)][static_cast<size_t>(g)]);
                            std::complex<double> v = (state * op).trace();
                            if (std::abs(v.imag()) > 1e-10) {
                                throw InternalError("simulated probability has imaginary part");
                            }
                            p[flat++] = std::max(0.0, v.real());
                        }
    return Distribution(sc, std::move(p));
}

QuantumModel entanglement_swapping_model() {
    QuantumModel m;
    m.dims = {2, 2, 2, 2};
    Eigen::VectorXcd phip(4);
    phip << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
    Eigen::VectorXcd phim(4);
    phim << 1.0 / std::sqrt(2.0), 0.0, 0.0, -1.0 / std::sqrt(2.0);
    Eigen::VectorXcd psip(4);
    psip << 0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0;
    Eigen::VectorXcd psim(4);
    psim << 0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0;

    m.sigmaABA = phip * phip.adjoint();
    m.sigmaBCC = phip * phip.adjoint();

    Eigen::VectorXcd z0(2), z1(2), xp(2), xm(2);
    z0 << 1.0, 0.0;
    z1 << 0.0, 1.0;
    xp << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    xm << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);

    auto proj = [](const Eigen::VectorXcd& v) { return MatrixXcd(v * v.adjoint()); };

    m.povms[0] = {{proj(z0), proj(z1)}, {proj(xp), proj(xm)}};
    m.povms[1] = {{proj(phip), proj(phim), proj(psip), proj(psim)}};
    m.povms[2] = {{proj(z0), proj(z1)}, {proj(xp), proj(xm)}};
    return m;
}

QuantumModel uniform_model(const Scenario& sc) {
    sc.validate();
    QuantumModel m;
    m.dims = {2, 2, 2, 2};
    m.sigmaABA = MatrixXcd::Identity(4, 4) / 4.0;
    m.sigmaBCC = MatrixXcd::Identity(4, 4) / 4.0;
    const int party_dim[3] = {2, 4, 2};
    for (int pi = 0; pi < 3; ++pi) {
        auto& ps = m.povms[static_cast<size_t>(pi)];
        ps.resize(static_cast<size_t>(sc.settings[static_cast<size_t>(pi)]));
        for (auto& setting : ps) {
            setting.assign(static_cast<size_t>(sc.outcomes[static_cast<size_t>(pi)]),
                           MatrixXcd::Identity(party_dim[pi], party_dim[pi]) /
                               static_cast<double>(sc.outcomes[static_cast<size_t>(pi)]));
        }
    }
    return m;
}

namespace {

MatrixXcd random_density(Rng& rng, int dim) {
    MatrixXcd g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            g(i, j) = std::complex<double>(rng.next_gaussian(), rng.next_gaussian());
    MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    return rho;
}

std::vector<MatrixXcd> random_povm(Rng& rng, int dim, int n_out) {
    std::vector<MatrixXcd> gs;
    MatrixXcd sum = MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < n_out; ++i) {
        MatrixXcd g(dim, dim);
        for (Eigen::Index r = 0; r < dim; ++r)
            for (Eigen::Index c = 0; c < dim; ++c)
                g(r, c) = std::complex<double>(rng.next_gaussian(), rng.next_gaussian());
        MatrixXcd e = g * g.adjoint() + 0.05 * MatrixXcd::Identity(dim, dim);
        gs.push_back(e);
        sum += e;
    }
    // normalize: E_i <- S^{-1/2} G_i S^{-1/2}, complete by construction
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sum);
    MatrixXcd inv_sqrt = es.operatorInverseSqrt();
    for (auto& e : gs) e = (inv_sqrt * e * inv_sqrt).eval();
    // re-hermitize against roundoff
    for (auto& e : gs) e = (0.5 * (e + e.adjoint())).eval();
    return gs;
}

}  // namespace

QuantumModel random_model(uint64_t seed, const Scenario& sc) {
    sc.validate();
    Rng rng(seed * 0x9e3779b97f4a7c15ull + 1);
    QuantumModel m;
    m.dims = {2, 2, 2, 2};
    m.sigmaABA = random_density(rng, 4);
    m.sigmaBCC = random_density(rng, 4);
    const int party_dim[3] = {2, 4, 2};
    for (int pi = 0; pi < 3; ++pi) {
        auto& ps = m.povms[static_cast<size_t>(pi)];
        ps.resize(static_cast<size_t>(sc.settings[static_cast<size_t>(pi)]));
        for (auto& setting : ps) {
            setting = random_povm(rng, party_dim[pi], sc.outcomes[static_cast<size_t>(pi)]);
        }
    }
    return m;
}

Distribution random_classical_bilocal(uint64_t seed, const Scenario& sc) {
    sc.validate();
    Rng rng(seed * 0xd1342543de82ef95ull + 7);
    const int L1 = 1 + static_cast<int>(rng.next_below(8));
    const int L2 = 1 + static_cast<int>(rng.next_below(8));

    auto weights = [&](int n) {
        std::vector<double> w(static_cast<size_t>(n));
        double sum = 0.0;
        for (double& v : w) {
            v = -std::log(1.0 - rng.next_double());
            sum += v;
        }
        for (double& v : w) v /= sum;
        return w;
    };
    std::vector<double> w1 = weights(L1), w2 = weights(L2);

    const auto& mm = sc.settings;
    const auto& kk = sc.outcomes;
    // deterministic response tables
    std::vector<int> fa(static_cast<size_t>(mm[0] * L1));
    for (int& v : fa) v = static_cast<int>(rng.next_below(static_cast<uint64_t>(kk[0])));
    std::vector<int> fb(static_cast<size_t>(mm[1] * L1 * L2));
    for (int& v : fb) v = static_cast<int>(rng.next_below(static_cast<uint64_t>(kk[1])));
    std::vector<int> fc(static_cast<size_t>(mm[2] * L2));
    for (int& v : fc) v = static_cast<int>(rng.next_below(static_cast<uint64_t>(kk[2])));

    std::vector<double> p(static_cast<size_t>(mm[0]) * mm[1] * mm[2] * kk[0] * kk[1] * kk[2], 0.0);
    Distribution d;
    d.scenario = sc;
    d.p = std::move(p);
    for (int l1 = 0; l1 < L1; ++l1)
        for (int l2 = 0; l2 < L2; ++l2) {
            const double w = w1[static_cast<size_t>(l1)] * w2[static_cast<size_t>(l2)];
            for (int x = 0; x < mm[0]; ++x)
                for (int y = 0; y < mm[1]; ++y)
                    for (int z = 0; z < mm[2]; ++z) {
                        const int a = fa[static_cast<size_t>(x * L1 + l1)];
                        const int b = fb[static_cast<size_t>((y * L1 + l1) * L2 + l2)];
                        const int g = fc[static_cast<size_t>(z * L2 + l2)];
                        d.p[d.index(a, b, g, x, y, z)] += w;
                    }
        }
    d.validate();
    return d;
}

double single_copy_value(const QuantumModel& m, std::span<const Letter> word) {
    const int dA = m.dims[0], dBA = m.dims[1], dBC = m.dims[2], dC = m.dims[3];
    const int dim = dA * dBA * dBC * dC;
    MatrixXcd op = MatrixXcd::Identity(dim, dim);
    const MatrixXcd idA = MatrixXcd::Identity(dA, dA);
    const MatrixXcd idBA = MatrixXcd::Identity(dBA, dBA);
    const MatrixXcd idBC = MatrixXcd::Identity(dBC, dBC);
    const MatrixXcd idC = MatrixXcd::Identity(dC, dC);
    for (Letter l : word) {
        const auto& e = m.povms[static_cast<size_t>(static_cast<int>(l.party()))]
                              [static_cast<size_t>(l.setting())][static_cast<size_t>(l.outcome())];
        MatrixXcd lifted;
        switch (l.party()) {
            case Party::A:
                lifted = kron(kron(e, idBA), kron(idBC, idC));
                break;
            case Party::B:
                lifted = kron(kron(idA, e), idC);
                break;
            case Party::C:
                lifted = kron(kron(idA, idBA), kron(idBC, e));
                break;
        }
        op = (op * lifted).eval();
    }
    const MatrixXcd state = kron(m.sigmaABA, m.sigmaBCC);
    std::complex<double> v = (state * op).trace();
    // moments are real after Hermitian symmetrization; assert and discard
    if (std::abs(v.imag()) > 1e-10) {
        throw InternalError("single-copy moment has non-negligible imaginary part");
    }
    return v.real();
}

MomentAssignment product_state_moments(const QuantumModel& m, std::span<const Monomial> monomials,
                                       int n_copies) {
    m.validate();
    MomentAssignment out;
    out.reserve(monomials.size() * 2);
    // cache per single-copy subword (copy index erased)
    std::unordered_map<Monomial, double, MonomialHash> cache;
    for (const Monomial& mono : monomials) {
        if (out.count(mono)) continue;
        double value = 1.0;
        std::vector<Letter> copy_word;
        for (int c = 1; c <= n_copies; ++c) {
            copy_word.clear();
            for (int i = 0; i < mono.size(); ++i) {
                Letter l = mono.letter(i);
                if (l.copy() == c) copy_word.emplace_back(l.party(), l.setting(), l.outcome(), 1);
            }
            if (copy_word.empty()) continue;
            Monomial key = canonicalize(copy_word);
            auto it = cache.find(key);
            double v;
            if (it != cache.end()) {
                v = it->second;
            } else {
                v = single_copy_value(m, copy_word);
                cache.emplace(key, v);
            }
            value *= v;
        }
        out.emplace(mono, value);
    }
    return out;
}

namespace {

struct AcObjective {
    const MarginalAC* q;
    int kA, kC, mA, mC;

    // parameters: qA stacked per setting (kA-1 free entries each, last is
    // 1 - sum), then qC likewise
    int n_params() const { return mA * (kA - 1) + mC * (kC - 1); }

    double eval(const std::vector<double>& t) const {
        std::vector<double> pa(static_cast<size_t>(mA * kA)), pc(static_cast<size_t>(mC * kC));
        int pos = 0;
        for (int x = 0; x < mA; ++x) {
            double rest = 1.0;
            for (int a = 0; a < kA - 1; ++a) {
                pa[static_cast<size_t>(x * kA + a)] = t[static_cast<size_t>(pos)];
                rest -= t[static_cast<size_t>(pos)];
                ++pos;
            }
            pa[static_cast<size_t>(x * kA + kA - 1)] = rest;
        }
        for (int z = 0; z < mC; ++z) {
            double rest = 1.0;
            for (int g = 0; g < kC - 1; ++g) {
                pc[static_cast<size_t>(z * kC + g)] = t[static_cast<size_t>(pos)];
                rest -= t[static_cast<size_t>(pos)];
                ++pos;
            }
            pc[static_cast<size_t>(z * kC + kC - 1)] = rest;
        }
        double penalty = 0.0;
        for (double v : pa)
            if (v < 0.0) penalty += v * v * 1e3;
        for (double v : pc)
            if (v < 0.0) penalty += v * v * 1e3;
        double obj = 0.0;
        for (int a = 0; a < kA; ++a)
            for (int g = 0; g < kC; ++g)
                for (int x = 0; x < mA; ++x)
                    for (int z = 0; z < mC; ++z) {
                        const double diff = pa[static_cast<size_t>(x * kA + a)] *
                                                pc[static_cast<size_t>(z * kC + g)] -
                                            q->at(a, g, x, z);
                        obj += diff * diff;
                    }
        return obj + penalty;
    }
};

}  // namespace

double analytic_ac_distance(const Distribution& d) {
    const Scenario& sc = d.scenario;
    if (sc.outcomes[1] != 1) {
        throw InputError("analytic_ac_distance requires a trivial Bob (single outcome)");
    }
    if (sc.outcomes[0] * sc.outcomes[2] > 16) {
        throw InputError("analytic_ac_distance scenario too large");
    }
    MarginalAC q = marginal_AC(d);
    AcObjective f{&q, sc.outcomes[0], sc.outcomes[2], sc.settings[0], sc.settings[2]};
    const int np = f.n_params();

    // dense grid seed; the literal 1e-3 grid for up to two parameters,
    // coarser above so the evaluation count stays bounded
    double step = 1e-3;
    if (np > 2) step = std::max(1e-3, std::pow(2e6, -1.0 / np));
    std::vector<double> best(static_cast<size_t>(np), 0.5);
    double best_val = f.eval(best);
    std::vector<double> t(static_cast<size_t>(np), 0.0);
    const int cells = static_cast<int>(std::round(1.0 / step));
    std::vector<int> idx(static_cast<size_t>(np), 0);
    while (true) {
        for (int i = 0; i < np; ++i) t[static_cast<size_t>(i)] = idx[static_cast<size_t>(i)] * step;
        const double v = f.eval(t);
        if (v < best_val) {
            best_val = v;
            best = t;
        }
        int i = 0;
        for (; i < np; ++i) {
            if (++idx[static_cast<size_t>(i)] <= cells) break;
            idx[static_cast<size_t>(i)] = 0;
        }
        if (i == np) break;
    }

    // coordinate descent refinement to 1e-8
    double h = step;
    while (h > 1e-8) {
        bool improved = false;
        for (int i = 0; i < np; ++i) {
            for (double dir : {-1.0, 1.0}) {
                t = best;
                t[static_cast<size_t>(i)] = std::clamp(t[static_cast<size_t>(i)] + dir * h, 0.0, 1.0);
                const double v = f.eval(t);
                if (v < best_val - 1e-15) {
                    best_val = v;
                    best = t;
                    improved = true;
                }
            }
        }
        if (!improved) h *= 0.5;
    }
    return best_val;
}

namespace {

json matrix_to_json(const MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixXcd matrix_from_json(const json& j, int dim, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim) {
        throw InputError(where + " must be a " + std::to_string(dim) + "x" + std::to_string(dim) +
                         " matrix");
    }
    MatrixXcd out(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const json& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim) {
            throw InputError(where + " row " + std::to_string(i) + " has wrong length");
        }
        for (int c = 0; c < dim; ++c) {
            const json& cell = row[static_cast<size_t>(c)];
            if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() ||
                !cell[1].is_number()) {
                throw InputError(where + " entry (" + std::to_string(i) + "," + std::to_string(c) +
                                 ") must be a [re, im] pair");
            }
            out(i, c) = std::complex<double>(cell[0].get<double>(), cell[1].get<double>());
        }
    }
    return out;
}

void reject_unknown_m(const json& obj, std::initializer_list<const char*> allowed,
                      const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) throw InputError("unknown field '" + it.key() + "' in " + where);
    }
}

}  // namespace

QuantumModel parse_model(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("model parse: ") + e.what());
    }
    if (!j.is_object()) throw InputError("model file must be a JSON object");
    reject_unknown_m(j, {"dims", "sigmaABA", "sigmaBCC", "povms"}, "model");
    for (const char* field : {"dims", "sigmaABA", "sigmaBCC", "povms"}) {
        if (!j.contains(field)) throw InputError(std::string("model requires field '") + field + "'");
    }
    QuantumModel m;
    const json& jd = j["dims"];
    if (!jd.is_array() || jd.size() != 4) throw InputError("dims must be an array of 4 integers");
    for (size_t i = 0; i < 4; ++i) {
        if (!jd[i].is_number_integer()) throw InputError("dims entries must be integers");
        m.dims[i] = jd[i].get<int>();
    }
    m.sigmaABA = matrix_from_json(j["sigmaABA"], m.dims[0] * m.dims[1], "sigmaABA");
    m.sigmaBCC = matrix_from_json(j["sigmaBCC"], m.dims[2] * m.dims[3], "sigmaBCC");
    const json& jp = j["povms"];
    if (!jp.is_object()) throw InputError("povms must be an object with fields A, B, C");
    reject_unknown_m(jp, {"A", "B", "C"}, "povms");
    const int party_dim[3] = {m.dims[0], m.dims[1] * m.dims[2], m.dims[3]};
    const char* keys[3] = {"A", "B", "C"};
    for (int pi = 0; pi < 3; ++pi) {
        if (!jp.contains(keys[pi])) {
            throw InputError(std::string("povms requires field '") + keys[pi] + "'");
        }
        const json& jparty = jp[keys[pi]];
        if (!jparty.is_array() || jparty.empty()) {
            throw InputError(std::string("povms.") + keys[pi] + " must be a nonempty array");
        }
        auto& ps = m.povms[static_cast<size_t>(pi)];
        for (size_t x = 0; x < jparty.size(); ++x) {
            const json& jsetting = jparty[x];
            if (!jsetting.is_array() || jsetting.empty()) {
                throw InputError(std::string("povms.") + keys[pi] + "[" + std::to_string(x) +
                                 "] must be a nonempty array");
            }
            std::vector<MatrixXcd> setting;
            for (size_t o = 0; o < jsetting.size(); ++o) {
                setting.push_back(matrix_from_json(jsetting[o], party_dim[pi],
                                                   std::string("povms.") + keys[pi] + "[" +
                                                       std::to_string(x) + "][" +
                                                       std::to_string(o) + "]"));
            }
            ps.push_back(std::move(setting));
        }
    }
    m.validate(1e-9);
    return m;
}

std::string serialize_model(const QuantumModel& m) {
    json j;
    j["dims"] = {m.dims[0], m.dims[1], m.dims[2], m.dims[3]};
    j["sigmaABA"] = matrix_to_json(m.sigmaABA);
    j["sigmaBCC"] = matrix_to_json(m.sigmaBCC);
    json jp;
    const char* keys[3] = {"A", "B", "C"};
    for (int pi = 0; pi < 3; ++pi) {
        json jparty = json::array();
        for (const auto& setting : m.povms[static_cast<size_t>(pi)]) {
            json jsetting = json::array();
            for (const auto& e : setting) jsetting.push_back(matrix_to_json(e));
            jparty.push_back(std::move(jsetting));
        }
        jp[keys[pi]] = std::move(jparty);
    }
    j["povms"] = std::move(jp);
    return j.dump(2) + "\n";
}

}  // namespace biloc
