#include "biloc/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include <Eigen/Eigenvalues>

namespace biloc {

const char* hierarchy_name(Hierarchy h) {
    return h == Hierarchy::polarization ? "polarization" : "inflation";
}

void RelaxationParams::validate_shape() const {
    if (k < 1) throw InputError("NPA level k must be >= 1");
    if (effective_d() < 1) throw InputError("factorization depth d must be >= 1");
    if (n < 1) throw InputError("copy count must be >= 1");
    if (n > Letter::kMaxCopy) throw InputError("copy count exceeds supported maximum");
    if (cap < 1) throw InputError("index cap must be positive");
}

void RelaxationParams::validate() const {
    validate_shape();
    if (hierarchy == Hierarchy::polarization && n < 4) {
        throw InputError("polarization hierarchy requires n >= 4");
    }
    if (hierarchy == Hierarchy::inflation && n < 2) {
        throw InputError("inflation hierarchy requires n >= 2");
    }
}

namespace {

Monomial adjoint_of_prefix(const std::vector<Letter>& seq, size_t split) {
    std::vector<Letter> rev(seq.begin(), seq.begin() + static_cast<long>(split));
    std::reverse(rev.begin(), rev.end());
    return canonicalize(rev);
}

Monomial suffix_word(const std::vector<Letter>& seq, size_t split) {
    std::vector<Letter> suf(seq.begin() + static_cast<long>(split), seq.end());
    return canonicalize(suf);
}

struct DisplayLess {
    bool operator()(const std::pair<Monomial, std::string>& a,
                    const std::pair<Monomial, std::string>& b) const {
        if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
        return a.second < b.second;
    }
};

// Monomial targets whose coverage augmentation must guarantee (support
// patterns only; independent of the numeric distribution).
std::vector<Monomial> augmentation_targets(const Scenario& sc, const RelaxationParams& params) {
    std::vector<Monomial> targets;
    if (params.n >= 2) {
        for (int x = 0; x < sc.settings[0]; ++x)
            for (int y = 0; y < sc.settings[1]; ++y)
                for (int z = 0; z < sc.settings[2]; ++z)
                    for (int a = 0; a < sc.outcomes[0]; ++a)
                        for (int b = 0; b < sc.outcomes[1]; ++b)
                            for (int g = 0; g < sc.outcomes[2]; ++g) {
                                Letter A1(Party::A, x, a, 1), B1(Party::B, y, b, 1),
                                    C1(Party::C, z, g, 1);
                                Letter A2(Party::A, x, a, 2), B2(Party::B, y, b, 2),
                                    C2(Party::C, z, g, 2);
                                const Letter w3[] = {A1, B1, C1};
                                const Letter w6[] = {A1, B1, C1, A2, B2, C2};
                                targets.push_back(canonicalize(w3));
                                targets.push_back(canonicalize(w6));
                            }
    }
    if (params.hierarchy == Hierarchy::polarization && params.n >= 4) {
        for (const auto& [a, c] : enumerate_fact_words(sc, params.effective_d())) {
            PolarizationOp op = build_yac(sc, a, c);
            for (const auto& [m, coef] : op.poly.terms) targets.push_back(m);
        }
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    return targets;
}

}  // namespace

MomentIndexSet build_index_set(const Scenario& sc, const RelaxationParams& params) {
    params.validate_shape();
    sc.validate();
    const std::vector<Letter> gens = build_generators(sc, params.n);

    std::set<Monomial> words;
    words.insert(Monomial());
    std::vector<Monomial> frontier{Monomial()};
    int32_t localizer_count = 1;
    for (int len = 1; len <= params.k; ++len) {
        std::set<Monomial> next;
        for (const Monomial& w : frontier) {
            for (Letter g : gens) {
                std::vector<Letter> seq = w.letters();
                seq.push_back(g);
                next.insert(canonicalize(seq));
            }
        }
        words.insert(next.begin(), next.end());
        if (len <= params.k - 1) {
            localizer_count += static_cast<int32_t>(next.size());
        }
        frontier.assign(next.begin(), next.end());
        if (static_cast<int>(words.size()) > params.cap) {
            throw SizeCapError("moment index needs at least " + std::to_string(words.size()) +
                               " labels, cap is " + std::to_string(params.cap));
        }
    }
    const int32_t base_count = static_cast<int32_t>(words.size());

    // Augmentation: cover objective and factorization monomials as
    // adjoint(u)*v with u, v in the set; closed under copy relabeling so the
    // symmetric group acts on the index.
    if (params.augment) {
        auto targets = augmentation_targets(sc, params);
        std::set<Monomial> added;
        auto present = [&](const Monomial& m) { return words.count(m) || added.count(m); };
        auto expressible = [&](const Monomial& m) {
            const auto seq = m.letters();
            for (size_t s = 0; s <= seq.size(); ++s) {
                if (present(adjoint_of_prefix(seq, s)) && present(suffix_word(seq, s))) {
                    return true;
                }
            }
            return false;
        };
        for (const Monomial& t : targets) {
            if (expressible(t)) continue;
            const auto seq = t.letters();
            // split choice: shortest missing part first (short words are
            // shared across targets), then fewest missing, then balance
            size_t best_s = seq.size() / 2;
            long best_maxlen = static_cast<long>(seq.size()) + 1;
            int best_missing = 3;
            long best_imbalance = static_cast<long>(seq.size()) + 1;
            for (size_t s = 0; s <= seq.size(); ++s) {
                const Monomial u = adjoint_of_prefix(seq, s);
                const Monomial v = suffix_word(seq, s);
                long maxlen = 0;
                int missing = 0;
                if (!present(u)) {
                    ++missing;
                    maxlen = std::max(maxlen, static_cast<long>(u.size()));
                }
                if (!present(v)) {
                    ++missing;
                    maxlen = std::max(maxlen, static_cast<long>(v.size()));
                }
                const long imbalance =
                    std::abs(static_cast<long>(2 * s) - static_cast<long>(seq.size()));
                if (std::tuple(maxlen, missing, imbalance, s) <
                    std::tuple(best_maxlen, best_missing, best_imbalance, best_s)) {
                    best_maxlen = maxlen;
                    best_missing = missing;
                    best_imbalance = imbalance;
                    best_s = s;
                }
            }
            for (const Monomial& w :
                 {adjoint_of_prefix(seq, best_s), suffix_word(seq, best_s)}) {
                if (!present(w)) {
                    added.insert(w);
                    added.insert(adjoint(w));
                }
            }
        }
        // Close the added set under copy transpositions, adjoints and
        // per-letter outcome swaps. Closure keeps the symmetric group acting
        // on the index and makes the completeness expansion of every added
        // word land inside the index again.
        bool grew = true;
        while (grew) {
            grew = false;
            std::vector<Monomial> batch(added.begin(), added.end());
            for (const Monomial& w : batch) {
                auto insert_if_new = [&](const Monomial& img) {
                    if (!present(img)) {
                        added.insert(img);
                        grew = true;
                    }
                };
                insert_if_new(adjoint(w));
                for (int i = 1; i < params.n; ++i) {
                    insert_if_new(
                        apply_permutation(w, CopyPermutation::transposition(params.n, i, i + 1)));
                }
                const auto seq = w.letters();
                for (size_t pos = 0; pos < seq.size(); ++pos) {
                    const Letter l = seq[pos];
                    const int n_out = sc.outcomes[static_cast<size_t>(static_cast<int>(l.party()))];
                    for (int o = 0; o < n_out; ++o) {
                        if (o == l.outcome()) continue;
                        std::vector<Letter> variant = seq;
                        variant[pos] = Letter(l.party(), l.setting(), o, l.copy());
                        insert_if_new(canonicalize(variant));
                    }
                }
            }
        }
        words.insert(added.begin(), added.end());
        if (static_cast<int>(words.size()) > params.cap) {
            throw SizeCapError("moment index needs at least " + std::to_string(words.size()) +
                               " labels, cap is " + std::to_string(params.cap));
        }
        // every target must now be expressible
        for (const Monomial& t : targets) {
            if (!expressible(t)) {
                throw InternalError("augmentation failed to cover " + to_string(t));
            }
        }
    }

    // deterministic order: graded by length, then lexicographic display form
    std::vector<std::pair<Monomial, std::string>> decorated;
    decorated.reserve(words.size());
    for (const Monomial& w : words) decorated.emplace_back(w, to_string(w));
    std::sort(decorated.begin(), decorated.end(), DisplayLess{});

    MomentIndexSet out;
    out.words.reserve(decorated.size());
    for (auto& [w, disp] : decorated) {
        out.position.emplace(w, static_cast<int32_t>(out.words.size()));
        out.words.push_back(w);
    }
    out.base_count = base_count;
    out.localizer_count = localizer_count;
    return out;
}

namespace {

// ---------------------------------------------------------------------------
// union-find over tracked ids

struct UnionFind {
    std::vector<int32_t> parent;
    explicit UnionFind(size_t n) : parent(n) {
        for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int32_t>(i);
    }
    int32_t find(int32_t x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] =
                parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    void unite(int32_t a, int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);  // deterministic: smaller id is the root
        parent[static_cast<size_t>(b)] = a;
    }
};

// sparse row under construction, class-id keyed
struct RowBuilder {
    std::map<int32_t, double> terms;
    double constant = 0.0;

    void add(int32_t cls, double coef, int32_t identity_class) {
        if (cls == identity_class) {
            constant += coef;
        } else {
            auto [it, fresh] = terms.emplace(cls, coef);
            if (!fresh) it->second += coef;
        }
    }
    LinearEq finish(double tol) const {
        LinearEq eq;
        eq.constant = constant;
        double maxabs = 0.0;
        for (const auto& [c, v] : terms) maxabs = std::max(maxabs, std::abs(v));
        for (const auto& [c, v] : terms) {
            if (std::abs(v) > tol * std::max(1.0, maxabs)) eq.terms.emplace_back(c, v);
        }
        return eq;
    }
};

struct RowKeyHash {
    size_t operator()(const LinearEq& eq) const {
        uint64_t h = 1469598103934665603ull;
        auto mix = [&](uint64_t v) {
            h ^= v;
            h *= 1099511628211ull;
        };
        for (const auto& [c, v] : eq.terms) {
            mix(static_cast<uint64_t>(c));
            uint64_t bits;
            std::memcpy(&bits, &v, 8);
            mix(bits);
        }
        uint64_t bits;
        std::memcpy(&bits, &eq.constant, 8);
        mix(bits);
        return static_cast<size_t>(h);
    }
};
struct RowKeyEq {
    bool operator()(const LinearEq& a, const LinearEq& b) const {
        return a.constant == b.constant && a.terms == b.terms;
    }
};

// affine form over free-variable ids (post-elimination)
struct Form {
    std::vector<std::pair<int32_t, double>> terms;  // (free var id, coef), sorted
    double constant = 0.0;
};

bool monomial_has_reducible_letter(const Scenario& sc, const Monomial& m) {
    for (int i = 0; i < m.size(); ++i) {
        Letter l = m.letter(i);
        if (l.outcome() == sc.outcomes[static_cast<size_t>(static_cast<int>(l.party()))] - 1) {
            return true;
        }
    }
    return false;
}

// Expansion of a word over completeness-reduced words: every last-outcome
// letter G is replaced by 1 - sum of its siblings, expanded multiplicatively.
struct CgExpander {
    const Scenario& sc;
    std::unordered_map<Monomial, std::vector<std::pair<Monomial, double>>, MonomialHash> memo;

    const std::vector<std::pair<Monomial, double>>& expand(const Monomial& m) {
        auto it = memo.find(m);
        if (it != memo.end()) return it->second;
        std::vector<std::pair<Monomial, double>> out;
        int red = -1;
        for (int i = 0; i < m.size(); ++i) {
            Letter l = m.letter(i);
            if (l.outcome() == sc.outcomes[static_cast<size_t>(static_cast<int>(l.party()))] - 1) {
                red = i;
                break;
            }
        }
        if (red < 0) {
            out.emplace_back(m, 1.0);
        } else {
            std::map<Monomial, double> acc;
            auto absorb = [&](const std::vector<std::pair<Monomial, double>>& part, double w) {
                for (const auto& [mm, cc] : part) {
                    auto [jt, fresh] = acc.emplace(mm, w * cc);
                    if (!fresh) jt->second += w * cc;
                }
            };
            auto seq = m.letters();
            Letter l = seq[static_cast<size_t>(red)];
            std::vector<Letter> without;
            for (int i = 0; i < m.size(); ++i) {
                if (i != red) without.push_back(seq[static_cast<size_t>(i)]);
            }
            absorb(expand(canonicalize(without)), 1.0);
            const int n_out = sc.outcomes[static_cast<size_t>(static_cast<int>(l.party()))];
            for (int o = 0; o + 1 < n_out; ++o) {
                std::vector<Letter> sibling = seq;
                sibling[static_cast<size_t>(red)] = Letter(l.party(), l.setting(), o, l.copy());
                absorb(expand(canonicalize(sibling)), -1.0);
            }
            for (const auto& [mm, cc] : acc) {
                if (cc != 0.0) out.emplace_back(mm, cc);
            }
        }
        auto [jt, ok] = memo.emplace(m, std::move(out));
        return jt->second;
    }
};

}  // namespace

std::string AssemblySummary::to_string() const {
    std::ostringstream os;
    os << "index labels: " << index_size << " (" << base_words << " base + " << augmented_words
       << " augmented)\n";
    os << "tracked monomials: " << tracked_monomials << ", merged classes: " << classes
       << ", free variables: " << free_variables << "\n";
    os << "equalities: " << equalities << " (emitted " << equalities_emitted << ", eliminated "
       << eliminated << ", vacuous " << vacuous << ")\n";
    os << "factorization pairs: " << yac_pairs << ", skipped: " << yac_skipped << "\n";
    os << "blocks:";
    for (size_t i = 0; i < block_sizes.size(); ++i) {
        os << ' ' << block_sizes[i];
        if (i < solver_block_sizes.size() && solver_block_sizes[i] != block_sizes[i]) {
            os << "->" << solver_block_sizes[i];
        }
    }
    os << "\n";
    return os.str();
}

std::vector<Monomial> RelaxationProblem::tracked_representatives() const {
    return table.class_rep;
}

RelaxationProblem assemble(const Distribution& dist, const RelaxationParams& params) {
    params.validate();
    const Scenario& sc = dist.scenario;

    RelaxationProblem prob;
    prob.scenario = sc;
    prob.params = params;
    prob.index = build_index_set(sc, params);
    const MomentIndexSet& index = prob.index;
    const int32_t W = static_cast<int32_t>(index.words.size());
    const int32_t L = index.localizer_count;
    const std::vector<Letter> gens = build_generators(sc, params.n);

    // ---- tracked monomial registration and block entries --------------------
    VariableTable& table = prob.table;
    auto track = [&](const Monomial& m) -> int32_t {
        auto [it, fresh] = table.tracked.emplace(m, static_cast<int32_t>(table.tracked_monomials.size()));
        if (fresh) table.tracked_monomials.push_back(m);
        return it->second;
    };

    std::vector<Monomial> row_adjoints(static_cast<size_t>(W));
    for (int32_t i = 0; i < W; ++i) {
        row_adjoints[static_cast<size_t>(i)] = adjoint(index.words[static_cast<size_t>(i)]);
    }

    // entry tracked-ids, later remapped to class ids in place
    {
        RelaxationProblem::BlockDesc moment;
        moment.name = "moment";
        moment.rows.resize(static_cast<size_t>(W));
        for (int32_t i = 0; i < W; ++i) moment.rows[static_cast<size_t>(i)] = i;
        moment.entry_class.resize(static_cast<size_t>(W) * (static_cast<size_t>(W) + 1) / 2);
        size_t pos = 0;
        for (int32_t i = 0; i < W; ++i) {
            for (int32_t j = i; j < W; ++j) {
                moment.entry_class[pos++] = track(
                    multiply(row_adjoints[static_cast<size_t>(i)], index.words[static_cast<size_t>(j)]));
            }
        }
        prob.blocks.push_back(std::move(moment));
    }
    for (Letter g : gens) {
        RelaxationProblem::BlockDesc blk;
        blk.name = to_string(canonicalize(std::span<const Letter>(&g, 1)));
        blk.rows.resize(static_cast<size_t>(L));
        for (int32_t i = 0; i < L; ++i) blk.rows[static_cast<size_t>(i)] = i;
        blk.entry_class.resize(static_cast<size_t>(L) * (static_cast<size_t>(L) + 1) / 2);
        size_t pos = 0;
        const Letter gw[] = {g};
        const Monomial gm = canonicalize(gw);
        for (int32_t i = 0; i < L; ++i) {
            for (int32_t j = i; j < L; ++j) {
                blk.entry_class[pos++] =
                    track(multiply(row_adjoints[static_cast<size_t>(i)],
                                   multiply(gm, index.words[static_cast<size_t>(j)])));
            }
        }
        prob.blocks.push_back(std::move(blk));
    }

    const size_t n_tracked = table.tracked_monomials.size();
    int max_tracked_len = 0;
    for (const Monomial& m : table.tracked_monomials) {
        max_tracked_len = std::max(max_tracked_len, m.size());
    }

    // ---- variable merging ----------------------------------------------------
    UnionFind uf(n_tracked);
    {
        std::vector<CopyPermutation> transpositions;
        for (int i = 1; i < params.n; ++i) {
            transpositions.push_back(CopyPermutation::transposition(params.n, i, i + 1));
        }
        for (size_t t = 0; t < n_tracked; ++t) {
            const Monomial& m = table.tracked_monomials[t];
            const int32_t adj = table.tracked_id(adjoint(m));
            if (adj >= 0) uf.unite(static_cast<int32_t>(t), adj);
            for (const auto& pi : transpositions) {
                const int32_t img = table.tracked_id(apply_permutation(m, pi));
                if (img >= 0) uf.unite(static_cast<int32_t>(t), img);
            }
            if (params.hierarchy == Hierarchy::inflation) {
                bool ac_only = true;
                for (int i = 0; i < m.size(); ++i) {
                    if (m.letter(i).party() == Party::B) {
                        ac_only = false;
                        break;
                    }
                }
                if (ac_only && m.size() > 0) {
                    for (const auto& pi : transpositions) {
                        const int32_t img = table.tracked_id(
                            apply_party_restricted_permutation(m, pi, Party::C));
                        if (img >= 0) uf.unite(static_cast<int32_t>(t), img);
                    }
                }
            }
        }
    }

    // ---- classes, ordered by graded representative ---------------------------
    {
        std::unordered_map<int32_t, int32_t> root_to_slot;
        std::vector<Monomial> slot_rep;
        std::vector<int32_t> slot_rep_id;
        std::vector<int32_t> slot_of(n_tracked);
        for (size_t t = 0; t < n_tracked; ++t) {
            const int32_t root = uf.find(static_cast<int32_t>(t));
            auto [it, fresh] = root_to_slot.emplace(root, static_cast<int32_t>(slot_rep.size()));
            if (fresh) {
                slot_rep.push_back(table.tracked_monomials[t]);
                slot_rep_id.push_back(static_cast<int32_t>(t));
            } else if (table.tracked_monomials[t] < slot_rep[static_cast<size_t>(it->second)]) {
                slot_rep[static_cast<size_t>(it->second)] = table.tracked_monomials[t];
                slot_rep_id[static_cast<size_t>(it->second)] = static_cast<int32_t>(t);
            }
            slot_of[t] = it->second;
        }
        std::vector<int32_t> order(slot_rep.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int32_t>(i);
        std::sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
            return slot_rep[static_cast<size_t>(a)] < slot_rep[static_cast<size_t>(b)];
        });
        std::vector<int32_t> slot_to_class(order.size());
        table.class_rep.resize(order.size());
        table.rep_tracked_id.resize(order.size());
        for (size_t rank = 0; rank < order.size(); ++rank) {
            slot_to_class[static_cast<size_t>(order[rank])] = static_cast<int32_t>(rank);
            table.class_rep[rank] = slot_rep[static_cast<size_t>(order[rank])];
            table.rep_tracked_id[rank] = slot_rep_id[static_cast<size_t>(order[rank])];
        }
        table.class_of.resize(n_tracked);
        for (size_t t = 0; t < n_tracked; ++t) {
            table.class_of[t] = slot_to_class[static_cast<size_t>(slot_of[t])];
        }
        table.n_classes = static_cast<int32_t>(order.size());
        table.identity_class = table.class_id(Monomial());
        if (table.identity_class != 0 || !table.class_rep[0].is_identity()) {
            throw InternalError("identity must be the least class");
        }
    }
    const int32_t identity_class = table.identity_class;

    // remap block entries tracked id -> class id
    for (auto& blk : prob.blocks) {
        for (auto& e : blk.entry_class) e = table.class_of[static_cast<size_t>(e)];
    }

    // ---- equalities -----------------------------------------------------------
    std::unordered_set<LinearEq, RowKeyHash, RowKeyEq> row_set;
    std::vector<LinearEq>& equalities = prob.equalities;
    int64_t emitted = 0, vacuous_rows = 0;
    auto push_row = [&](RowBuilder& rb) {
        ++emitted;
        LinearEq eq = rb.finish(1e-13);
        if (eq.terms.empty()) {
            if (std::abs(eq.constant) > 1e-8) {
                throw InternalError("inconsistent emitted equality (constant " +
                                    format_double(eq.constant) + ")");
            }
            ++vacuous_rows;
            return;
        }
        if (row_set.insert(eq).second) equalities.push_back(eq);
    };

    // completeness over all index pairs, every party/setting/copy
    {
        std::vector<Letter> base;
        const auto moment_entry_class = [&](int32_t i, int32_t j) {
            const auto& blk = prob.blocks[0];
            if (i > j) std::swap(i, j);
            const size_t off = static_cast<size_t>(i) * (2 * static_cast<size_t>(W) - static_cast<size_t>(i) + 1) / 2 +
                               static_cast<size_t>(j - i);
            return blk.entry_class[off];
        };
        for (int32_t i = 0; i < W; ++i) {
            const auto u_adj = row_adjoints[static_cast<size_t>(i)].letters();
            for (int32_t j = i; j < W; ++j) {
                const Monomial& v = index.words[static_cast<size_t>(j)];
                const int total =
                    static_cast<int>(u_adj.size()) + v.size() + 1;
                if (total > max_tracked_len) continue;
                const int32_t rhs_class = moment_entry_class(i, j);
                for (int party = 0; party < 3; ++party) {
                    const int n_out = sc.outcomes[static_cast<size_t>(party)];
                    for (int x = 0; x < sc.settings[static_cast<size_t>(party)]; ++x) {
                        for (int copy = 1; copy <= params.n; ++copy) {
                            RowBuilder rb;
                            bool ok = true;
                            for (int o = 0; o < n_out && ok; ++o) {
                                base.clear();
                                base.insert(base.end(), u_adj.begin(), u_adj.end());
                                base.emplace_back(static_cast<Party>(party), x, o, copy);
                                for (int t = 0; t < v.size(); ++t) base.push_back(v.letter(t));
                                const int32_t cls = table.class_id(canonicalize(base));
                                if (cls < 0) {
                                    ok = false;
                                } else {
                                    rb.add(cls, 1.0, identity_class);
                                }
                            }
                            if (!ok) continue;
                            rb.add(rhs_class, -1.0, identity_class);
                            push_row(rb);
                        }
                    }
                }
            }
        }
    }

    // polarization factorization equalities
    int32_t yac_pairs = 0, yac_skipped = 0;
    if (params.hierarchy == Hierarchy::polarization) {
        for (const auto& [a, c] : enumerate_fact_words(sc, params.effective_d())) {
            ++yac_pairs;
            PolarizationOp op = build_yac(sc, a, c);
            RowBuilder rb;
            bool covered = true;
            for (const auto& [m, coef] : op.poly.terms) {
                const int32_t cls = table.class_id(m);
                if (cls < 0) {
                    covered = false;
                    break;
                }
                rb.add(cls, coef, identity_class);
            }
            if (!covered) {
                ++yac_skipped;
                continue;
            }
            push_row(rb);
        }
    }

    // ---- objective ------------------------------------------------------------
    {
        PolarizationOp y0 = build_y0(dist);
        RowBuilder rb;
        for (const auto& [m, coef] : y0.poly.terms) {
            const int32_t cls = table.class_id(m);
            if (cls < 0) {
                throw InputError("objective monomial " + to_string(m) +
                                 " is not representable at this level; enable augmentation or "
                                 "raise k");
            }
            rb.add(cls, coef, identity_class);
        }
        prob.objective_constant = rb.constant;
        for (const auto& [cls, coef] : rb.terms) {
            if (coef != 0.0) prob.objective_terms.emplace_back(cls, coef);
        }
    }

    // ---- exact sparse Gaussian elimination -------------------------------------
    // pivot_sub[cls] when pivoted: x_cls = terms . x + constant
    struct Sub {
        std::vector<std::pair<int32_t, double>> terms;
        double constant = 0.0;
    };
    std::unordered_map<int32_t, Sub> pivot_sub;
    std::vector<int32_t> pivot_order;
    int64_t eliminated = 0;

    auto reduce_full = [&](std::map<int32_t, double>& acc, double& cst) {
        bool again = true;
        while (again) {
            again = false;
            for (auto it = acc.begin(); it != acc.end();) {
                auto pit = pivot_sub.find(it->first);
                if (pit == pivot_sub.end()) {
                    ++it;
                    continue;
                }
                const double coef = it->second;
                it = acc.erase(it);
                cst += coef * pit->second.constant;
                for (const auto& [c2, v2] : pit->second.terms) {
                    auto [jt, fresh] = acc.emplace(c2, coef * v2);
                    if (!fresh) jt->second += coef * v2;
                }
                again = true;
                break;
            }
        }
        double maxabs = 1.0;
        for (const auto& [c, v] : acc) maxabs = std::max(maxabs, std::abs(v));
        for (auto it = acc.begin(); it != acc.end();) {
            if (std::abs(it->second) <= 1e-12 * maxabs) {
                it = acc.erase(it);
            } else {
                ++it;
            }
        }
    };

    for (const LinearEq& eq : equalities) {
        std::map<int32_t, double> acc(eq.terms.begin(), eq.terms.end());
        double cst = eq.constant;
        reduce_full(acc, cst);
        if (acc.empty()) {
            if (std::abs(cst) > 1e-7) {
                throw InternalError("inconsistent equalities during elimination (residual " +
                                    format_double(cst) + ")");
            }
            ++vacuous_rows;
            continue;
        }
        // partial pivoting: largest coefficient; within the near-max band
        // prefer classes whose representative still carries a reducible
        // letter, then the deepest class id
        double maxabs = 0.0;
        for (const auto& [c, v] : acc) maxabs = std::max(maxabs, std::abs(v));
        int32_t pivot = -1;
        int best_red = -1;
        for (const auto& [c, v] : acc) {
            if (std::abs(v) < 0.5 * maxabs) continue;
            const int red = monomial_has_reducible_letter(sc, table.class_rep[static_cast<size_t>(c)])
                                ? 1
                                : 0;
            if (red > best_red || (red == best_red && c > pivot)) {
                best_red = red;
                pivot = c;
            }
        }
        const double pcoef = acc.at(pivot);
        acc.erase(pivot);
        Sub sub;
        sub.constant = -cst / pcoef;
        sub.terms.reserve(acc.size());
        for (const auto& [c, v] : acc) sub.terms.emplace_back(c, -v / pcoef);
        pivot_sub.emplace(pivot, std::move(sub));
        pivot_order.push_back(pivot);
        ++eliminated;
    }

    // ---- final affine forms over free variables --------------------------------
    std::vector<int32_t>& free_classes = prob.free_classes;
    std::vector<int32_t> var_of_class(static_cast<size_t>(table.n_classes), -1);
    for (int32_t cls = 0; cls < table.n_classes; ++cls) {
        if (cls == identity_class) continue;
        if (pivot_sub.count(cls)) continue;
        var_of_class[static_cast<size_t>(cls)] = static_cast<int32_t>(free_classes.size());
        free_classes.push_back(cls);
    }
    const int32_t n_free = static_cast<int32_t>(free_classes.size());

    // finalize pivots in reverse creation order: every pivoted term inside a
    // substitution was created later, so it is already final
    std::unordered_map<int32_t, Form> final_pivot;
    for (auto it = pivot_order.rbegin(); it != pivot_order.rend(); ++it) {
        const Sub& sub = pivot_sub.at(*it);
        std::map<int32_t, double> acc;
        double cst = sub.constant;
        for (const auto& [c, v] : sub.terms) {
            auto fit = final_pivot.find(c);
            if (fit == final_pivot.end()) {
                auto [jt, fresh] = acc.emplace(c, v);
                if (!fresh) jt->second += v;
            } else {
                cst += v * fit->second.constant;
                for (const auto& [c2, v2] : fit->second.terms) {
                    auto [jt, fresh] = acc.emplace(free_classes[static_cast<size_t>(c2)], v * v2);
                    if (!fresh) jt->second += v * v2;
                }
            }
        }
        Form f;
        f.constant = cst;
        double maxabs = 1.0;
        for (const auto& [c, v] : acc) maxabs = std::max(maxabs, std::abs(v));
        for (const auto& [c, v] : acc) {
            if (std::abs(v) <= 1e-12 * maxabs) continue;
            const int32_t var = var_of_class[static_cast<size_t>(c)];
            if (var < 0) throw InternalError("pivot substitution references a non-free class");
            f.terms.emplace_back(var, v);
        }
        std::sort(f.terms.begin(), f.terms.end());
        final_pivot.emplace(*it, std::move(f));
    }

    auto class_form = [&](int32_t cls) -> Form {
        if (cls == identity_class) {
            Form f;
            f.constant = 1.0;
            return f;
        }
        auto it = final_pivot.find(cls);
        if (it != final_pivot.end()) return it->second;
        Form f;
        f.terms.emplace_back(var_of_class[static_cast<size_t>(cls)], 1.0);
        return f;
    };

    // ---- exact row deflation -----------------------------------------------------
    // Rows of words carrying a last-outcome letter are affine combinations of
    // completeness-reduced rows; verified entrywise and removed from the
    // solver LMI. The full blocks above keep the specified structure.
    CgExpander expander{sc, {}};
    std::vector<std::vector<int32_t>> kept_rows(prob.blocks.size());
    bool forced_keep = false;

    // cache of class forms (classes are dense, reuse across blocks)
    std::vector<Form> form_of_class(static_cast<size_t>(table.n_classes));
    std::vector<char> form_ready(static_cast<size_t>(table.n_classes), 0);
    auto form_ref = [&](int32_t cls) -> const Form& {
        if (!form_ready[static_cast<size_t>(cls)]) {
            form_of_class[static_cast<size_t>(cls)] = class_form(cls);
            form_ready[static_cast<size_t>(cls)] = 1;
        }
        return form_of_class[static_cast<size_t>(cls)];
    };

    for (size_t b = 0; b < prob.blocks.size(); ++b) {
        const auto& blk = prob.blocks[b];
        const int32_t nb = static_cast<int32_t>(blk.rows.size());
        auto entry_class = [&](int32_t i, int32_t j) {
            if (i > j) std::swap(i, j);
            const size_t off = static_cast<size_t>(i) * (2 * static_cast<size_t>(nb) - static_cast<size_t>(i) + 1) / 2 +
                               static_cast<size_t>(j - i);
            return blk.entry_class[off];
        };
        std::vector<char> keep(static_cast<size_t>(nb), 0);
        for (int32_t r = 0; r < nb; ++r) {
            const Monomial& w = index.words[static_cast<size_t>(blk.rows[static_cast<size_t>(r)])];
            keep[static_cast<size_t>(r)] = monomial_has_reducible_letter(sc, w) ? 0 : 1;
        }
        // verify every dropped row against its expansion over kept rows
        for (int32_t r = 0; r < nb; ++r) {
            if (keep[static_cast<size_t>(r)]) continue;
            const Monomial& w = index.words[static_cast<size_t>(blk.rows[static_cast<size_t>(r)])];
            const auto& expansion = expander.expand(w);
            bool valid = true;
            std::vector<int32_t> exp_rows(expansion.size(), -1);
            for (size_t t = 0; t < expansion.size() && valid; ++t) {
                const int32_t pos = index.find(expansion[t].first);
                if (pos < 0 || pos >= nb) {
                    valid = false;
                } else {
                    exp_rows[t] = pos;
                }
            }
            for (int32_t j = 0; j < nb && valid; ++j) {
                const Form& lhs = form_ref(entry_class(r, j));
                std::map<int32_t, double> acc;
                double cst = 0.0;
                for (size_t t = 0; t < expansion.size(); ++t) {
                    const Form& f = form_ref(entry_class(exp_rows[t], j));
                    cst += expansion[t].second * f.constant;
                    for (const auto& [var, coef] : f.terms) {
                        auto [jt, fresh] = acc.emplace(var, expansion[t].second * coef);
                        if (!fresh) jt->second += expansion[t].second * coef;
                    }
                }
                double scale = std::abs(lhs.constant) + std::abs(cst) + 1.0;
                if (std::abs(lhs.constant - cst) > 1e-9 * scale) valid = false;
                std::map<int32_t, double> lhs_map(lhs.terms.begin(), lhs.terms.end());
                for (const auto& [var, coef] : acc) {
                    auto lt = lhs_map.find(var);
                    const double lv = lt == lhs_map.end() ? 0.0 : lt->second;
                    if (std::abs(lv - coef) > 1e-9 * (std::abs(lv) + std::abs(coef) + 1.0)) {
                        valid = false;
                        break;
                    }
                    if (lt != lhs_map.end()) lhs_map.erase(lt);
                }
                for (const auto& [var, coef] : lhs_map) {
                    if (std::abs(coef) > 1e-9) valid = false;
                }
            }
            if (!valid) {
                keep[static_cast<size_t>(r)] = 1;
                forced_keep = true;
            }
        }
        for (int32_t r = 0; r < nb; ++r) {
            if (keep[static_cast<size_t>(r)]) kept_rows[b].push_back(r);
        }
        if (kept_rows[b].empty()) kept_rows[b].push_back(0);
    }

    // ---- solver problem --------------------------------------------------------
    SdpProblem& sdp = prob.sdp;
    sdp.nvars = n_free;
    sdp.objective.assign(static_cast<size_t>(n_free), 0.0);
    {
        std::map<int32_t, double> obj_acc;
        double obj_cst = prob.objective_constant;
        for (const auto& [cls, coef] : prob.objective_terms) {
            const Form& f = form_ref(cls);
            obj_cst += coef * f.constant;
            for (const auto& [var, c2] : f.terms) {
                auto [jt, fresh] = obj_acc.emplace(var, coef * c2);
                if (!fresh) jt->second += coef * c2;
            }
        }
        for (const auto& [var, coef] : obj_acc) {
            if (std::abs(coef) > 1e-14) sdp.objective[static_cast<size_t>(var)] = coef;
        }
        prob.sdp_objective_constant = obj_cst;
    }

    for (size_t b = 0; b < prob.blocks.size(); ++b) {
        const auto& blk = prob.blocks[b];
        const int32_t nb = static_cast<int32_t>(blk.rows.size());
        auto entry_class = [&](int32_t i, int32_t j) {
            if (i > j) std::swap(i, j);
            const size_t off = static_cast<size_t>(i) * (2 * static_cast<size_t>(nb) - static_cast<size_t>(i) + 1) / 2 +
                               static_cast<size_t>(j - i);
            return blk.entry_class[off];
        };
        SdpProblem::Block out;
        const auto& rows = kept_rows[b];
        out.size = static_cast<int32_t>(rows.size());
        for (int32_t i = 0; i < out.size; ++i) {
            for (int32_t j = i; j < out.size; ++j) {
                const Form& f = form_ref(entry_class(rows[static_cast<size_t>(i)], rows[static_cast<size_t>(j)]));
                if (f.constant != 0.0) {
                    out.entries.push_back({0, i + 1, j + 1, -f.constant});
                }
                for (const auto& [var, coef] : f.terms) {
                    if (coef != 0.0) out.entries.push_back({var + 1, i + 1, j + 1, coef});
                }
            }
        }
        sdp.blocks.push_back(std::move(out));
    }
    sdp.normalize();

    // every free variable must appear in the deflated LMI
    {
        std::vector<char> seen(static_cast<size_t>(n_free), 0);
        for (const auto& blk : sdp.blocks) {
            for (const auto& e : blk.entries) {
                if (e.matno > 0) seen[static_cast<size_t>(e.matno - 1)] = 1;
            }
        }
        for (int32_t v = 0; v < n_free; ++v) {
            if (!seen[static_cast<size_t>(v)]) {
                throw InternalError("free variable " +
                                    to_string(table.class_rep[static_cast<size_t>(
                                        free_classes[static_cast<size_t>(v)])]) +
                                    " lost by deflation");
            }
        }
    }

    // Archimedean contraction bounds: every index word is a product of
    // positive contractions, so rho(u*u) <= 1 (likewise through a localizing
    // generator). Completeness plus sibling positivity does not reproduce
    // these at finite level for non-projective words, and without them the
    // LMI has recession directions through the high-degree diagonal moments.
    int32_t n_bounds = 0;
    {
        std::set<int32_t> diag_classes;
        for (size_t b = 0; b < prob.blocks.size(); ++b) {
            const auto& blk = prob.blocks[b];
            const int32_t nb = static_cast<int32_t>(blk.rows.size());
            auto entry_class = [&](int32_t i, int32_t j) {
                if (i > j) std::swap(i, j);
                const size_t off = static_cast<size_t>(i) * (2 * static_cast<size_t>(nb) - static_cast<size_t>(i) + 1) / 2 +
                                   static_cast<size_t>(j - i);
                return blk.entry_class[off];
            };
            for (int32_t r : kept_rows[b]) diag_classes.insert(entry_class(r, r));
        }
        for (int32_t cls : diag_classes) {
            const Form& f = form_ref(cls);
            if (f.terms.empty()) continue;  // pinned diagonal, nothing to bound
            SdpProblem::Block out;
            out.size = 1;
            if (f.constant != 1.0) out.entries.push_back({0, 1, 1, f.constant - 1.0});
            for (const auto& [var, coef] : f.terms) {
                out.entries.push_back({var + 1, 1, 1, -coef});
            }
            sdp.blocks.push_back(std::move(out));
            ++n_bounds;
        }
        sdp.normalize();
    }

    // ---- symmetry hints ----------------------------------------------------------
    // Emitted whenever the kept rows are closed under every copy
    // transposition; the solver additionally validates entry-level
    // invariance before relying on them.
    (void)forced_keep;
    if (params.n >= 2) {
        SymmetryHints hints;
        bool all_ok = true;
        for (int tindex = 1; tindex < params.n && all_ok; ++tindex) {
            CopyPermutation pi = CopyPermutation::transposition(params.n, tindex, tindex + 1);
            SymmetryHints::Gen gen;
            gen.block_image.resize(sdp.blocks.size());
            gen.row_image.resize(sdp.blocks.size());
            // contraction-bound blocks are class-indexed, hence fixed points
            for (size_t b = prob.blocks.size(); b < sdp.blocks.size(); ++b) {
                gen.block_image[b] = static_cast<int32_t>(b);
                gen.row_image[b] = {0};
            }
            // block 0 = moment; block 1+g = localizer of generator g
            gen.block_image[0] = 0;
            std::unordered_map<uint16_t, int32_t> gen_block;
            for (size_t g = 0; g < gens.size(); ++g) {
                gen_block.emplace(gens[g].bits(), static_cast<int32_t>(g + 1));
            }
            for (size_t g = 0; g < gens.size(); ++g) {
                Letter l = gens[g];
                Letter img(l.party(), l.setting(), l.outcome(),
                           pi.image[static_cast<size_t>(l.copy() - 1)]);
                gen.block_image[g + 1] = gen_block.at(img.bits());
            }
            // row maps over deflated rows
            for (size_t b = 0; b < prob.blocks.size() && all_ok; ++b) {
                const auto& rows = kept_rows[b];
                const auto& target_rows = kept_rows[static_cast<size_t>(gen.block_image[b])];
                std::unordered_map<int32_t, int32_t> target_pos;
                for (size_t i = 0; i < target_rows.size(); ++i) {
                    target_pos.emplace(target_rows[i], static_cast<int32_t>(i));
                }
                auto& rmap = gen.row_image[b];
                rmap.resize(rows.size());
                for (size_t i = 0; i < rows.size() && all_ok; ++i) {
                    const Monomial& w = index.words[static_cast<size_t>(rows[i])];
                    const int32_t img_pos = index.find(apply_permutation(w, pi));
                    if (img_pos < 0) {
                        all_ok = false;
                        break;
                    }
                    auto it = target_pos.find(img_pos);
                    if (it == target_pos.end()) {
                        all_ok = false;
                        break;
                    }
                    rmap[i] = it->second;
                }
            }
            if (all_ok) hints.gens.push_back(std::move(gen));
        }
        if (all_ok) prob.hints = std::move(hints);
    }

    // ---- summary -------------------------------------------------------------------
    AssemblySummary& s = prob.summary;
    s.index_size = W;
    s.base_words = index.base_count;
    s.augmented_words = W - index.base_count;
    s.tracked_monomials = static_cast<int64_t>(n_tracked);
    s.classes = table.n_classes;
    s.free_variables = n_free;
    s.equalities_emitted = emitted;
    s.equalities = static_cast<int64_t>(equalities.size());
    s.eliminated = eliminated;
    s.vacuous = vacuous_rows;
    s.yac_pairs = yac_pairs;
    s.yac_skipped = yac_skipped;
    for (const auto& blk : prob.blocks) s.block_sizes.push_back(static_cast<int32_t>(blk.rows.size()));
    for (const auto& blk : sdp.blocks) s.solver_block_sizes.push_back(blk.size);
    return prob;
}

FeasibilityReport check_feasible_point(const RelaxationProblem& prob,
                                       const MomentAssignment& moments) {
    const VariableTable& table = prob.table;
    std::vector<double> val(static_cast<size_t>(table.n_classes), 0.0);
    for (int32_t cls = 0; cls < table.n_classes; ++cls) {
        const Monomial& rep = table.class_rep[static_cast<size_t>(cls)];
        auto it = moments.find(rep);
        if (it == moments.end()) {
            throw InputError("missing moment for tracked monomial " + to_string(rep));
        }
        val[static_cast<size_t>(cls)] = it->second;
    }

    FeasibilityReport rep;
    for (const LinearEq& eq : prob.equalities) {
        double r = eq.constant;
        for (const auto& [cls, coef] : eq.terms) r += coef * val[static_cast<size_t>(cls)];
        rep.max_equality_residual = std::max(rep.max_equality_residual, std::abs(r));
    }

    for (const auto& blk : prob.blocks) {
        const int32_t nb = static_cast<int32_t>(blk.rows.size());
        Eigen::MatrixXd M(nb, nb);
        size_t pos = 0;
        for (int32_t i = 0; i < nb; ++i) {
            for (int32_t j = i; j < nb; ++j) {
                const double v = val[static_cast<size_t>(blk.entry_class[pos++])];
                M(i, j) = v;
                M(j, i) = v;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
        rep.block_min_eigenvalue.push_back(es.eigenvalues().minCoeff());
    }

    double obj = prob.objective_constant;
    for (const auto& [cls, coef] : prob.objective_terms) obj += coef * val[static_cast<size_t>(cls)];
    rep.objective = obj;
    return rep;
}

}  // namespace biloc
