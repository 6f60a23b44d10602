#include "biloc/inflation.hpp"

#include <algorithm>

namespace biloc {

CopyPermutation CopyPermutation::identity(int n) {
    CopyPermutation p;
    p.n = n;
    p.image.resize(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) p.image[static_cast<size_t>(i - 1)] = i;
    return p;
}

CopyPermutation CopyPermutation::transposition(int n, int i, int j) {
    CopyPermutation p = identity(n);
    p.image[static_cast<size_t>(i - 1)] = j;
    p.image[static_cast<size_t>(j - 1)] = i;
    return p;
}

void CopyPermutation::validate() const {
    if (n < 1 || static_cast<int>(image.size()) != n) {
        throw InputError("copy permutation has wrong size");
    }
    std::vector<bool> seen(static_cast<size_t>(n), false);
    for (int v : image) {
        if (v < 1 || v > n || seen[static_cast<size_t>(v - 1)]) {
            throw InputError("copy permutation image is not a bijection on 1..n");
        }
        seen[static_cast<size_t>(v - 1)] = true;
    }
}

CopyPermutation CopyPermutation::after(const CopyPermutation& other) const {
    if (n != other.n) throw InputError("copy permutation size mismatch");
    CopyPermutation out = identity(n);
    for (int i = 1; i <= n; ++i) {
        out.image[static_cast<size_t>(i - 1)] =
            image[static_cast<size_t>(other.image[static_cast<size_t>(i - 1)] - 1)];
    }
    return out;
}

std::vector<Letter> build_generators(const Scenario& sc, int n_copies) {
    if (n_copies < 1) throw InputError("copy count must be >= 1");
    sc.validate();
    std::vector<Letter> out;
    out.reserve(static_cast<size_t>(n_copies) * static_cast<size_t>(sc.generators_per_copy()));
    for (int copy = 1; copy <= n_copies; ++copy) {
        for (int pi = 0; pi < 3; ++pi) {
            for (int x = 0; x < sc.settings[static_cast<size_t>(pi)]; ++x) {
                for (int a = 0; a < sc.outcomes[static_cast<size_t>(pi)]; ++a) {
                    out.emplace_back(static_cast<Party>(pi), x, a, copy);
                }
            }
        }
    }
    return out;
}

Monomial apply_permutation(const Monomial& m, const CopyPermutation& pi) {
    std::vector<Letter> word;
    word.reserve(static_cast<size_t>(m.size()));
    for (int i = 0; i < m.size(); ++i) {
        Letter l = m.letter(i);
        if (l.copy() > pi.n) throw InputError("monomial copy index exceeds permutation size");
        word.emplace_back(l.party(), l.setting(), l.outcome(),
                          pi.image[static_cast<size_t>(l.copy() - 1)]);
    }
    return canonicalize(word);
}

Monomial apply_party_restricted_permutation(const Monomial& m, const CopyPermutation& pi,
                                            Party party) {
    std::vector<Letter> word;
    word.reserve(static_cast<size_t>(m.size()));
    for (int i = 0; i < m.size(); ++i) {
        Letter l = m.letter(i);
        if (l.party() == Party::B) {
            throw InputError("party-restricted permutation is undefined on B-party letters");
        }
        if (l.party() == party) {
            if (l.copy() > pi.n) throw InputError("monomial copy index exceeds permutation size");
            word.emplace_back(l.party(), l.setting(), l.outcome(),
                              pi.image[static_cast<size_t>(l.copy() - 1)]);
        } else {
            word.push_back(l);
        }
    }
    return canonicalize(word);
}

PolarizationOp build_y0(const Distribution& d) {
    const Scenario& sc = d.scenario;
    PolarizationOp op;
    op.kind = PolarizationKind::objective_y0;
    op.poly.tag = scenario_tag(sc, 2);

    double const_term = 0.0;
    for (int x = 0; x < sc.settings[0]; ++x)
        for (int y = 0; y < sc.settings[1]; ++y)
            for (int z = 0; z < sc.settings[2]; ++z)
                for (int a = 0; a < sc.outcomes[0]; ++a)
                    for (int b = 0; b < sc.outcomes[1]; ++b)
                        for (int g = 0; g < sc.outcomes[2]; ++g) {
                            const double pv = d.at(a, b, g, x, y, z);
                            Letter A1(Party::A, x, a, 1), B1(Party::B, y, b, 1),
                                C1(Party::C, z, g, 1);
                            Letter A2(Party::A, x, a, 2), B2(Party::B, y, b, 2),
                                C2(Party::C, z, g, 2);
                            const Letter w6[] = {A1, B1, C1, A2, B2, C2};
                            const Letter w3[] = {A1, B1, C1};
                            op.poly.add(canonicalize(w6), 1.0);
                            op.poly.add(canonicalize(w3), -2.0 * pv);
                            const_term += pv * pv;
                        }
    op.poly.add(Monomial(), const_term);
    std::erase_if(op.poly.terms, [](const auto& kv) { return kv.second == 0.0; });
    return op;
}

namespace {

Monomial with_copy(const Monomial& pattern, int copy) {
    std::vector<Letter> word;
    word.reserve(static_cast<size_t>(pattern.size()));
    for (int i = 0; i < pattern.size(); ++i) {
        Letter l = pattern.letter(i);
        word.emplace_back(l.party(), l.setting(), l.outcome(), copy);
    }
    return canonicalize(word);
}

void check_pattern(const Scenario& sc, const Monomial& m, Party party, const char* name) {
    if (m.is_identity()) {
        throw InputError(std::string("factorization pattern ") + name + " must be nonempty");
    }
    for (int i = 0; i < m.size(); ++i) {
        Letter l = m.letter(i);
        if (l.party() != party) {
            throw InputError(std::string("factorization pattern ") + name +
                             " contains a wrong-party letter");
        }
        if (l.copy() != 1) {
            throw InputError(std::string("factorization pattern ") + name +
                             " must reference copy 1");
        }
        if (!letter_in_scenario(sc, 1, l)) {
            throw InputError(std::string("factorization pattern ") + name +
                             " letter out of scenario range");
        }
    }
}

}  // namespace

PolarizationOp build_yac(const Scenario& sc, const Monomial& a, const Monomial& c) {
    check_pattern(sc, a, Party::A, "a");
    check_pattern(sc, c, Party::C, "c");
    PolarizationOp op;
    op.kind = PolarizationKind::factorization_yac;
    op.a_pattern = a;
    op.c_pattern = c;
    op.poly.tag = scenario_tag(sc, 4);

    auto term = [&](int ai, int ci, int aj, int cj) {
        Monomial m = multiply(multiply(with_copy(a, ai), with_copy(c, ci)),
                              multiply(with_copy(a, aj), with_copy(c, cj)));
        return m;
    };
    op.poly.add(term(1, 1, 2, 2), 1.0);
    op.poly.add(term(1, 1, 2, 3), -2.0);
    op.poly.add(term(1, 2, 3, 4), 1.0);
    std::erase_if(op.poly.terms, [](const auto& kv) { return kv.second == 0.0; });
    return op;
}

namespace {

// All canonical copy-1 words of a single party up to the given length, in
// graded display order (same-class letters never commute, so every raw
// sequence is already canonical and distinct).
std::vector<Monomial> party_words(const Scenario& sc, Party party, int depth) {
    std::vector<Letter> letters;
    const int pi = static_cast<int>(party);
    for (int x = 0; x < sc.settings[static_cast<size_t>(pi)]; ++x)
        for (int a = 0; a < sc.outcomes[static_cast<size_t>(pi)]; ++a)
            letters.emplace_back(party, x, a, 1);

    std::vector<Monomial> out;
    std::vector<Monomial> frontier{Monomial()};
    for (int len = 1; len <= depth; ++len) {
        std::vector<Monomial> next;
        next.reserve(frontier.size() * letters.size());
        for (const Monomial& w : frontier) {
            for (Letter l : letters) {
                std::vector<Letter> seq = w.letters();
                seq.push_back(l);
                next.push_back(canonicalize(seq));
            }
        }
        // dedup by canonical form (no-op for single-class words, kept as a
        // guard against future relation changes)
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

}  // namespace

std::vector<std::pair<Monomial, Monomial>> enumerate_fact_words(const Scenario& sc, int depth) {
    if (depth < 1) throw InputError("factorization word depth must be >= 1");
    auto a_words = party_words(sc, Party::A, depth);
    auto c_words = party_words(sc, Party::C, depth);
    std::vector<std::pair<Monomial, Monomial>> out;
    out.reserve(a_words.size() * c_words.size());
    for (const auto& a : a_words)
        for (const auto& c : c_words) out.emplace_back(a, c);
    return out;
}

}  // namespace biloc
