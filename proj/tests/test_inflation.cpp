#include <doctest.h>

#include <cmath>
#include <set>

#include "biloc/inflation.hpp"
#include "biloc/oracle.hpp"

using namespace biloc;

namespace {

Letter A(int outcome, int setting, int copy = 1) { return Letter(Party::A, setting, outcome, copy); }
Letter C(int outcome, int setting, int copy = 1) { return Letter(Party::C, setting, outcome, copy); }

Monomial mono(std::initializer_list<Letter> ls) {
    std::vector<Letter> v(ls);
    return canonicalize(v);
}

Distribution uniform_binary_single() {
    Scenario sc(1, 1, 1, 2, 2, 2);
    return Distribution(sc, std::vector<double>(8, 0.125));
}

double eval_poly(const Polynomial& poly, const MomentAssignment& mom) {
    double acc = 0.0;
    for (const auto& [m, c] : poly.terms) acc += c * mom.at(m);
    return acc;
}

MomentAssignment moments_for(const QuantumModel& model, const Polynomial& poly, int n) {
    std::vector<Monomial> monos;
    for (const auto& [m, c] : poly.terms) monos.push_back(m);
    return product_state_moments(model, monos, n);
}

}  // namespace

TEST_CASE("build_generators cardinalities") {
    CHECK(build_generators(Scenario(2, 2, 2, 2, 2, 2), 2).size() == 24);
    CHECK(build_generators(Scenario(1, 1, 1, 1, 1, 1), 1).size() == 3);
    CHECK(build_generators(Scenario(1, 1, 1, 2, 2, 2), 4).size() == 24);
    CHECK_THROWS_AS(build_generators(Scenario(1, 1, 1, 2, 2, 2), 0), InputError);
}

TEST_CASE("apply_permutation is a left group action") {
    Monomial m = mono({A(0, 0, 1), Letter(Party::B, 0, 0, 2)});
    CopyPermutation swap12 = CopyPermutation::transposition(2, 1, 2);
    CHECK(to_string(apply_permutation(m, swap12)) == "A(2)[0|0].B(1)[0|0]");
    CHECK(apply_permutation(m, CopyPermutation::identity(2)) == m);

    // order-3 cycle applied three times
    CopyPermutation cyc = CopyPermutation::identity(3);
    cyc.image = {2, 3, 1};
    Monomial w = mono({A(0, 0, 1), A(1, 0, 2), C(0, 0, 3)});
    Monomial once = apply_permutation(w, cyc);
    CHECK(apply_permutation(apply_permutation(once, cyc), cyc) == w);

    // group action law on random data
    Rng rng(5);
    auto letters = build_generators(Scenario(2, 1, 2, 2, 2, 2), 3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Letter> word;
        for (int i = 0; i < 4; ++i) word.push_back(letters[rng.next_below(letters.size())]);
        Monomial x = canonicalize(word);
        CopyPermutation pi = CopyPermutation::identity(3), sg = CopyPermutation::identity(3);
        for (int s = 0; s < 4; ++s) {
            int i = 1 + static_cast<int>(rng.next_below(2));
            pi = pi.after(CopyPermutation::transposition(3, i, i + 1));
            i = 1 + static_cast<int>(rng.next_below(2));
            sg = sg.after(CopyPermutation::transposition(3, i, i + 1));
        }
        CHECK(apply_permutation(apply_permutation(x, pi), sg) ==
              apply_permutation(x, sg.after(pi)));
    }
}

TEST_CASE("party-restricted permutation") {
    CopyPermutation swap12 = CopyPermutation::transposition(2, 1, 2);
    Monomial ac = mono({A(0, 0, 1), C(0, 0, 1)});
    CHECK(to_string(apply_party_restricted_permutation(ac, swap12, Party::C)) ==
          "A(1)[0|0].C(2)[0|0]");
    CHECK(apply_party_restricted_permutation(ac, CopyPermutation::identity(2), Party::C) == ac);

    Monomial aa = mono({A(0, 0, 1), A(0, 0, 2)});
    CHECK(apply_party_restricted_permutation(aa, swap12, Party::C) == aa);

    Monomial with_b = mono({A(0, 0, 1), Letter(Party::B, 0, 0, 1)});
    CHECK_THROWS_AS(apply_party_restricted_permutation(with_b, swap12, Party::C), InputError);
}

TEST_CASE("build_y0: structure and constant term") {
    // trivial scenario: the relaxed evaluation cancels to zero
    Scenario triv(1, 1, 1, 1, 1, 1);
    Distribution dtriv(triv, std::vector<double>{1.0});
    PolarizationOp y0t = build_y0(dtriv);
    QuantumModel mt;
    mt.dims = {1, 1, 1, 1};
    mt.sigmaABA = Eigen::MatrixXcd::Identity(1, 1);
    mt.sigmaBCC = Eigen::MatrixXcd::Identity(1, 1);
    for (int pi = 0; pi < 3; ++pi) {
        mt.povms[static_cast<size_t>(pi)] = {{Eigen::MatrixXcd::Identity(1, 1)}};
    }
    CHECK(std::abs(eval_poly(y0t.poly, moments_for(mt, y0t.poly, 2))) < 1e-12);

    // binary single-setting: 8 degree-6, 8 degree-3, one identity term
    PolarizationOp y0 = build_y0(uniform_binary_single());
    int deg6 = 0, deg3 = 0, deg0 = 0;
    for (const auto& [m, c] : y0.poly.terms) {
        if (m.size() == 6) ++deg6;
        if (m.size() == 3) ++deg3;
        if (m.size() == 0) ++deg0;
        for (int i = 0; i < m.size(); ++i) CHECK(m.letter(i).copy() <= 2);
    }
    CHECK(deg6 == 8);
    CHECK(deg3 == 8);
    CHECK(deg0 == 1);
    CHECK(y0.poly.terms.at(Monomial()) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("build_yac: the three-term polarization") {
    Scenario sc(1, 1, 1, 2, 2, 2);
    PolarizationOp yac = build_yac(sc, mono({A(0, 0)}), mono({C(0, 0)}));
    REQUIRE(yac.poly.terms.size() == 3);
    int plus = 0, minus = 0;
    std::set<std::set<int>> copy_patterns;
    for (const auto& [m, c] : yac.poly.terms) {
        CHECK(m.size() == 4);
        if (c == doctest::Approx(1.0)) ++plus;
        if (c == doctest::Approx(-2.0)) ++minus;
        std::set<int> copies;
        for (int i = 0; i < m.size(); ++i) copies.insert(m.letter(i).copy());
        copy_patterns.insert(copies);
    }
    CHECK(plus == 2);
    CHECK(minus == 1);
    CHECK(copy_patterns.count({1, 2}) == 1);
    CHECK(copy_patterns.count({1, 2, 3}) == 1);
    CHECK(copy_patterns.count({1, 2, 3, 4}) == 1);

    CHECK_THROWS_AS(build_yac(sc, Monomial(), mono({C(0, 0)})), InputError);
    CHECK_THROWS_AS(build_yac(sc, mono({C(0, 0)}), mono({C(0, 0)})), InputError);
    CHECK_THROWS_AS(build_yac(sc, mono({A(0, 0, 2)}), mono({C(0, 0)})), InputError);
}

TEST_CASE("polarization identities on oracle models") {
    // Pi^2(y0) = sum (sigma(ABC) - p)^2 and Pi^4(y_ac) = (sigma(ac) -
    // sigma(a) sigma(c))^2 for random explicit models
    Scenario sc(2, 1, 2, 2, 2, 2);
    for (uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
        QuantumModel model = random_model(seed, sc);
        Distribution target = random_classical_bilocal(seed + 100, sc);
        PolarizationOp y0 = build_y0(target);
        MomentAssignment mom = moments_for(model, y0.poly, 2);
        const double lhs = eval_poly(y0.poly, mom);
        Distribution simulated = simulate_distribution(model, sc);
        double rhs = 0.0;
        for (size_t i = 0; i < simulated.p.size(); ++i) {
            const double diff = simulated.p[i] - target.p[i];
            rhs += diff * diff;
        }
        CHECK(std::abs(lhs - rhs) < 1e-10);
        CHECK(lhs >= -1e-12);

        Monomial a = mono({A(0, 0), A(1, 1)});
        Monomial c = mono({C(0, 1)});
        PolarizationOp yac = build_yac(sc, a, c);
        MomentAssignment mom4 = moments_for(model, yac.poly, 4);
        const double pol = eval_poly(yac.poly, mom4);
        std::vector<Monomial> probes{multiply(a, c), a, c};
        MomentAssignment m1 = product_state_moments(model, probes, 1);
        const double direct = m1.at(multiply(a, c)) - m1.at(a) * m1.at(c);
        CHECK(std::abs(pol - direct * direct) < 1e-10);
        CHECK(pol >= -1e-12);
    }
}

TEST_CASE("y_ac vanishes on shared-bit symmetric (non-product) moments") {
    // every y_ac monomial evaluates to 1/2 on the all-copies-shared uniform
    // bit, so the combination gives 1/2 - 1 + 1/2 = 0
    Scenario sc(1, 1, 1, 2, 2, 2);
    PolarizationOp yac = build_yac(sc, mono({A(0, 0)}), mono({C(0, 0)}));
    double acc = 0.0;
    for (const auto& [m, c] : yac.poly.terms) acc += c * 0.5;
    CHECK(acc == doctest::Approx(0.0));
}

TEST_CASE("enumerate_fact_words counts") {
    CHECK(enumerate_fact_words(Scenario(1, 1, 1, 2, 2, 2), 1).size() == 4);
    CHECK(enumerate_fact_words(Scenario(2, 2, 2, 2, 2, 2), 1).size() == 16);
    auto pairs = enumerate_fact_words(Scenario(1, 1, 1, 2, 2, 2), 2);
    CHECK(pairs.size() == 36);
    std::set<std::pair<Monomial, Monomial>> dedup(pairs.begin(), pairs.end());
    CHECK(dedup.size() == pairs.size());
    CHECK_THROWS_AS(enumerate_fact_words(Scenario(1, 1, 1, 2, 2, 2), 0), InputError);
}

TEST_CASE("polarization operators are adjoint-stable up to reordering") {
    // replacing each monomial by its adjoint leaves the evaluation on
    // symmetric real moment vectors unchanged
    Scenario sc(2, 1, 2, 2, 2, 2);
    QuantumModel model = random_model(77, sc);
    Distribution target = random_classical_bilocal(78, sc);
    PolarizationOp y0 = build_y0(target);
    Polynomial adj;
    adj.tag = y0.poly.tag;
    for (const auto& [m, c] : y0.poly.terms) adj.add(adjoint(m), c);
    MomentAssignment mom = moments_for(model, y0.poly, 2);
    MomentAssignment mom_adj = moments_for(model, adj, 2);
    CHECK(std::abs(eval_poly(y0.poly, mom) - eval_poly(adj, mom_adj)) < 1e-10);
}
