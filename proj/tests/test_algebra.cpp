#include <doctest.h>

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "biloc/algebra.hpp"
#include "biloc/common.hpp"
#include "biloc/inflation.hpp"

using namespace biloc;

namespace {

Letter A(int outcome, int setting, int copy = 1) { return Letter(Party::A, setting, outcome, copy); }
Letter B(int outcome, int setting, int copy = 1) { return Letter(Party::B, setting, outcome, copy); }
Letter C(int outcome, int setting, int copy = 1) { return Letter(Party::C, setting, outcome, copy); }

Monomial mono(std::initializer_list<Letter> ls) {
    std::vector<Letter> v(ls);
    return canonicalize(v);
}

// Independent soundness oracle: each (party, copy) class acts on its own
// dimension-2 tensor factor, so letters in distinct classes commute exactly.
struct KroneckerAssignment {
    int n_classes;
    int dim;
    std::map<uint16_t, Eigen::MatrixXd> local;  // letter bits -> 2x2 factor
    std::map<uint16_t, Eigen::MatrixXd> full;   // letter bits -> lifted matrix
    std::map<uint16_t, int> class_slot;

    KroneckerAssignment(const std::vector<Letter>& letters, Rng& rng) {
        for (Letter l : letters) {
            if (!class_slot.count(l.class_key())) {
                const int slot = static_cast<int>(class_slot.size());
                class_slot[l.class_key()] = slot;
            }
        }
        n_classes = static_cast<int>(class_slot.size());
        dim = 1 << n_classes;
        for (Letter l : letters) {
            Eigen::MatrixXd m(2, 2);
            m << rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian(),
                rng.next_gaussian();
            local[l.bits()] = m;
        }
        for (Letter l : letters) {
            Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(1, 1);
            for (int slot = 0; slot < n_classes; ++slot) {
                const Eigen::MatrixXd factor = slot == class_slot[l.class_key()]
                                                   ? local[l.bits()]
                                                   : Eigen::MatrixXd::Identity(2, 2);
                Eigen::MatrixXd next(acc.rows() * 2, acc.cols() * 2);
                for (int i = 0; i < acc.rows(); ++i)
                    for (int j = 0; j < acc.cols(); ++j)
                        next.block(i * 2, j * 2, 2, 2) = acc(i, j) * factor;
                acc = next;
            }
            full[l.bits()] = acc;
        }
    }

    const Eigen::MatrixXd& operator()(Letter l) const { return full.at(l.bits()); }
};

}  // namespace

TEST_CASE("canonicalize orders parties and copies, keeps intra-block order") {
    // B(1)[0|0] A(1)[0|0] -> A then B
    CHECK(mono({B(0, 0), A(0, 0)}) == mono({A(0, 0), B(0, 0)}));
    CHECK(to_string(mono({B(0, 0), A(0, 0)})) == "A(1)[0|0].B(1)[0|0]");

    // copies commute and order ascending
    CHECK(to_string(mono({A(0, 0, 2), A(1, 0, 1)})) == "A(1)[1|0].A(2)[0|0]");

    // same party, same copy: order preserved
    CHECK(to_string(mono({A(0, 0), A(0, 1)})) == "A(1)[0|0].A(1)[0|1]");
    CHECK(mono({A(0, 0), A(0, 1)}) != mono({A(0, 1), A(0, 0)}));
}

TEST_CASE("canonicalize validates scenario ranges") {
    Scenario sc(1, 1, 1, 2, 2, 2);
    std::vector<Letter> bad{A(0, 1)};  // setting 1 out of range
    CHECK_THROWS_AS(canonicalize(sc, 1, bad), InputError);
    std::vector<Letter> bad_copy{A(0, 0, 2)};
    CHECK_THROWS_AS(canonicalize(sc, 1, bad_copy), InputError);
}

TEST_CASE("multiply: unit element and commutation") {
    Monomial id;
    Monomial m = mono({A(0, 0), B(0, 0)});
    CHECK(multiply(id, m) == m);
    CHECK(multiply(m, id) == m);
    CHECK(multiply(mono({A(0, 0)}), mono({C(0, 0)})) == mono({A(0, 0), C(0, 0)}));
    // (A1_{0|0} B1_{0|0}) * A1_{0|1} puts the A letter inside the A block
    Monomial lhs = multiply(mono({A(0, 0), B(0, 0)}), mono({A(0, 1)}));
    CHECK(to_string(lhs) == "A(1)[0|0].A(1)[0|1].B(1)[0|0]");
}

TEST_CASE("adjoint: reversal, involution, identity") {
    Monomial w = mono({A(0, 0), A(0, 1)});
    CHECK(to_string(adjoint(w)) == "A(1)[0|1].A(1)[0|0]");
    CHECK(adjoint(adjoint(w)) == w);
    CHECK(adjoint(Monomial()) == Monomial());
    Monomial x = mono({A(0, 0), B(0, 0)});
    CHECK(adjoint(x) == x);
}

TEST_CASE("display round trip") {
    Scenario sc(2, 1, 2, 2, 4, 2);
    Monomial w = mono({A(1, 0), B(3, 0), C(0, 1), A(0, 1, 2)});
    CHECK(parse_monomial(sc, 2, to_string(w)) == w);
    CHECK(parse_monomial(sc, 2, "1") == Monomial());
    CHECK_THROWS_AS(parse_monomial(sc, 2, "A(1)[0|0]."), InputError);
    CHECK_THROWS_AS(parse_monomial(sc, 2, "D(1)[0|0]"), InputError);
}

TEST_CASE("poly_combine: cancellation and accumulation") {
    Scenario sc(1, 1, 1, 2, 2, 2);
    Polynomial p;
    p.tag = scenario_tag(sc, 1);
    p.add(mono({A(0, 0)}), 1.0);
    Polynomial q = p;

    std::vector<std::pair<double, const Polynomial*>> parts{{1.0, &p}, {-1.0, &q}};
    CHECK(poly_combine(parts).terms.empty());

    Polynomial ones;
    ones.tag = scenario_tag(sc, 1);
    ones.add(Monomial(), 2.0);
    Polynomial ones2;
    ones2.tag = scenario_tag(sc, 1);
    ones2.add(Monomial(), 3.0);
    std::vector<std::pair<double, const Polynomial*>> parts2{{1.0, &ones}, {1.0, &ones2}};
    Polynomial sum = poly_combine(parts2);
    CHECK(sum.terms.size() == 1);
    CHECK(sum.terms.at(Monomial()) == doctest::Approx(5.0));

    Polynomial other;
    other.tag = scenario_tag(sc, 2);
    other.add(Monomial(), 1.0);
    std::vector<std::pair<double, const Polynomial*>> bad{{1.0, &p}, {1.0, &other}};
    CHECK_THROWS_AS(poly_combine(bad), InputError);
}

TEST_CASE("evaluate_on_matrices: identity and single letters") {
    Rng rng(7);
    std::vector<Letter> letters{A(0, 0), A(1, 0), B(0, 0), C(0, 0)};
    KroneckerAssignment assign(letters, rng);
    auto fn = [&](Letter l) -> const Eigen::MatrixXd& { return assign(l); };

    CHECK(evaluate_on_matrices(Monomial(), fn, assign.dim)
              .isApprox(Eigen::MatrixXd::Identity(assign.dim, assign.dim)));
    CHECK(evaluate_on_matrices(mono({A(0, 0)}), fn, assign.dim).isApprox(assign(A(0, 0))));
}

TEST_CASE("canonicalization soundness: 1000 random words match the raw ordered product") {
    Rng rng(20240517);
    Scenario sc(2, 1, 2, 2, 2, 2);
    const int n_copies = 2;
    std::vector<Letter> letters = build_generators(sc, n_copies);
    KroneckerAssignment assign(letters, rng);
    auto fn = [&](Letter l) -> const Eigen::MatrixXd& { return assign(l); };

    for (int trial = 0; trial < 1000; ++trial) {
        const int len = 1 + static_cast<int>(rng.next_below(6));
        std::vector<Letter> word;
        for (int i = 0; i < len; ++i) {
            word.push_back(letters[rng.next_below(letters.size())]);
        }
        Monomial canon = canonicalize(word);
        Eigen::MatrixXd raw = evaluate_word(word, fn, assign.dim);
        Eigen::MatrixXd sorted = evaluate_on_matrices(canon, fn, assign.dim);
        const double scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
        CHECK((raw - sorted).cwiseAbs().maxCoeff() / scale < 1e-12);

        // idempotence
        auto cl = canon.letters();
        CHECK(canonicalize(cl) == canon);
    }
}

TEST_CASE("algebra laws: associativity and anti-homomorphism, exact") {
    Rng rng(99);
    Scenario sc(2, 2, 2, 2, 2, 2);
    std::vector<Letter> letters = build_generators(sc, 3);
    auto random_mono = [&]() {
        const int len = static_cast<int>(rng.next_below(4));
        std::vector<Letter> word;
        for (int i = 0; i < len; ++i) word.push_back(letters[rng.next_below(letters.size())]);
        return canonicalize(word);
    };
    for (int trial = 0; trial < 500; ++trial) {
        Monomial a = random_mono(), b = random_mono(), c = random_mono();
        CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
        CHECK(adjoint(multiply(a, b)) == multiply(adjoint(b), adjoint(a)));
    }
}
