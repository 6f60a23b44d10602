#ifndef BILOC_INFLATION_HPP
#define BILOC_INFLATION_HPP

#include <utility>
#include <vector>

#include "biloc/algebra.hpp"
#include "biloc/scenario.hpp"

namespace biloc {

// A bijection on copy indices 1..n.
struct CopyPermutation {
    int n = 0;
    std::vector<int> image;  // image[i-1] = pi(i), values in 1..n

    static CopyPermutation identity(int n);
    static CopyPermutation transposition(int n, int i, int j);
    void validate() const;

    // composition: (this later) following other, i.e. result(i) = this(other(i))
    CopyPermutation after(const CopyPermutation& other) const;
};

// All generator letters of the n-copy algebra:
// cardinality n * (mA kA + mB kB + mC kC).
std::vector<Letter> build_generators(const Scenario& sc, int n_copies);

// Copy relabeling followed by canonicalization; a left group action.
Monomial apply_permutation(const Monomial& m, const CopyPermutation& pi);

// Permutes copy indices of one party's letters only. The monomial must
// contain no B-party letters (the constraint is only defined on A/C words).
Monomial apply_party_restricted_permutation(const Monomial& m, const CopyPermutation& pi,
                                            Party party);

enum class PolarizationKind { objective_y0, factorization_yac };

// Linearization of a polynomial-in-the-state expression on copies of the
// algebra; nonnegative on every symmetric product state.
struct PolarizationOp {
    Polynomial poly;
    PolarizationKind kind;
    Monomial a_pattern;  // copy-1 pattern words for factorization_yac
    Monomial c_pattern;
};

// y0 in copies 1,2:
//   sum_{abg xyz} [ A1 B1 C1 A2 B2 C2 - 2 p(abg|xyz) A1 B1 C1 + p^2 1 ]
// so that on a symmetric product state Pi2(y0) = sum (sigma(ABC) - p)^2.
PolarizationOp build_y0(const Distribution& d);

// y_ac in copies 1..4 for copy-1 pattern words a (Alice) and c (Charlie):
//   a1 c1 a2 c2 - 2 a1 c1 a2 c3 + a1 c2 a3 c4
// so that Pi4(y_ac) = (sigma(ac) - sigma(a) sigma(c))^2.
PolarizationOp build_yac(const Scenario& sc, const Monomial& a, const Monomial& c);

// All canonical copy-1 Alice words of length 1..d paired with all canonical
// copy-1 Charlie words of length 1..d, in graded display order.
std::vector<std::pair<Monomial, Monomial>> enumerate_fact_words(const Scenario& sc, int depth);

}  // namespace biloc

#endif
