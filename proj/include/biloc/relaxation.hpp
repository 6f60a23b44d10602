#ifndef BILOC_RELAXATION_HPP
#define BILOC_RELAXATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "biloc/algebra.hpp"
#include "biloc/inflation.hpp"
#include "biloc/oracle.hpp"
#include "biloc/scenario.hpp"
#include "biloc/sdp.hpp"

namespace biloc {

enum class Hierarchy { polarization, inflation };

const char* hierarchy_name(Hierarchy h);

struct RelaxationParams {
    Hierarchy hierarchy = Hierarchy::inflation;
    int n = 2;          // copy count; polarization needs n >= 4, inflation n >= 2
    int k = 2;          // NPA word-length level, >= 1
    int d = 0;          // factorization word depth; 0 = default max(1, k-1)
    bool augment = true;
    int cap = 5000;     // moment index label cap

    int effective_d() const { return d > 0 ? d : std::max(1, k - 1); }
    void validate() const;        // full invariants, including hierarchy minimums on n
    void validate_shape() const;  // k, d, n, cap bounds only (index building)
};

// Ordered moment-matrix row labels; starts with the identity, graded by
// length then lexicographic on display form. Closed under adjoint and under
// copy relabeling (augmented words included).
struct MomentIndexSet {
    std::vector<Monomial> words;
    std::unordered_map<Monomial, int32_t, MonomialHash> position;
    int32_t base_count = 0;       // words of length <= k
    int32_t localizer_count = 0;  // prefix of words with length <= k-1

    int32_t find(const Monomial& m) const {
        auto it = position.find(m);
        return it == position.end() ? -1 : it->second;
    }
};

MomentIndexSet build_index_set(const Scenario& sc, const RelaxationParams& params);

// Tracked moments with union-find merges from copy symmetry, adjoint
// identification and (inflation) party-restricted permutations.
struct VariableTable {
    std::unordered_map<Monomial, int32_t, MonomialHash> tracked;  // monomial -> tracked id
    std::vector<Monomial> tracked_monomials;                      // tracked id -> monomial
    std::vector<int32_t> class_of;                                // tracked id -> class id
    std::vector<Monomial> class_rep;                              // class id -> least member
    std::vector<int32_t> rep_tracked_id;                          // class id -> tracked id of rep
    int32_t identity_class = -1;
    int32_t n_classes = 0;

    int32_t tracked_id(const Monomial& m) const {
        auto it = tracked.find(m);
        return it == tracked.end() ? -1 : it->second;
    }
    int32_t class_id(const Monomial& m) const {
        int32_t t = tracked_id(m);
        return t < 0 ? -1 : class_of[static_cast<size_t>(t)];
    }
};

// Sparse linear equality sum_i coeff_i * class_i + constant = 0 over merged
// class ids; the pinned identity class contributes to the constant.
struct LinearEq {
    std::vector<std::pair<int32_t, double>> terms;  // sorted by class id
    double constant = 0.0;
};

struct AssemblySummary {
    int32_t index_size = 0;
    int32_t base_words = 0;
    int32_t augmented_words = 0;
    int64_t tracked_monomials = 0;
    int32_t classes = 0;
    int32_t free_variables = 0;
    int64_t equalities_emitted = 0;    // before dedup
    int64_t equalities = 0;            // after dedup
    int64_t eliminated = 0;            // pivot count
    int64_t vacuous = 0;               // rows reduced to 0 = 0
    int32_t yac_pairs = 0;
    int32_t yac_skipped = 0;           // pairs not covered by the table
    int32_t bound_constraints = 0;     // diagonal contraction bounds rho(u*u) <= 1
    std::vector<int32_t> block_sizes;          // as specified (full index)
    std::vector<int32_t> solver_block_sizes;   // after exact row deflation

    std::string to_string() const;
};

// The assembled level-(n,k) problem. Blocks are kept in full index form
// (entries resolve to merged classes); the solver-facing LMI with equalities
// eliminated and structurally dependent rows removed lives in `sdp`.
struct RelaxationProblem {
    Scenario scenario;
    RelaxationParams params;
    MomentIndexSet index;
    VariableTable table;

    struct BlockDesc {
        std::string name;             // "moment" or the localizing generator
        std::vector<int32_t> rows;    // index-word positions forming the block
        // upper triangle (r <= c) of class ids, row-major over `rows`
        std::vector<int32_t> entry_class;
    };
    std::vector<BlockDesc> blocks;

    std::vector<LinearEq> equalities;  // deduplicated, pre-elimination
    std::vector<std::pair<int32_t, double>> objective_terms;  // class space
    double objective_constant = 0.0;

    // solver handoff
    SdpProblem sdp;
    SymmetryHints hints;                 // empty when unavailable
    std::vector<int32_t> free_classes;   // sdp variable i -> class id
    double sdp_objective_constant = 0.0; // reported value = c.y + this

    AssemblySummary summary;

    // All class representatives (the moments a feasibility witness must
    // provide) in deterministic order.
    std::vector<Monomial> tracked_representatives() const;
    // Every tracked monomial (for merge-soundness checks).
    const std::vector<Monomial>& all_tracked() const { return table.tracked_monomials; }

    // Reported optimum for a solver objective value c.y.
    double value_from_primal(double cy) const { return cy + sdp_objective_constant; }
};

RelaxationProblem assemble(const Distribution& dist, const RelaxationParams& params);

struct FeasibilityReport {
    double max_equality_residual = 0.0;
    std::vector<double> block_min_eigenvalue;
    double objective = 0.0;
};

// Evaluates a moment assignment against the assembled problem: equality
// residuals, block eigenvalue floors, objective value. Missing moments for
// tracked representatives are an error.
FeasibilityReport check_feasible_point(const RelaxationProblem& prob,
                                       const MomentAssignment& moments);

}  // namespace biloc

#endif
