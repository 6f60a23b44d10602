#ifndef BILOC_SDP_HPP
#define BILOC_SDP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "biloc/common.hpp"

namespace biloc {

// Dual-form linear matrix inequality problem:
//   minimize c.y  subject to  F(y) = sum_i y_i F_i - F0 >= 0 (per block).
// Entries use SDPA numbering: matno 0 is F0, matno i>=1 is F_i; row <= col.
struct SdpProblem {
    struct Entry {
        int32_t matno;  // 0 = F0, 1..nvars = F_i
        int32_t row, col;  // 1-based, row <= col
        double value;

        friend bool operator==(const Entry&, const Entry&) = default;
    };
    struct Block {
        int32_t size = 0;
        std::vector<Entry> entries;  // sorted by (matno, row, col), deduplicated

        friend bool operator==(const Block&, const Block&) = default;
    };

    int32_t nvars = 0;
    std::vector<Block> blocks;
    std::vector<double> objective;  // size nvars

    void normalize();  // sort entries, check invariants
    friend bool operator==(const SdpProblem&, const SdpProblem&) = default;
};

// Copy-relabeling symmetries of an assembled problem: each generator maps
// block b to block_image[b] and row r (0-based) of b to row_image[b][r].
// Purely an acceleration hint for solve(); never serialized.
struct SymmetryHints {
    struct Gen {
        std::vector<int32_t> block_image;
        std::vector<std::vector<int32_t>> row_image;
    };
    std::vector<Gen> gens;
    bool empty() const { return gens.empty(); }
};

enum class SolveStatus { optimal, max_iterations, numerical_failure };

const char* status_name(SolveStatus s);

struct SolveOptions {
    double gap_tol = 1e-7;      // relative duality gap
    double feas_tol = 1e-9;     // relative primal/dual infeasibility
    double eig_slack = 1e-8;    // allowed eigenvalue deficit at optimality
    int max_iterations = 200;
    const SymmetryHints* hints = nullptr;
};

struct SdpSolution {
    Eigen::VectorXd y;
    double primal_objective = 0.0;  // c.y
    double dual_objective = 0.0;    // F0 . Y
    SolveStatus status = SolveStatus::numerical_failure;
    double min_block_eigenvalue = 0.0;  // of F(y) at the returned point
    double relative_gap = 0.0;
    double primal_residual = 0.0;   // max |X - (sum y F - F0)| relative
    double dual_residual_l1 = 0.0;  // sum_i |F_i . Y - c_i|
    double y_inf_norm = 0.0;
    bool weak_duality_ok = true;    // corrected dual <= primal on feasible iterates
    int iterations = 0;
};

// Deterministic infeasible-start primal-dual interior-point method (HKM
// direction, Mehrotra predictor-corrector, dense blocks).
SdpSolution solve(const SdpProblem& p, const SolveOptions& opts = {});

// SDPA sparse text (.dat-s). Line 1: nvars, line 2: nblocks, line 3: block
// sizes, line 4: objective, then "matno blkno i j value" with i <= j.
// Doubles are printed in shortest exact form, so parse(export(p)) == p.
std::string export_sdpa(const SdpProblem& p);
SdpProblem parse_sdpa(const std::string& text);

struct CertifiedBound {
    double value = 0.0;  // dual objective minus slack: a lower bound
    double slack = 0.0;
};

// Residual-corrected dual bound. Valid under |y*|_inf <= max(1, |y|_inf),
// which holds for assembled problems (free variables are moments of words
// of contractions, hence in [-1, 1]).
CertifiedBound certify(const SdpProblem& p, const SdpSolution& s);

}  // namespace biloc

#endif
