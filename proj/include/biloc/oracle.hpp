#ifndef BILOC_ORACLE_HPP
#define BILOC_ORACLE_HPP

#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "biloc/algebra.hpp"
#include "biloc/scenario.hpp"

namespace biloc {

// Explicit finite-dimensional bilocal model: two sources and POVMs for the
// three parties, Bob's elements straddling the two source halves.
struct QuantumModel {
    std::array<int, 4> dims{2, 2, 2, 2};  // dA, dBA, dBC, dC, each <= 4
    Eigen::MatrixXcd sigmaABA;            // density matrix on dA * dBA
    Eigen::MatrixXcd sigmaBCC;            // density matrix on dBC * dC
    // povms[party][setting][outcome]; Alice on dA, Bob on dBA*dBC, Charlie on dC
    std::array<std::vector<std::vector<Eigen::MatrixXcd>>, 3> povms;

    Scenario scenario() const;
    void validate(double tol = 1e-12) const;
};

// p(abg|xyz) = tr[(sigmaABA (x) sigmaBCC) (A_a|x (x) B_b|y (x) C_g|z)].
Distribution simulate_distribution(const QuantumModel& m, const Scenario& sc);

// Both sources |Phi+>, Bob a 4-outcome Bell-state measurement, Alice and
// Charlie Pauli Z / Pauli X projectors. Scenario (2,1,2) settings, (2,4,2)
// outcomes.
QuantumModel entanglement_swapping_model();

// Maximally mixed sources with uniform POVMs (every element 1/k); simulates
// to the uniform distribution for the given scenario.
QuantumModel uniform_model(const Scenario& sc);

// Random full-rank states and POVMs for the given scenario, dims fixed to 2
// per factor; deterministic in the seed.
QuantumModel random_model(uint64_t seed, const Scenario& sc);

// Classical bilocal distribution from two independent finite hidden
// variables (<= 8 values each) with random weights and deterministic
// response functions; deterministic in the seed.
Distribution random_classical_bilocal(uint64_t seed, const Scenario& sc);

// Moments of the n-fold symmetric product state of the model's single-copy
// state: each monomial splits by copy and the moment is the product of
// single-copy word values. Values are real (imaginary parts must vanish to
// 1e-10, asserted).
using MomentAssignment = std::unordered_map<Monomial, double, MonomialHash>;
MomentAssignment product_state_moments(const QuantumModel& m, std::span<const Monomial> monomials,
                                       int n_copies);

// Single-copy expectation of a copy-free word (all letters copy 1).
double single_copy_value(const QuantumModel& m, std::span<const Letter> word);

// Brute-force reference for A-C-only scenarios (trivial Bob): minimizes
// sum_{agxz} (qA(a|x) qC(g|z) - p(ag|xz))^2 over product conditionals by
// dense grid search refined with coordinate descent. An upper bound target
// for the hierarchy values on such inputs.
double analytic_ac_distance(const Distribution& d);

// Model file schema (JSON), complex entries as [re, im] pairs.
QuantumModel parse_model(const std::string& text);
std::string serialize_model(const QuantumModel& m);

}  // namespace biloc

#endif
