#include <doctest.h>

#include <cmath>
#include <complex>

#include "biloc/oracle.hpp"
#include "biloc/scenario.hpp"

using namespace biloc;

namespace {

Eigen::MatrixXcd kron2(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

TEST_CASE("uniform model simulates the uniform distribution") {
    Scenario sc(2, 1, 2, 2, 4, 2);
    Distribution d = simulate_distribution(uniform_model(sc), sc);
    for (double v : d.p) CHECK(v == doctest::Approx(1.0 / 16).epsilon(1e-12));
}

TEST_CASE("deterministic classical model gives a point mass") {
    // rank-1 diagonal states, projective diagonal POVMs
    QuantumModel m;
    m.dims = {2, 2, 2, 2};
    Eigen::MatrixXcd e00 = Eigen::MatrixXcd::Zero(4, 4);
    e00(0, 0) = 1.0;
    m.sigmaABA = e00;
    m.sigmaBCC = e00;
    auto proj0 = [] {
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2, 2);
        p(0, 0) = 1.0;
        return p;
    }();
    auto proj1 = [] {
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2, 2);
        p(1, 1) = 1.0;
        return p;
    }();
    m.povms[0] = {{proj0, proj1}};
    m.povms[2] = {{proj0, proj1}};
    m.povms[1] = {{kron2(proj0, proj0), kron2(proj0, proj1) + kron2(proj1, proj0) +
                                            kron2(proj1, proj1)}};
    Scenario sc(1, 1, 1, 2, 2, 2);
    Distribution d = simulate_distribution(m, sc);
    CHECK(d.at(0, 0, 0, 0, 0, 0) == doctest::Approx(1.0));
    double rest = 0.0;
    for (size_t i = 1; i < d.p.size(); ++i) rest += std::abs(d.p[i]);
    CHECK(rest < 1e-12);
}

TEST_CASE("entanglement swapping: Bell branch correlations, cross-checked by hand") {
    QuantumModel m = entanglement_swapping_model();
    m.validate(1e-12);
    Scenario sc = m.scenario();
    CHECK(sc == Scenario(2, 1, 2, 2, 4, 2));
    Distribution d = simulate_distribution(m, sc);

    // Bob outcome marginal is uniform
    for (int b = 0; b < 4; ++b) {
        double pb = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int g = 0; g < 2; ++g) pb += d.at(a, b, g, 0, 0, 0);
        CHECK(pb == doctest::Approx(0.25).epsilon(1e-12));
    }

    // conditional on the Phi+ outcome (b = 0), Z-Z outcomes agree
    double same = 0.0, diff = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int g = 0; g < 2; ++g) {
            (a == g ? same : diff) += d.at(a, 0, g, 0, 0, 0);
        }
    CHECK(diff < 1e-12);
    CHECK(same == doctest::Approx(0.25).epsilon(1e-12));

    // independent 4x4-algebra cross-check of the Phi+ branch:
    // (<Phi+|_23)(|Phi+>_12 |Phi+>_34) = 1/2 |Phi+>_14
    Eigen::VectorXcd phip(4);
    phip << 1.0 / std::sqrt(2.0), 0, 0, 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd rho = kron2(phip * phip.adjoint(), phip * phip.adjoint());
    Eigen::MatrixXcd z0 = Eigen::MatrixXcd::Zero(2, 2), z1 = Eigen::MatrixXcd::Zero(2, 2);
    z0(0, 0) = 1.0;
    z1(1, 1) = 1.0;
    Eigen::MatrixXcd bsm = phip * phip.adjoint();
    Eigen::MatrixXcd id2 = Eigen::MatrixXcd::Identity(2, 2);
    for (int a = 0; a < 2; ++a)
        for (int g = 0; g < 2; ++g) {
            Eigen::MatrixXcd op = kron2(kron2(a == 0 ? z0 : z1, bsm), g == 0 ? z0 : z1);
            const double expect = (a == g) ? 0.125 : 0.0;
            CHECK(std::abs((rho * op).trace().real() - expect) < 1e-12);
            CHECK(std::abs((rho * op).trace().real() - d.at(a, 0, g, 0, 0, 0)) < 1e-12);
        }

    // A-C marginal factorizes
    CHECK(factorization_residual(d) < 1e-12);
}

TEST_CASE("random classical bilocal distributions factorize and are reproducible") {
    Scenario sc(2, 2, 2, 2, 2, 2);
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        Distribution d = random_classical_bilocal(seed, sc);
        CHECK(factorization_residual(d) <= 1e-12);
        Distribution d2 = random_classical_bilocal(seed, sc);
        CHECK(d.p == d2.p);
    }
    // distributions from simulated models factorize too
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        QuantumModel m = random_model(seed, sc);
        Distribution d = simulate_distribution(m, sc);
        CHECK(factorization_residual(d) <= 1e-10);
    }
}

TEST_CASE("product_state_moments: product rule and distribution consistency") {
    Scenario sc(2, 1, 2, 2, 4, 2);
    QuantumModel m = entanglement_swapping_model();

    std::vector<Monomial> monos;
    monos.push_back(Monomial());
    std::vector<Letter> w1{Letter(Party::A, 0, 0, 1)};
    std::vector<Letter> w2{Letter(Party::A, 0, 0, 1), Letter(Party::A, 0, 0, 2)};
    monos.push_back(canonicalize(w1));
    monos.push_back(canonicalize(w2));
    MomentAssignment mom = product_state_moments(m, monos, 2);
    CHECK(mom.at(Monomial()) == doctest::Approx(1.0));
    CHECK(mom.at(monos[2]) == doctest::Approx(mom.at(monos[1]) * mom.at(monos[1])).epsilon(1e-12));

    // copy-1 degree-3 moments reproduce the simulated distribution
    Distribution d = simulate_distribution(m, sc);
    std::vector<Monomial> trips;
    for (int x = 0; x < 2; ++x)
        for (int b = 0; b < 4; ++b)
            for (int z = 0; z < 2; ++z)
                for (int a = 0; a < 2; ++a)
                    for (int g = 0; g < 2; ++g) {
                        std::vector<Letter> w{Letter(Party::A, x, a, 1), Letter(Party::B, 0, b, 1),
                                              Letter(Party::C, z, g, 1)};
                        trips.push_back(canonicalize(w));
                    }
    MomentAssignment mom3 = product_state_moments(m, trips, 1);
    size_t idx = 0;
    for (int x = 0; x < 2; ++x)
        for (int b = 0; b < 4; ++b)
            for (int z = 0; z < 2; ++z)
                for (int a = 0; a < 2; ++a)
                    for (int g = 0; g < 2; ++g) {
                        CHECK(std::abs(mom3.at(trips[idx++]) - d.at(a, b, g, x, 0, z)) < 1e-12);
                    }

    // moments are invariant under copy permutations (product states are symmetric)
    std::vector<Letter> wmix{Letter(Party::A, 0, 0, 1), Letter(Party::C, 1, 1, 2)};
    std::vector<Letter> wmix_swapped{Letter(Party::A, 0, 0, 2), Letter(Party::C, 1, 1, 1)};
    std::vector<Monomial> pair{canonicalize(wmix), canonicalize(wmix_swapped)};
    MomentAssignment mp = product_state_moments(m, pair, 2);
    CHECK(mp.at(pair[0]) == doctest::Approx(mp.at(pair[1])).epsilon(1e-12));
}

TEST_CASE("analytic_ac_distance") {
    // product distribution: zero
    Scenario sc(1, 1, 1, 2, 1, 2);
    std::vector<double> prod(4, 0.25);
    CHECK(analytic_ac_distance(Distribution(sc, prod)) < 1e-10);

    // deterministic product: zero
    std::vector<double> det(4, 0.0);
    det[0] = 1.0;
    CHECK(analytic_ac_distance(Distribution(sc, det)) < 1e-10);

    // shared bit: 0.25 at qA = qC = (1/2, 1/2); one-parameter scan oracle
    std::vector<double> shared(4, 0.0);
    Distribution ds;
    ds.scenario = sc;
    ds.p = shared;
    ds.p[ds.index(0, 0, 0, 0, 0, 0)] = 0.5;
    ds.p[ds.index(1, 0, 1, 0, 0, 0)] = 0.5;
    ds.validate();
    const double dist = analytic_ac_distance(ds);
    double best_scan = 1e9;
    for (int i = 0; i <= 1000; ++i) {
        const double t = i / 1000.0;
        const double v = (t * t - 0.5) * (t * t - 0.5) + 2 * t * t * (1 - t) * (1 - t) +
                         ((1 - t) * (1 - t) - 0.5) * ((1 - t) * (1 - t) - 0.5);
        best_scan = std::min(best_scan, v);
    }
    CHECK(best_scan == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(dist == doctest::Approx(0.25).epsilon(1e-7));

    // guard rails
    Scenario nontrivial_b(1, 1, 1, 2, 2, 2);
    CHECK_THROWS_AS(analytic_ac_distance(Distribution(nontrivial_b, std::vector<double>(8, 0.125))),
                    InputError);
}

TEST_CASE("model serialization round trip") {
    QuantumModel m = entanglement_swapping_model();
    std::string text = serialize_model(m);
    QuantumModel back = parse_model(text);
    CHECK(back.dims == m.dims);
    CHECK((back.sigmaABA - m.sigmaABA).cwiseAbs().maxCoeff() < 1e-15);
    Distribution d1 = simulate_distribution(m, m.scenario());
    Distribution d2 = simulate_distribution(back, back.scenario());
    for (size_t i = 0; i < d1.p.size(); ++i) CHECK(d1.p[i] == doctest::Approx(d2.p[i]).epsilon(1e-14));

    CHECK_THROWS_AS(parse_model("{}"), InputError);
}

TEST_CASE("model invariant violations are rejected") {
    QuantumModel m = entanglement_swapping_model();
    m.povms[0][0][0](0, 0) += 0.1;  // breaks completeness
    CHECK_THROWS_AS(m.validate(1e-12), InputError);
}
