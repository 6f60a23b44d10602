#include <doctest.h>

#include <cmath>

#include "biloc/oracle.hpp"
#include "biloc/scenario.hpp"

using namespace biloc;

namespace {

Distribution uniform_binary_single() {
    Scenario sc(1, 1, 1, 2, 2, 2);
    std::vector<double> p(8, 0.125);
    return Distribution(sc, p);
}

// p(a b g) = 1/2 delta_{a g} delta_{b 0}, single settings, B trivial not
// required here (binary B with b pinned to 0)
Distribution shared_bit_binaryB() {
    Scenario sc(1, 1, 1, 2, 2, 2);
    std::vector<double> p(8, 0.0);
    Distribution d;
    d.scenario = sc;
    d.p = p;
    d.p[d.index(0, 0, 0, 0, 0, 0)] = 0.5;
    d.p[d.index(1, 0, 1, 0, 0, 0)] = 0.5;
    d.validate();
    return d;
}

}  // namespace

TEST_CASE("distribution validation") {
    CHECK_NOTHROW(uniform_binary_single());

    Scenario sc(1, 1, 1, 2, 2, 2);
    std::vector<double> point(8, 0.0);
    point[0] = 1.0;  // p(000|000) = 1
    CHECK_NOTHROW(Distribution(sc, point));

    std::vector<double> bad(8, 0.0);
    bad[0] = 0.6;
    bad[7] = 0.5;  // sums to 1.1
    try {
        Distribution d(sc, bad);
        CHECK(false);
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("0.1") != std::string::npos);
    }

    std::vector<double> neg(8, 0.25);
    neg[3] = -0.25;
    neg[0] = 0.75;
    CHECK_THROWS_AS(Distribution(sc, neg), InputError);
}

TEST_CASE("parse/serialize round trip is bit exact") {
    Distribution d = random_classical_bilocal(1234, Scenario(2, 1, 2, 2, 2, 2));
    std::string text = serialize_distribution(d);
    Distribution back = parse_distribution(text);
    CHECK(back.scenario == d.scenario);
    REQUIRE(back.p.size() == d.p.size());
    for (size_t i = 0; i < d.p.size(); ++i) CHECK(back.p[i] == d.p[i]);
}

TEST_CASE("parse rejects unknown fields and malformed tensors") {
    CHECK_THROWS_AS(parse_distribution("{}"), InputError);
    CHECK_THROWS_AS(parse_distribution("not json"), InputError);
    CHECK_THROWS_AS(
        parse_distribution(R"({"scenario":{"settings":[1,1,1],"outcomes":[1,1,1]},"p":[[[[[[1.0]]]]]],"extra":1})"),
        InputError);
    CHECK_THROWS_AS(
        parse_distribution(R"({"scenario":{"settings":[1,1],"outcomes":[1,1,1]},"p":[]})"),
        InputError);
    // negative entry reports the tensor index
    try {
        parse_distribution(
            R"({"scenario":{"settings":[1,1,1],"outcomes":[2,1,1]},"p":[[[[[[2.0]],[[-1.0]]]]]]})");
        CHECK(false);
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("a=1") != std::string::npos);
    }
}

TEST_CASE("marginal_AC: uniform and shared-bit") {
    MarginalAC q = marginal_AC(uniform_binary_single());
    for (double v : q.q) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

    MarginalAC qs = marginal_AC(shared_bit_binaryB());
    CHECK(qs.at(0, 0, 0, 0) == doctest::Approx(0.5));
    CHECK(qs.at(1, 1, 0, 0) == doctest::Approx(0.5));
    CHECK(qs.at(0, 1, 0, 0) == doctest::Approx(0.0));
    CHECK(qs.at(1, 0, 0, 0) == doctest::Approx(0.0));
}

TEST_CASE("marginal_AC of the entanglement-swapping distribution is uniform") {
    QuantumModel m = entanglement_swapping_model();
    Distribution d = simulate_distribution(m, m.scenario());
    MarginalAC q = marginal_AC(d);
    for (double v : q.q) CHECK(v == doctest::Approx(0.25).epsilon(1e-10));
    // marginals sum to 1 for every setting pair
    for (int x = 0; x < q.settings[0]; ++x)
        for (int z = 0; z < q.settings[1]; ++z) {
            double sum = 0.0;
            for (int a = 0; a < q.outcomes[0]; ++a)
                for (int g = 0; g < q.outcomes[1]; ++g) sum += q.at(a, g, x, z);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
}

TEST_CASE("factorization_residual screens product structure") {
    CHECK(factorization_residual(uniform_binary_single()) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(factorization_residual(shared_bit_binaryB()) == doctest::Approx(0.25).epsilon(1e-12));
    for (uint64_t seed : {3u, 17u, 58u}) {
        Distribution d = random_classical_bilocal(seed, Scenario(2, 2, 2, 2, 2, 2));
        CHECK(factorization_residual(d) <= 1e-12);
        CHECK(no_signaling_deviation_AC(d) <= 1e-12);
    }
}
