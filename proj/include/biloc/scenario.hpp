#ifndef BILOC_SCENARIO_HPP
#define BILOC_SCENARIO_HPP

#include <array>
#include <string>
#include <vector>

#include "biloc/common.hpp"

namespace biloc {

// Cardinalities of the bilocal measurement scenario: settings and outcomes
// for parties A, B, C (index 0, 1, 2). All six counts are >= 1.
struct Scenario {
    std::array<int, 3> settings{1, 1, 1};
    std::array<int, 3> outcomes{1, 1, 1};

    Scenario() = default;
    Scenario(int mA, int mB, int mC, int kA, int kB, int kC)
        : settings{mA, mB, mC}, outcomes{kA, kB, kC} {
        validate();
    }

    void validate() const;

    int generators_per_copy() const {
        return settings[0] * outcomes[0] + settings[1] * outcomes[1] + settings[2] * outcomes[2];
    }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Observed conditional distribution p(alpha beta gamma | x y z), stored
// densely in serialization order [x][y][z][alpha][beta][gamma].
struct Distribution {
    Scenario scenario;
    std::vector<double> p;

    Distribution() = default;
    Distribution(Scenario sc, std::vector<double> data);

    size_t index(int a, int b, int g, int x, int y, int z) const {
        const auto& kk = scenario.outcomes;
        const auto& mm = scenario.settings;
        return static_cast<size_t>(
            ((((x * mm[1] + y) * mm[2] + z) * kk[0] + a) * kk[1] + b) * kk[2] + g);
    }
    double at(int a, int b, int g, int x, int y, int z) const {
        return p[index(a, b, g, x, y, z)];
    }

    // Throws InputError with the offending tensor index on negative entries
    // or normalization residual beyond kNormTol.
    void validate() const;

    static constexpr double kNormTol = 1e-9;
};

// Fixed input schema (JSON):
//   {"scenario": {"settings": [mA,mB,mC], "outcomes": [kA,kB,kC]},
//    "p": nested arrays indexed [x][y][z][alpha][beta][gamma]}
// Unknown fields are rejected. parse(serialize(d)) == d bit-exactly.
Distribution parse_distribution(const std::string& text);
std::string serialize_distribution(const Distribution& d);

// A-C marginal q(alpha gamma | x z) averaged uniformly over Bob's setting y,
// stored as q[alpha][gamma][x][z].
struct MarginalAC {
    std::array<int, 2> outcomes;  // kA, kC
    std::array<int, 2> settings;  // mA, mC
    std::vector<double> q;

    size_t index(int a, int g, int x, int z) const {
        return static_cast<size_t>(((a * outcomes[1] + g) * settings[0] + x) * settings[1] + z);
    }
    double at(int a, int g, int x, int z) const { return q[index(a, g, x, z)]; }
};

MarginalAC marginal_AC(const Distribution& d);

// Max over y-pairs of the deviation of the A-C marginal across Bob settings;
// 0 for no-signaling inputs.
double no_signaling_deviation_AC(const Distribution& d);

// max_{alpha,gamma,x,z} |q(ag|xz) - qA(a|x) qC(g|z)| where qA and qC are the
// single-party marginals of q (averaged over the other party's setting).
// A quick necessary-condition screen; 0 for any bilocal distribution.
double factorization_residual(const Distribution& d);

}  // namespace biloc

#endif
