#include "biloc/scenario.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace biloc {

using nlohmann::json;

void Scenario::validate() const {
    for (int i = 0; i < 3; ++i) {
        if (settings[static_cast<size_t>(i)] < 1 || outcomes[static_cast<size_t>(i)] < 1) {
            throw InputError("scenario counts must all be >= 1");
        }
    }
}

Distribution::Distribution(Scenario sc, std::vector<double> data)
    : scenario(sc), p(std::move(data)) {
    scenario.validate();
    const size_t want = static_cast<size_t>(scenario.settings[0]) * scenario.settings[1] *
                        scenario.settings[2] * scenario.outcomes[0] * scenario.outcomes[1] *
                        scenario.outcomes[2];
    if (p.size() != want) {
        throw InputError("distribution tensor has " + std::to_string(p.size()) +
                         " entries, expected " + std::to_string(want));
    }
    validate();
}

void Distribution::validate() const {
    const auto& mm = scenario.settings;
    const auto& kk = scenario.outcomes;
    for (int x = 0; x < mm[0]; ++x)
        for (int y = 0; y < mm[1]; ++y)
            for (int z = 0; z < mm[2]; ++z) {
                double sum = 0.0;
                for (int a = 0; a < kk[0]; ++a)
                    for (int b = 0; b < kk[1]; ++b)
                        for (int g = 0; g < kk[2]; ++g) {
                            const double v = at(a, b, g, x, y, z);
                            if (v < 0.0) {
                                throw InputError(
                                    "negative probability at p[a=" + std::to_string(a) +
                                    "][b=" + std::to_string(b) + "][g=" + std::to_string(g) +
                                    "][x=" + std::to_string(x) + "][y=" + std::to_string(y) +
                                    "][z=" + std::to_string(z) + "]");
                            }
                            sum += v;
                        }
                if (std::abs(sum - 1.0) > kNormTol) {
                    throw InputError("normalization residual " + format_double(std::abs(sum - 1.0)) +
                                     " at settings (x=" + std::to_string(x) +
                                     ", y=" + std::to_string(y) + ", z=" + std::to_string(z) + ")");
                }
            }
}

namespace {

std::array<int, 3> parse_count_triple(const json& j, const char* name) {
    if (!j.is_array() || j.size() != 3) {
        throw InputError(std::string("scenario.") + name + " must be an array of 3 integers");
    }
    std::array<int, 3> out{};
    for (size_t i = 0; i < 3; ++i) {
        if (!j[i].is_number_integer()) {
            throw InputError(std::string("scenario.") + name + "[" + std::to_string(i) +
                             "] must be an integer");
        }
        out[i] = j[i].get<int>();
    }
    return out;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) throw InputError("unknown field '" + it.key() + "' in " + where);
    }
}

}  // namespace

Distribution parse_distribution(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("distribution parse: ") + e.what());
    }
    if (!j.is_object()) throw InputError("distribution file must be a JSON object");
    reject_unknown(j, {"scenario", "p"}, "distribution");
    if (!j.contains("scenario") || !j.contains("p")) {
        throw InputError("distribution requires fields 'scenario' and 'p'");
    }
    const json& js = j["scenario"];
    if (!js.is_object()) throw InputError("'scenario' must be an object");
    reject_unknown(js, {"settings", "outcomes"}, "scenario");
    if (!js.contains("settings") || !js.contains("outcomes")) {
        throw InputError("scenario requires fields 'settings' and 'outcomes'");
    }
    Scenario sc;
    sc.settings = parse_count_triple(js["settings"], "settings");
    sc.outcomes = parse_count_triple(js["outcomes"], "outcomes");
    sc.validate();

    const auto& mm = sc.settings;
    const auto& kk = sc.outcomes;
    std::vector<double> p(static_cast<size_t>(mm[0]) * mm[1] * mm[2] * kk[0] * kk[1] * kk[2]);
    const json& jp = j["p"];

    auto level = [&](const json& arr, int want, const std::string& path) -> const json& {
        if (!arr.is_array() || static_cast<int>(arr.size()) != want) {
            throw InputError("p" + path + " must be an array of length " + std::to_string(want));
        }
        return arr;
    };
    size_t flat = 0;
    for (int x = 0; x < mm[0]; ++x) {
        const json& jx = level(jp, mm[0], "")[static_cast<size_t>(x)];
        for (int y = 0; y < mm[1]; ++y) {
            const json& jy = level(jx, mm[1], "[" + std::to_string(x) + "]")[static_cast<size_t>(y)];
            for (int z = 0; z < mm[2]; ++z) {
                const json& jz = level(jy, mm[2],
                                       "[" + std::to_string(x) + "][" + std::to_string(y) + "]")
                                     [static_cast<size_t>(z)];
                for (int a = 0; a < kk[0]; ++a) {
                    const json& ja = level(jz, kk[0], "[x][y][z]")[static_cast<size_t>(a)];
                    for (int b = 0; b < kk[1]; ++b) {
                        const json& jb = level(ja, kk[1], "[x][y][z][a]")[static_cast<size_t>(b)];
                        for (int g = 0; g < kk[2]; ++g) {
                            const json& jv = level(jb, kk[2], "[x][y][z][a][b]")
                                                 [static_cast<size_t>(g)];
                            if (!jv.is_number()) {
                                throw InputError("p[" + std::to_string(x) + "][" +
                                                 std::to_string(y) + "][" + std::to_string(z) +
                                                 "][" + std::to_string(a) + "][" +
                                                 std::to_string(b) + "][" + std::to_string(g) +
                                                 "] is not a number");
                            }
                            p[flat++] = jv.get<double>();
                        }
                    }
                }
            }
        }
    }
    return Distribution(sc, std::move(p));
}

std::string serialize_distribution(const Distribution& d) {
    const auto& mm = d.scenario.settings;
    const auto& kk = d.scenario.outcomes;
    json jp = json::array();
    size_t flat = 0;
    for (int x = 0; x < mm[0]; ++x) {
        json jx = json::array();
        for (int y = 0; y < mm[1]; ++y) {
            json jy = json::array();
            for (int z = 0; z < mm[2]; ++z) {
                json jz = json::array();
                for (int a = 0; a < kk[0]; ++a) {
                    json ja = json::array();
                    for (int b = 0; b < kk[1]; ++b) {
                        json jb = json::array();
                        for (int g = 0; g < kk[2]; ++g) jb.push_back(d.p[flat++]);
                        ja.push_back(std::move(jb));
                    }
                    jz.push_back(std::move(ja));
                }
                jy.push_back(std::move(jz));
            }
            jx.push_back(std::move(jy));
        }
        jp.push_back(std::move(jx));
    }
    json j;
    j["scenario"] = {{"settings", {mm[0], mm[1], mm[2]}}, {"outcomes", {kk[0], kk[1], kk[2]}}};
    j["p"] = std::move(jp);
    return j.dump(2) + "\n";
}

MarginalAC marginal_AC(const Distribution& d) {
    const auto& mm = d.scenario.settings;
    const auto& kk = d.scenario.outcomes;
    MarginalAC out;
    out.outcomes = {kk[0], kk[2]};
    out.settings = {mm[0], mm[2]};
    out.q.assign(static_cast<size_t>(kk[0]) * kk[2] * mm[0] * mm[2], 0.0);
    for (int a = 0; a < kk[0]; ++a)
        for (int g = 0; g < kk[2]; ++g)
            for (int x = 0; x < mm[0]; ++x)
                for (int z = 0; z < mm[2]; ++z) {
                    double sum = 0.0;
                    for (int y = 0; y < mm[1]; ++y)
                        for (int b = 0; b < kk[1]; ++b) sum += d.at(a, b, g, x, y, z);
                    out.q[out.index(a, g, x, z)] = sum / mm[1];
                }
    return out;
}

double no_signaling_deviation_AC(const Distribution& d) {
    const auto& mm = d.scenario.settings;
    const auto& kk = d.scenario.outcomes;
    double dev = 0.0;
    for (int a = 0; a < kk[0]; ++a)
        for (int g = 0; g < kk[2]; ++g)
            for (int x = 0; x < mm[0]; ++x)
                for (int z = 0; z < mm[2]; ++z) {
                    double lo = 2.0, hi = -1.0;
                    for (int y = 0; y < mm[1]; ++y) {
                        double sum = 0.0;
                        for (int b = 0; b < kk[1]; ++b) sum += d.at(a, b, g, x, y, z);
                        lo = std::min(lo, sum);
                        hi = std::max(hi, sum);
                    }
                    dev = std::max(dev, hi - lo);
                }
    return dev;
}

double factorization_residual(const Distribution& d) {
    MarginalAC q = marginal_AC(d);
    const int kA = q.outcomes[0], kC = q.outcomes[1];
    const int mA = q.settings[0], mC = q.settings[1];

    // Single-party marginals of q, averaged over the other party's setting.
    std::vector<double> qA(static_cast<size_t>(kA) * mA, 0.0);
    std::vector<double> qC(static_cast<size_t>(kC) * mC, 0.0);
    for (int a = 0; a < kA; ++a)
        for (int x = 0; x < mA; ++x) {
            double sum = 0.0;
            for (int g = 0; g < kC; ++g)
                for (int z = 0; z < mC; ++z) sum += q.at(a, g, x, z);
            qA[static_cast<size_t>(a) * mA + x] = sum / mC;
        }
    for (int g = 0; g < kC; ++g)
        for (int z = 0; z < mC; ++z) {
            double sum = 0.0;
            for (int a = 0; a < kA; ++a)
                for (int x = 0; x < mA; ++x) sum += q.at(a, g, x, z);
            qC[static_cast<size_t>(g) * mC + z] = sum / mA;
        }

    double res = 0.0;
    for (int a = 0; a < kA; ++a)
        for (int g = 0; g < kC; ++g)
            for (int x = 0; x < mA; ++x)
                for (int z = 0; z < mC; ++z) {
                    const double prod =
                        qA[static_cast<size_t>(a) * mA + x] * qC[static_cast<size_t>(g) * mC + z];
                    res = std::max(res, std::abs(q.at(a, g, x, z) - prod));
                }
    return res;
}

}  // namespace biloc
