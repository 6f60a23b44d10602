#ifndef BILOC_CLI_HPP
#define BILOC_CLI_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "biloc/relaxation.hpp"

namespace biloc {

enum class Command { check, simulate, export_problem, selftest };

enum class HierarchyChoice { polarization, inflation, both };

struct RunConfig {
    Command command = Command::check;
    std::string input_path;
    HierarchyChoice hierarchy = HierarchyChoice::inflation;
    int n = 0;  // 0 = per-hierarchy default (inflation 2, polarization 4)
    int k = 2;
    int fact_depth = 0;  // 0 = default k-1
    double epsilon = 1e-5;
    int cap = 5000;
    std::string output_path;
    // simulate
    std::string model_name;  // entanglement-swapping | uniform | classical
    std::string model_path;
    uint64_t seed = 1;
    Scenario sim_scenario{1, 1, 1, 2, 2, 2};
    SolveOptions solver;
};

// exit codes: 0 ok, 1 input error, 2 size cap, 3 solver failure
int run_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_export(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_selftest(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int run_main(int argc, char** argv);

}  // namespace biloc

#endif
