#include "biloc/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "biloc/acceptance.hpp"
#include "biloc/oracle.hpp"
#include "biloc/sdp.hpp"

namespace biloc {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open output file: " + path);
    out << text;
    if (!out) throw InputError("failed writing output file: " + path);
}

struct CheckResult {
    Hierarchy hierarchy;
    RelaxationParams params;
    double value = 0.0;
    double certified = 0.0;
    SolveStatus status = SolveStatus::numerical_failure;
};

CheckResult run_one_hierarchy(const Distribution& dist, Hierarchy h, const RunConfig& cfg,
                              std::ostream& err) {
    RelaxationParams params;
    params.hierarchy = h;
    params.n = cfg.n > 0 ? cfg.n : (h == Hierarchy::polarization ? 4 : 2);
    params.k = cfg.k;
    params.d = cfg.fact_depth;
    params.cap = cfg.cap;
    RelaxationProblem prob = assemble(dist, params);
    err << hierarchy_name(h) << " assembly: " << prob.summary.to_string();

    SolveOptions opts = cfg.solver;
    opts.hints = prob.hints.empty() ? nullptr : &prob.hints;
    SdpSolution sol = solve(prob.sdp, opts);
    if (sol.status == SolveStatus::numerical_failure) {
        throw SolverError(std::string("solver failed on the ") + hierarchy_name(h) +
                          " relaxation");
    }
    CertifiedBound cert = certify(prob.sdp, sol);

    CheckResult res;
    res.hierarchy = h;
    res.params = params;
    res.value = prob.value_from_primal(sol.primal_objective);
    res.certified = cert.value + prob.sdp_objective_constant;
    res.status = sol.status;
    return res;
}

std::string report_line(const CheckResult& r, double epsilon) {
    std::ostringstream os;
    const char* verdict =
        r.certified <= epsilon ? "compatible-at-this-level" : "incompatible";
    os << "hierarchy=" << hierarchy_name(r.hierarchy) << ", n=" << r.params.n
       << ", k=" << r.params.k << ", value=" << format_double(r.value)
       << ", certified_lower_bound=" << format_double(r.certified)
       << ", status=" << status_name(r.status) << ", verdict=" << verdict;
    return os.str();
}

}  // namespace

int run_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Distribution dist = parse_distribution(read_file(cfg.input_path));
    std::vector<Hierarchy> todo;
    if (cfg.hierarchy == HierarchyChoice::both) {
        todo = {Hierarchy::polarization, Hierarchy::inflation};
    } else if (cfg.hierarchy == HierarchyChoice::polarization) {
        todo = {Hierarchy::polarization};
    } else {
        todo = {Hierarchy::inflation};
    }

    std::vector<std::string> lines;
    double max_certified = -std::numeric_limits<double>::infinity();
    SolveStatus worst = SolveStatus::optimal;
    for (Hierarchy h : todo) {
        CheckResult r = run_one_hierarchy(dist, h, cfg, err);
        lines.push_back(report_line(r, cfg.epsilon));
        max_certified = std::max(max_certified, r.certified);
        if (r.status != SolveStatus::optimal) worst = r.status;
    }
    if (todo.size() > 1) {
        std::ostringstream os;
        const char* verdict =
            max_certified <= cfg.epsilon ? "compatible-at-this-level" : "incompatible";
        os << "hierarchy=both, n=" << (cfg.n > 0 ? cfg.n : 0) << ", k=" << cfg.k
           << ", value=max, certified_lower_bound=" << format_double(max_certified)
           << ", status=" << status_name(worst) << ", verdict=" << verdict;
        lines.push_back(os.str());
    }
    std::string all;
    for (const auto& l : lines) {
        out << l << "\n";
        all += l;
        all += '\n';
    }
    if (!cfg.output_path.empty()) write_file(cfg.output_path, all);
    return 0;
}

int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Distribution dist;
    if (!cfg.model_path.empty()) {
        QuantumModel m = parse_model(read_file(cfg.model_path));
        dist = simulate_distribution(m, m.scenario());
    } else if (cfg.model_name == "entanglement-swapping") {
        QuantumModel m = entanglement_swapping_model();
        dist = simulate_distribution(m, m.scenario());
    } else if (cfg.model_name == "uniform") {
        QuantumModel m = uniform_model(cfg.sim_scenario);
        dist = simulate_distribution(m, cfg.sim_scenario);
    } else if (cfg.model_name == "classical") {
        dist = random_classical_bilocal(cfg.seed, cfg.sim_scenario);
    } else {
        throw InputError("unknown model name: " + cfg.model_name);
    }
    const std::string text = serialize_distribution(dist);
    if (cfg.output_path.empty()) {
        out << text;
    } else {
        write_file(cfg.output_path, text);
        err << "wrote " << cfg.output_path << "\n";
    }
    return 0;
}

int run_export(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Distribution dist = parse_distribution(read_file(cfg.input_path));
    if (cfg.hierarchy == HierarchyChoice::both) {
        throw InputError("export requires a single hierarchy");
    }
    RelaxationParams params;
    params.hierarchy = cfg.hierarchy == HierarchyChoice::polarization ? Hierarchy::polarization
                                                                      : Hierarchy::inflation;
    params.n = cfg.n > 0 ? cfg.n : (params.hierarchy == Hierarchy::polarization ? 4 : 2);
    params.k = cfg.k;
    params.d = cfg.fact_depth;
    params.cap = cfg.cap;
    RelaxationProblem prob = assemble(dist, params);
    out << prob.summary.to_string();
    const std::string text = export_sdpa(prob.sdp);
    if (cfg.output_path.empty()) throw InputError("export requires --out");
    write_file(cfg.output_path, text);
    err << "wrote " << cfg.output_path << "\n";
    return 0;
}

int run_selftest(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    (void)cfg;
    (void)err;
    const int failures = run_acceptance(out);
    return failures == 0 ? 0 : 4;
}

int run_main(int argc, char** argv) {
    CLI::App app{"certified lower bounds on bilocal-network compatibility via moment-matrix "
                 "relaxations"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string hierarchy_str = "inflation";
    std::vector<int> settings{1, 1, 1}, outcomes{2, 2, 2};

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--hierarchy", hierarchy_str, "polarization | inflation | both")
            ->check(CLI::IsMember({"polarization", "inflation", "both"}));
        sub->add_option("--n", cfg.n, "copy count (default: inflation 2, polarization 4)");
        sub->add_option("--k", cfg.k, "NPA word-length level");
        sub->add_option("--fact-depth", cfg.fact_depth, "factorization word depth (default k-1)");
        sub->add_option("--epsilon", cfg.epsilon, "compatibility threshold on the certified bound");
        sub->add_option("--cap", cfg.cap, "moment index label cap");
        sub->add_option("--out", cfg.output_path, "output file");
    };

    CLI::App* check = app.add_subcommand("check", "solve the relaxation and report a verdict");
    check->add_option("--input", cfg.input_path, "distribution file")->required();
    add_common(check);

    CLI::App* sim = app.add_subcommand("simulate", "write a distribution from a model");
    sim->add_option("--model", cfg.model_name,
                    "entanglement-swapping | uniform | classical");
    sim->add_option("--model-file", cfg.model_path, "explicit model file");
    sim->add_option("--seed", cfg.seed, "seed for the classical model");
    sim->add_option("--settings", settings, "per-party setting counts")->expected(3);
    sim->add_option("--outcomes", outcomes, "per-party outcome counts")->expected(3);
    sim->add_option("--out", cfg.output_path, "output file (default stdout)");

    CLI::App* exp = app.add_subcommand("export", "write the assembled SDP in SDPA sparse format");
    exp->add_option("--input", cfg.input_path, "distribution file")->required();
    add_common(exp);

    app.add_subcommand("selftest", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    cfg.hierarchy = hierarchy_str == "both"
                        ? HierarchyChoice::both
                        : (hierarchy_str == "polarization" ? HierarchyChoice::polarization
                                                           : HierarchyChoice::inflation);
    cfg.sim_scenario =
        Scenario(settings[0], settings[1], settings[2], outcomes[0], outcomes[1], outcomes[2]);

    try {
        if (app.got_subcommand("check")) return run_check(cfg, std::cout, std::cerr);
        if (app.got_subcommand("simulate")) return run_simulate(cfg, std::cout, std::cerr);
        if (app.got_subcommand("export")) return run_export(cfg, std::cout, std::cerr);
        if (app.got_subcommand("selftest")) return run_selftest(cfg, std::cout, std::cerr);
    } catch (const SizeCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 5;
    }
    return 1;
}

}  // namespace biloc
