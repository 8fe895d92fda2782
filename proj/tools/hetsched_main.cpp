// Command-line front end: classify records, generate scenarios, run the
// exact solver, export MILP models, and drive the full experiment.

#include <cstdio>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hetsched/allocator.hpp"
#include "hetsched/bayes.hpp"
#include "hetsched/harness.hpp"
#include "hetsched/milpgen.hpp"
#include "hetsched/scenario.hpp"
#include "hetsched/textio.hpp"

namespace {

using namespace hetsched;

// Shared by solve and export-lp: build priority weights from per-OP deltas.
// With no --delta flags every outpatient gets delta = 1 (the strongest
// possible classifier output), which makes quick experiments easy.
std::vector<double> build_up(const Scenario& scenario, double alpha,
                             std::vector<double> deltas) {
    const int n_op = scenario.config.num_outpatients();
    if (deltas.empty()) {
        deltas.assign(n_op, 1.0);
    }
    if (static_cast<int>(deltas.size()) != n_op) {
        throw std::invalid_argument(
            "expected one --delta per outpatient (" + std::to_string(n_op) +
            "), got " + std::to_string(deltas.size()));
    }
    std::vector<double> up(scenario.config.num_users, 1.0);
    for (int j = 0; j < n_op; ++j) {
        up[scenario.config.num_normal + j] =
            priority(StrokeLikelihood{deltas[j]}, alpha, true).up;
    }
    return up;
}

void cmd_classify(const std::string& record_file, int state_no,
                  double smoothing) {
    const auto& states = builtin_current_states();
    if (state_no < 1 || state_no > static_cast<int>(states.size())) {
        throw std::invalid_argument("--state must be between 1 and " +
                                    std::to_string(states.size()));
    }
    MedicalRecord record = load_medical_record_csv(record_file);
    TrainedClassifier clf = train(record, smoothing);
    const CurrentState& state = states[state_no - 1];
    StrokeLikelihood post = posterior(clf, state);

    nlohmann::ordered_json out;
    out["record"] = record_file;
    out["rows"] = record.rows.size();
    out["smoothing"] = smoothing;
    out["state"] = state_no;
    nlohmann::ordered_json features;
    const auto idx = state.indices();
    for (int f = 0; f < kNumFeatures; ++f) {
        features[std::string(feature_name(f))] =
            std::string(level_name(f, idx[f]));
    }
    out["state_features"] = std::move(features);
    out["delta"] = post.delta;
    out["classification"] = classify(clf, state) ? "yes" : "no";
    nlohmann::ordered_json ups;
    for (double alpha : {50.0, 500.0, 1000.0}) {
        ups[shortest(alpha)] = priority(post, alpha, true).up;
    }
    out["up"] = std::move(ups);
    std::cout << out.dump(2) << "\n";
}

void cmd_generate(std::uint64_t seed, const std::string& out_file) {
    ScenarioConfig config;
    Scenario scenario = generate(config, seed);
    save_scenario(scenario, out_file);
    std::cout << "wrote scenario: " << config.num_users << " users, "
              << config.num_pbs << "x" << config.rbs_per_pbs
              << " resource blocks, seed " << seed << " -> " << out_file
              << "\n";
}

void cmd_solve(const std::string& scenario_file, const std::string& objective,
               double alpha, const std::vector<double>& deltas, bool oracle) {
    Scenario scenario = load_scenario(scenario_file);
    AllocationProblem problem = make_problem(
        scenario, parse_objective(objective), build_up(scenario, alpha, deltas));
    AllocationResult result = oracle ? solve_bruteforce(problem) : solve(problem);
    std::cout << result_to_json(problem, result) << "\n";
}

void cmd_export_lp(const std::string& scenario_file,
                   const std::string& objective, double alpha,
                   const std::vector<double>& deltas, int breakpoints,
                   const std::string& out_file) {
    Scenario scenario = load_scenario(scenario_file);
    AllocationProblem problem = make_problem(
        scenario, parse_objective(objective), build_up(scenario, alpha, deltas));
    MilpModel model =
        build_milp(problem, PiecewiseLnSpec::for_problem(problem, breakpoints));
    save_lp(model, out_file);
    std::cout << "wrote LP: " << model.vars.size() << " variables, "
              << model.constraints.size() << " constraints -> " << out_file
              << "\n";
}

void cmd_experiment(const std::string& config_file, const std::string& out_dir,
                    int jobs) {
    ExperimentConfig config;
    if (!config_file.empty()) {
        config = load_experiment_config(config_file);
    }
    ExperimentReport report = jobs == 1 ? run_experiment_serial(config)
                                        : run_experiment(config, jobs);
    write_outputs(report, out_dir);
    std::cout << "solves: " << report.solve_ms.size() << "\n"
              << "wall seconds: " << shortest(report.wall_seconds) << "\n"
              << "median solve ms: " << shortest(median_solve_ms(report))
              << "\n";
    for (Model m : config.models) {
        std::cout << model_name(m) << " population mean before: "
                  << shortest(before_population_mean(report, m)) << "\n";
    }
    std::cout << "outputs in " << out_dir << "\n";
}

void cmd_states() {
    std::printf("%-5s %-18s %-18s %-18s %-12s\n", "state",
                std::string(feature_name(0)).c_str(),
                std::string(feature_name(1)).c_str(),
                std::string(feature_name(2)).c_str(),
                std::string(feature_name(3)).c_str());
    const auto& states = builtin_current_states();
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto idx = states[i].indices();
        std::printf("%-5zu %-18s %-18s %-18s %-12s\n", i + 1,
                    std::string(level_name(0, idx[0])).c_str(),
                    std::string(level_name(1, idx[1])).c_str(),
                    std::string(level_name(2, idx[2])).c_str(),
                    std::string(level_name(3, idx[3])).c_str());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Patient-aware uplink resource block allocation toolkit"};
    app.require_subcommand(1);

    auto* classify_cmd = app.add_subcommand(
        "classify", "Train on a medical record CSV and score a current state");
    std::string record_file;
    int state_no = 0;
    double smoothing = 1.0;
    classify_cmd->add_option("--record", record_file, "medical record CSV file")
        ->required();
    classify_cmd
        ->add_option("--state", state_no, "current state number (1-7)")
        ->required();
    classify_cmd->add_option("--smoothing", smoothing,
                             "Laplace smoothing strength (default 1)");

    auto* generate_cmd =
        app.add_subcommand("generate", "Generate a random scenario JSON file");
    std::uint64_t seed = 0;
    std::string out_file;
    generate_cmd->add_option("--seed", seed, "master seed")->required();
    generate_cmd->add_option("--out", out_file, "output JSON path")->required();

    auto* solve_cmd =
        app.add_subcommand("solve", "Solve one scenario exactly");
    std::string scenario_file, objective = "wsrmax";
    double alpha = 0.0;
    std::vector<double> deltas;
    bool oracle = false;
    solve_cmd->add_option("--scenario", scenario_file, "scenario JSON file")
        ->required();
    solve_cmd
        ->add_option("--objective", objective,
                     "objective: wsrmax, pf-before, pf-after")
        ->required();
    solve_cmd->add_option("--alpha", alpha,
                          "priority weight parameter (default 0)");
    solve_cmd->add_option(
        "--delta", deltas,
        "per-outpatient stroke likelihood, repeatable (default 1 each)");
    solve_cmd->add_flag("--oracle", oracle,
                        "use the exhaustive reference solver");

    auto* export_cmd = app.add_subcommand(
        "export-lp", "Export the allocation problem as a CPLEX LP file");
    std::string lp_scenario, lp_objective = "wsrmax", lp_out;
    double lp_alpha = 0.0;
    std::vector<double> lp_deltas;
    int breakpoints = 32;
    export_cmd->add_option("--scenario", lp_scenario, "scenario JSON file")
        ->required();
    export_cmd
        ->add_option("--objective", lp_objective,
                     "objective: wsrmax, pf-before, pf-after")
        ->required();
    export_cmd->add_option("--out", lp_out, "output LP path")->required();
    export_cmd->add_option("--alpha", lp_alpha,
                           "priority weight parameter (default 0)");
    export_cmd->add_option(
        "--delta", lp_deltas,
        "per-outpatient stroke likelihood, repeatable (default 1 each)");
    export_cmd->add_option("--breakpoints", breakpoints,
                           "tangent cuts per ln term (default 32)");

    auto* experiment_cmd = app.add_subcommand(
        "experiment", "Run the Monte Carlo experiment and write outputs");
    std::string config_file, exp_out;
    int jobs = 0;
    experiment_cmd->add_option("--config", config_file,
                               "experiment config JSON (defaults when omitted)");
    experiment_cmd->add_option("--out", exp_out, "output directory")
        ->required();
    experiment_cmd->add_option(
        "--jobs", jobs, "worker threads; 0 = all cores, 1 = serial reference");

    auto* states_cmd =
        app.add_subcommand("states", "Print the built-in current states");

    try {
        app.parse(argc, argv);
        if (*classify_cmd) {
            cmd_classify(record_file, state_no, smoothing);
        } else if (*generate_cmd) {
            cmd_generate(seed, out_file);
        } else if (*solve_cmd) {
            cmd_solve(scenario_file, objective, alpha, deltas, oracle);
        } else if (*export_cmd) {
            cmd_export_lp(lp_scenario, lp_objective, lp_alpha, lp_deltas,
                          breakpoints, lp_out);
        } else if (*experiment_cmd) {
            cmd_experiment(config_file, exp_out, jobs);
        } else if (*states_cmd) {
            cmd_states();
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
