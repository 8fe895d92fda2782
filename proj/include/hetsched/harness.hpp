#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hetsched/allocator.hpp"
#include "hetsched/bayes.hpp"
#include "hetsched/scenario.hpp"

namespace hetsched {

// The two allocation models of the experiment. Each runs a before phase
// (every priority 1) plus one after phase per (current state, alpha) pair
// with outpatient priorities computed by the classifier.
enum class Model { WsrMax, Pf };

std::string_view model_name(Model model);
Model parse_model(std::string_view name);  // "wsrmax" | "pf"

struct ExperimentConfig {
    ScenarioConfig scenario;
    int instances = 400;
    std::vector<double> alphas{50.0, 500.0, 1000.0};
    // Indices into builtin_current_states(), 0-based internally.
    std::vector<int> state_indices{0, 1, 2, 3, 4, 5, 6};
    std::vector<Model> models{Model::WsrMax, Model::Pf};
    // One CSV path per outpatient; when empty, deterministic synthetic
    // records derived from master_seed are used instead.
    std::vector<std::string> record_files;
    double smoothing = 1.0;
    int record_days = 30;
    std::uint64_t master_seed = 20240915;
};

std::string experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

// One solved table cell: a (model, phase, state, alpha) combination that
// is run once per Monte Carlo instance.
struct CellSpec {
    Model model = Model::WsrMax;
    bool after = false;
    int state_index = -1;  // -1 in the before phase
    double alpha = 0.0;    // 0 in the before phase
    Objective objective = Objective::WsrMax;
    std::vector<double> up;  // per-user priorities for this cell
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<CellSpec> cells;
    // deltas[j * num_states + s]: stroke likelihood of OP j in the s-th
    // configured current state (shared by every instance).
    std::vector<double> deltas;
    // Flat result tensors indexed [cell][instance] or [cell][instance][user].
    std::vector<double> sinr;
    std::vector<double> objective_values;
    std::vector<std::uint64_t> nodes;
    std::vector<double> solve_ms;
    double wall_seconds = 0.0;

    int num_users() const { return config.scenario.num_users; }
    std::size_t run_index(int cell, int instance) const {
        return static_cast<std::size_t>(cell) * config.instances + instance;
    }
    std::size_t raw_index(int cell, int instance, int user) const {
        return run_index(cell, instance) * num_users() + user;
    }
};

// Monte Carlo driver. Scenarios are pre-generated serially from
// deterministic per-instance seeds; the (cell, instance) grid is then
// solved, OpenMP-parallel when jobs != 1 (jobs <= 0 means all cores).
// The report is bit-identical for a given config regardless of job count.
ExperimentReport run_experiment(const ExperimentConfig& config, int jobs = 0);

// Plain single-threaded loop over the same grid, kept as the reference
// implementation for equivalence tests and benchmarks.
ExperimentReport run_experiment_serial(const ExperimentConfig& config);

// Aggregates. "before" means the equal-priority phase; "after" selects
// cells with the given alpha, averaging over configured states. Users are
// 0-based here.
double before_user_mean(const ExperimentReport& r, Model m, int user);
double before_population_mean(const ExperimentReport& r, Model m);
double after_user_mean(const ExperimentReport& r, Model m, double alpha,
                       int user);
double after_population_mean(const ExperimentReport& r, Model m, double alpha);
// Fraction of instances in which the OP's state-averaged SINR is at least
// the instance-wide average over all users and states.
double op_above_average_rate(const ExperimentReport& r, Model m, double alpha,
                             int op_user);
// Largest relative drop of a normal user's mean SINR vs the before phase.
double max_normal_user_drop(const ExperimentReport& r, Model m, double alpha);
// Relative spread across alphas of the OP-group mean SINR.
double op_alpha_spread(const ExperimentReport& r, Model m);
double median_solve_ms(const ExperimentReport& r);

// Output artifacts: raw.csv, summary.csv, summary.json, plot.py and one
// SVG bar chart per (model, before/alpha) combination.
std::string raw_csv_string(const ExperimentReport& r);
std::string summary_csv_string(const ExperimentReport& r);
std::string summary_json_string(const ExperimentReport& r);
void write_outputs(const ExperimentReport& r, const std::string& dir);

} // namespace hetsched
