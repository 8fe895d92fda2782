#include "hetsched/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "hetsched/rng.hpp"
#include "hetsched/textio.hpp"

namespace hetsched {

namespace {

// Seed streams: instance i uses stream i+1, outpatient record j uses
// stream 1e9+j, so the two families never collide for any sane instance
// count.
constexpr std::uint64_t kRecordStreamBase = 1000000000ULL;

void validate_config(const ExperimentConfig& cfg) {
    validate(cfg.scenario);
    if (cfg.instances < 1) {
        throw std::invalid_argument("experiment: instances must be >= 1");
    }
    if (cfg.alphas.empty()) {
        throw std::invalid_argument("experiment: need at least one alpha");
    }
    for (double a : cfg.alphas) {
        if (!std::isfinite(a) || a < 0.0) {
            throw std::invalid_argument("experiment: alphas must be >= 0");
        }
    }
    if (cfg.state_indices.empty()) {
        throw std::invalid_argument("experiment: need at least one state");
    }
    const int n_states = static_cast<int>(builtin_current_states().size());
    for (int s : cfg.state_indices) {
        if (s < 0 || s >= n_states) {
            throw std::invalid_argument("experiment: state index out of range");
        }
    }
    if (cfg.models.empty()) {
        throw std::invalid_argument("experiment: need at least one model");
    }
    if (cfg.smoothing < 0.0) {
        throw std::invalid_argument("experiment: smoothing must be >= 0");
    }
    if (cfg.record_days < 2) {
        throw std::invalid_argument("experiment: record_days must be >= 2");
    }
    if (!cfg.record_files.empty() &&
        static_cast<int>(cfg.record_files.size()) !=
            cfg.scenario.num_outpatients()) {
        throw std::invalid_argument(
            "experiment: record_files must list one file per outpatient");
    }
}

ExperimentReport init_report(const ExperimentConfig& cfg) {
    validate_config(cfg);
    ExperimentReport rep;
    rep.config = cfg;

    const int n_op = cfg.scenario.num_outpatients();
    const int n_states = static_cast<int>(cfg.state_indices.size());
    const auto& states = builtin_current_states();

    std::vector<TrainedClassifier> classifiers;
    classifiers.reserve(n_op);
    for (int j = 0; j < n_op; ++j) {
        MedicalRecord rec =
            cfg.record_files.empty()
                ? synthetic_record(
                      derive_seed(cfg.master_seed, kRecordStreamBase + j),
                      cfg.record_days)
                : load_medical_record_csv(cfg.record_files[j]);
        classifiers.push_back(train(rec, cfg.smoothing));
    }
    rep.deltas.resize(static_cast<std::size_t>(n_op) * n_states);
    for (int j = 0; j < n_op; ++j) {
        for (int si = 0; si < n_states; ++si) {
            rep.deltas[j * n_states + si] =
                posterior(classifiers[j], states[cfg.state_indices[si]]).delta;
        }
    }

    const int K = cfg.scenario.num_users;
    const int NU = cfg.scenario.num_normal;
    for (Model m : cfg.models) {
        CellSpec before;
        before.model = m;
        before.after = false;
        before.objective =
            m == Model::WsrMax ? Objective::WsrMax : Objective::PfBefore;
        before.up.assign(K, 1.0);
        rep.cells.push_back(std::move(before));
        for (int si = 0; si < n_states; ++si) {
            for (double alpha : cfg.alphas) {
                CellSpec cell;
                cell.model = m;
                cell.after = true;
                cell.state_index = cfg.state_indices[si];
                cell.alpha = alpha;
                cell.objective =
                    m == Model::WsrMax ? Objective::WsrMax : Objective::PfAfter;
                cell.up.assign(K, 1.0);
                for (int j = 0; j < n_op; ++j) {
                    StrokeLikelihood delta{rep.deltas[j * n_states + si]};
                    cell.up[NU + j] = priority(delta, alpha, true).up;
                }
                rep.cells.push_back(std::move(cell));
            }
        }
    }

    const std::size_t runs = rep.cells.size() * cfg.instances;
    rep.sinr.assign(runs * K, 0.0);
    rep.objective_values.assign(runs, 0.0);
    rep.nodes.assign(runs, 0);
    rep.solve_ms.assign(runs, 0.0);
    return rep;
}

std::vector<Scenario> make_scenarios(const ExperimentConfig& cfg) {
    std::vector<Scenario> out;
    out.reserve(cfg.instances);
    for (int i = 0; i < cfg.instances; ++i) {
        out.push_back(generate(cfg.scenario,
                               derive_seed(cfg.master_seed, i + 1)));
    }
    return out;
}

void solve_one(ExperimentReport& rep, const std::vector<Scenario>& scenarios,
               int c, int i) {
    const CellSpec& cell = rep.cells[c];
    AllocationProblem prob =
        make_problem(scenarios[i], cell.objective, cell.up);
    const auto t0 = std::chrono::steady_clock::now();
    AllocationResult res = solve(prob);
    const auto t1 = std::chrono::steady_clock::now();
    const std::size_t run = rep.run_index(c, i);
    rep.solve_ms[run] =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    rep.objective_values[run] = res.objective_value;
    rep.nodes[run] = res.nodes_explored;

    // Per-user SINR, averaged over the user's RBs (exactly one RB each at
    // the default scale).
    const int K = rep.num_users();
    const int S = rep.config.scenario.num_slots();
    std::vector<double> sum(K, 0.0);
    std::vector<int> cnt(K, 0);
    for (int s = 0; s < S; ++s) {
        int k = res.assignment.slot_user[s];
        if (k < 0) continue;
        sum[k] += res.slot_sinr[s];
        ++cnt[k];
    }
    for (int k = 0; k < K; ++k) {
        rep.sinr[rep.raw_index(c, i, k)] = cnt[k] ? sum[k] / cnt[k] : 0.0;
    }
}

std::string describe_cell(const CellSpec& cell, int instance) {
    std::string out = "model=";
    out += model_name(cell.model);
    out += cell.after ? " phase=after state=" + std::to_string(cell.state_index + 1) +
                            " alpha=" + shortest(cell.alpha)
                      : " phase=before";
    out += " instance=" + std::to_string(instance + 1);
    return out;
}

const CellSpec* find_before_cell(const ExperimentReport& r, Model m,
                                 int* index) {
    for (std::size_t c = 0; c < r.cells.size(); ++c) {
        if (r.cells[c].model == m && !r.cells[c].after) {
            if (index) *index = static_cast<int>(c);
            return &r.cells[c];
        }
    }
    throw std::invalid_argument("report: no before-phase cell for model");
}

std::vector<int> find_after_cells(const ExperimentReport& r, Model m,
                                  double alpha) {
    std::vector<int> out;
    for (std::size_t c = 0; c < r.cells.size(); ++c) {
        const auto& cell = r.cells[c];
        if (cell.model == m && cell.after && cell.alpha == alpha) {
            out.push_back(static_cast<int>(c));
        }
    }
    if (out.empty()) {
        throw std::invalid_argument(
            "report: no after-phase cells for this (model, alpha)");
    }
    return out;
}

} // namespace

std::string_view model_name(Model model) {
    return model == Model::WsrMax ? "wsrmax" : "pf";
}

Model parse_model(std::string_view name) {
    if (name == "wsrmax") return Model::WsrMax;
    if (name == "pf") return Model::Pf;
    throw std::invalid_argument("unknown model '" + std::string(name) +
                                "' (expected wsrmax or pf)");
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
    nlohmann::ordered_json j;
    j["scenario"] =
        nlohmann::ordered_json::parse(scenario_config_to_json(config.scenario));
    j["instances"] = config.instances;
    j["alphas"] = config.alphas;
    nlohmann::ordered_json states = nlohmann::ordered_json::array();
    for (int s : config.state_indices) states.push_back(s + 1);
    j["states"] = std::move(states);
    nlohmann::ordered_json models = nlohmann::ordered_json::array();
    for (Model m : config.models) models.push_back(std::string(model_name(m)));
    j["models"] = std::move(models);
    j["record_files"] = config.record_files;
    j["smoothing"] = config.smoothing;
    j["record_days"] = config.record_days;
    j["master_seed"] = config.master_seed;
    return j.dump(2);
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("experiment config JSON: ") +
                                    e.what());
    }
    ExperimentConfig cfg;
    try {
        if (j.contains("scenario")) {
            cfg.scenario = scenario_config_from_json(j.at("scenario").dump());
        }
        if (j.contains("instances")) cfg.instances = j.at("instances").get<int>();
        if (j.contains("alphas")) {
            cfg.alphas = j.at("alphas").get<std::vector<double>>();
        }
        if (j.contains("states")) {
            cfg.state_indices.clear();
            for (int s : j.at("states").get<std::vector<int>>()) {
                cfg.state_indices.push_back(s - 1);
            }
        }
        if (j.contains("models")) {
            cfg.models.clear();
            for (const auto& name : j.at("models")) {
                cfg.models.push_back(parse_model(name.get<std::string>()));
            }
        }
        if (j.contains("record_files")) {
            cfg.record_files =
                j.at("record_files").get<std::vector<std::string>>();
        }
        if (j.contains("smoothing")) {
            cfg.smoothing = j.at("smoothing").get<double>();
        }
        if (j.contains("record_days")) {
            cfg.record_days = j.at("record_days").get<int>();
        }
        if (j.contains("master_seed")) {
            cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("experiment config JSON: ") +
                                    e.what());
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open experiment config: " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return experiment_config_from_json(buf.str());
}

ExperimentReport run_experiment(const ExperimentConfig& config, int jobs) {
    const auto wall0 = std::chrono::steady_clock::now();
    ExperimentReport rep = init_report(config);
    const std::vector<Scenario> scenarios = make_scenarios(config);
    const long total =
        static_cast<long>(rep.cells.size()) * config.instances;
    std::string first_error;
#ifdef _OPENMP
    const int threads =
        jobs <= 0 ? omp_get_max_threads() : std::max(1, jobs);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#else
    (void)jobs;
#endif
    for (long idx = 0; idx < total; ++idx) {
        const int c = static_cast<int>(idx / config.instances);
        const int i = static_cast<int>(idx % config.instances);
        try {
            solve_one(rep, scenarios, c, i);
        } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
            {
                if (first_error.empty()) {
                    first_error =
                        describe_cell(rep.cells[c], i) + ": " + e.what();
                }
            }
        }
    }
    if (!first_error.empty()) {
        throw std::runtime_error("experiment failed at " + first_error);
    }
    rep.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - wall0)
                           .count();
    return rep;
}

ExperimentReport run_experiment_serial(const ExperimentConfig& config) {
    const auto wall0 = std::chrono::steady_clock::now();
    ExperimentReport rep = init_report(config);
    const std::vector<Scenario> scenarios = make_scenarios(config);
    for (std::size_t c = 0; c < rep.cells.size(); ++c) {
        for (int i = 0; i < config.instances; ++i) {
            try {
                solve_one(rep, scenarios, static_cast<int>(c), i);
            } catch (const std::exception& e) {
                throw std::runtime_error("experiment failed at " +
                                         describe_cell(rep.cells[c], i) +
                                         ": " + e.what());
            }
        }
    }
    rep.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - wall0)
                           .count();
    return rep;
}

double before_user_mean(const ExperimentReport& r, Model m, int user) {
    int c = -1;
    find_before_cell(r, m, &c);
    double sum = 0.0;
    for (int i = 0; i < r.config.instances; ++i) {
        sum += r.sinr[r.raw_index(c, i, user)];
    }
    return sum / r.config.instances;
}

double before_population_mean(const ExperimentReport& r, Model m) {
    double sum = 0.0;
    for (int k = 0; k < r.num_users(); ++k) {
        sum += before_user_mean(r, m, k);
    }
    return sum / r.num_users();
}

double after_user_mean(const ExperimentReport& r, Model m, double alpha,
                       int user) {
    const auto cells = find_after_cells(r, m, alpha);
    double sum = 0.0;
    for (int c : cells) {
        for (int i = 0; i < r.config.instances; ++i) {
            sum += r.sinr[r.raw_index(c, i, user)];
        }
    }
    return sum / (static_cast<double>(cells.size()) * r.config.instances);
}

double after_population_mean(const ExperimentReport& r, Model m,
                             double alpha) {
    double sum = 0.0;
    for (int k = 0; k < r.num_users(); ++k) {
        sum += after_user_mean(r, m, alpha, k);
    }
    return sum / r.num_users();
}

double op_above_average_rate(const ExperimentReport& r, Model m, double alpha,
                             int op_user) {
    const auto cells = find_after_cells(r, m, alpha);
    const int K = r.num_users();
    int hits = 0;
    for (int i = 0; i < r.config.instances; ++i) {
        double op_sum = 0.0;
        double all_sum = 0.0;
        for (int c : cells) {
            for (int k = 0; k < K; ++k) {
                double v = r.sinr[r.raw_index(c, i, k)];
                all_sum += v;
                if (k == op_user) op_sum += v;
            }
        }
        double op_mean = op_sum / cells.size();
        double pop_mean = all_sum / (static_cast<double>(cells.size()) * K);
        if (op_mean >= pop_mean) ++hits;
    }
    return static_cast<double>(hits) / r.config.instances;
}

double max_normal_user_drop(const ExperimentReport& r, Model m, double alpha) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < r.config.scenario.num_normal; ++k) {
        double before = before_user_mean(r, m, k);
        double after = after_user_mean(r, m, alpha, k);
        worst = std::max(worst, (before - after) / before);
    }
    return worst;
}

double op_alpha_spread(const ExperimentReport& r, Model m) {
    const auto& cfg = r.config;
    const int n_op = cfg.scenario.num_outpatients();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    for (double alpha : cfg.alphas) {
        double group = 0.0;
        for (int k = cfg.scenario.num_normal; k < cfg.scenario.num_users;
             ++k) {
            group += after_user_mean(r, m, alpha, k);
        }
        group /= n_op;
        lo = std::min(lo, group);
        hi = std::max(hi, group);
        sum += group;
    }
    const double mean = sum / cfg.alphas.size();
    return mean > 0.0 ? (hi - lo) / mean : 0.0;
}

double median_solve_ms(const ExperimentReport& r) {
    std::vector<double> ms = r.solve_ms;
    if (ms.empty()) return 0.0;
    std::nth_element(ms.begin(), ms.begin() + ms.size() / 2, ms.end());
    return ms[ms.size() / 2];
}

std::string raw_csv_string(const ExperimentReport& r) {
    std::string out = "objective,phase,state,alpha,instance,user,sinr,sinr_db\n";
    out.reserve(64 + r.sinr.size() * 56);
    for (std::size_t c = 0; c < r.cells.size(); ++c) {
        const CellSpec& cell = r.cells[c];
        const std::string prefix =
            std::string(model_name(cell.model)) + "," +
            (cell.after ? "after," + std::to_string(cell.state_index + 1) +
                              "," + shortest(cell.alpha)
                        : "before,,");
        for (int i = 0; i < r.config.instances; ++i) {
            for (int k = 0; k < r.num_users(); ++k) {
                double v = r.sinr[r.raw_index(static_cast<int>(c), i, k)];
                out += prefix;
                out += ',';
                out += std::to_string(i + 1);
                out += ',';
                out += std::to_string(k + 1);
                out += ',';
                out += shortest(v);
                out += ',';
                out += shortest(10.0 * std::log10(v));
                out += '\n';
            }
        }
    }
    return out;
}

std::string summary_csv_string(const ExperimentReport& r) {
    std::string out = "objective,phase,alpha,user,mean_sinr,mean_sinr_db\n";
    for (Model m : r.config.models) {
        for (int k = 0; k < r.num_users(); ++k) {
            double v = before_user_mean(r, m, k);
            out += std::string(model_name(m)) + ",before,," +
                   std::to_string(k + 1) + "," + shortest(v) + "," +
                   shortest(10.0 * std::log10(v)) + "\n";
        }
        for (double alpha : r.config.alphas) {
            for (int k = 0; k < r.num_users(); ++k) {
                double v = after_user_mean(r, m, alpha, k);
                out += std::string(model_name(m)) + ",after," +
                       shortest(alpha) + "," + std::to_string(k + 1) + "," +
                       shortest(v) + "," + shortest(10.0 * std::log10(v)) +
                       "\n";
            }
        }
    }
    return out;
}

std::string summary_json_string(const ExperimentReport& r) {
    const auto& cfg = r.config;
    nlohmann::ordered_json j;
    j["config"] = nlohmann::ordered_json::parse(experiment_config_to_json(cfg));

    nlohmann::ordered_json deltas = nlohmann::ordered_json::array();
    const int n_states = static_cast<int>(cfg.state_indices.size());
    for (int op = 0; op < cfg.scenario.num_outpatients(); ++op) {
        nlohmann::ordered_json row;
        row["user"] = cfg.scenario.num_normal + op + 1;
        nlohmann::ordered_json per_state;
        for (int si = 0; si < n_states; ++si) {
            per_state[std::to_string(cfg.state_indices[si] + 1)] =
                r.deltas[op * n_states + si];
        }
        row["delta"] = std::move(per_state);
        deltas.push_back(std::move(row));
    }
    j["deltas"] = std::move(deltas);

    for (Model m : cfg.models) {
        nlohmann::ordered_json block;
        block["population_mean_before"] = before_population_mean(r, m);
        nlohmann::ordered_json after_mean, rates, drops;
        for (double alpha : cfg.alphas) {
            const std::string key = shortest(alpha);
            after_mean[key] = after_population_mean(r, m, alpha);
            nlohmann::ordered_json per_op = nlohmann::ordered_json::array();
            for (int k = cfg.scenario.num_normal; k < cfg.scenario.num_users;
                 ++k) {
                per_op.push_back(op_above_average_rate(r, m, alpha, k));
            }
            rates[key] = std::move(per_op);
            drops[key] = max_normal_user_drop(r, m, alpha);
        }
        block["population_mean_after"] = std::move(after_mean);
        block["op_above_average_rate"] = std::move(rates);
        block["max_normal_user_drop"] = std::move(drops);
        block["op_alpha_spread"] = op_alpha_spread(r, m);
        j[std::string(model_name(m))] = std::move(block);
    }

    j["timing"] = {
        {"wall_seconds", r.wall_seconds},
        {"median_solve_ms", median_solve_ms(r)},
        {"solves", r.solve_ms.size()},
    };
    return j.dump(2);
}

namespace {

std::string fmt(double v, const char* spec = "%.2f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// Minimal hand-rolled grouped bar chart; one group per user, one bar per
// series. Values are linear mean SINR, the outpatient block is shaded.
void write_bar_svg(const std::string& path, const std::string& title,
                   const std::vector<std::string>& series_names,
                   const std::vector<std::vector<double>>& series,
                   int num_normal) {
    const double width = 760, height = 420;
    const double left = 76, right = 16, top = 56, bottom = 54;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    const int groups = static_cast<int>(series.front().size());
    const int ns = static_cast<int>(series.size());
    double vmax = 0.0;
    for (const auto& s : series) {
        for (double v : s) vmax = std::max(vmax, v);
    }
    if (vmax <= 0.0) vmax = 1.0;
    vmax *= 1.15;
    const char* colors[] = {"#4878a8", "#c0504d", "#7aa661"};

    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
        << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"#ffffff\"/>\n";

    const double group_w = plot_w / groups;
    if (num_normal < groups) {
        const double x0 = left + group_w * num_normal;
        out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(top) << "\" width=\""
            << fmt(plot_w - group_w * num_normal) << "\" height=\""
            << fmt(plot_h) << "\" fill=\"#f5eedc\"/>\n";
        out << "<text x=\"" << fmt(x0 + 4) << "\" y=\"" << fmt(top + 14)
            << "\" font-family=\"sans-serif\" font-size=\"11\" "
               "fill=\"#8a7b50\">outpatients</text>\n";
    }

    out << "<text x=\"" << fmt(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << title << "</text>\n";

    for (int g = 0; g <= 4; ++g) {
        const double v = vmax * g / 4.0;
        const double y = top + plot_h * (1.0 - static_cast<double>(g) / 4.0);
        out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y) << "\" x2=\""
            << fmt(left + plot_w) << "\" y2=\"" << fmt(y)
            << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << fmt(v, "%.4g") << "</text>\n";
    }

    const double bar_w = group_w * 0.72 / ns;
    for (int g = 0; g < groups; ++g) {
        for (int s = 0; s < ns; ++s) {
            const double v = series[s][g];
            const double h = plot_h * v / vmax;
            const double x =
                left + group_w * g + group_w * 0.14 + bar_w * s;
            const double y = top + plot_h - h;
            out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y)
                << "\" width=\"" << fmt(bar_w * 0.92) << "\" height=\""
                << fmt(h) << "\" fill=\"" << colors[s % 3] << "\"/>\n";
            out << "<text x=\"" << fmt(x + bar_w * 0.46) << "\" y=\""
                << fmt(y - 3)
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                   "font-size=\"9\">"
                << fmt(v, "%.3g") << "</text>\n";
        }
        out << "<text x=\"" << fmt(left + group_w * (g + 0.5)) << "\" y=\""
            << fmt(top + plot_h + 16)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"12\">"
            << g + 1 << "</text>\n";
    }

    out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\""
        << fmt(left) << "\" y2=\"" << fmt(top + plot_h)
        << "\" stroke=\"#333333\"/>\n";
    out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + plot_h)
        << "\" x2=\"" << fmt(left + plot_w) << "\" y2=\"" << fmt(top + plot_h)
        << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\""
        << fmt(height - 14)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">User</text>\n";
    out << "<text x=\"18\" y=\"" << fmt(top + plot_h / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\" transform=\"rotate(-90 18 "
        << fmt(top + plot_h / 2) << ")\">Mean SINR (linear)</text>\n";

    double lx = left + 8;
    for (int s = 0; s < ns; ++s) {
        out << "<rect x=\"" << fmt(lx) << "\" y=\"34\" width=\"12\" "
               "height=\"12\" fill=\""
            << colors[s % 3] << "\"/>\n";
        out << "<text x=\"" << fmt(lx + 16)
            << "\" y=\"44\" font-family=\"sans-serif\" font-size=\"12\">"
            << series_names[s] << "</text>\n";
        lx += 24 + 7.2 * series_names[s].size();
    }
    out << "</svg>\n";
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

constexpr const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Redraw the summary.csv bar charts with matplotlib (PNG output).

Usage: python3 plot.py [summary.csv [outdir]]
"""
import csv
import sys
from collections import defaultdict


def main(summary="summary.csv", outdir="."):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = list(csv.DictReader(open(summary)))
    before = defaultdict(dict)
    after = defaultdict(dict)
    for row in rows:
        user = int(row["user"])
        value = float(row["mean_sinr"])
        if row["phase"] == "before":
            before[row["objective"]][user] = value
        else:
            after[(row["objective"], row["alpha"])][user] = value

    for obj, values in sorted(before.items()):
        users = sorted(values)
        plt.figure(figsize=(8, 4.2))
        plt.bar([str(u) for u in users], [values[u] for u in users],
                color="#4878a8")
        plt.title(f"{obj}: mean SINR per user, equal priorities")
        plt.xlabel("User")
        plt.ylabel("Mean SINR (linear)")
        plt.tight_layout()
        plt.savefig(f"{outdir}/{obj}_before.png", dpi=120)
        plt.close()

    for (obj, alpha), values in sorted(after.items()):
        users = sorted(values)
        base = before[obj]
        width = 0.4
        xs = range(len(users))
        plt.figure(figsize=(8, 4.2))
        plt.bar([x - width / 2 for x in xs], [base[u] for u in users],
                width, label="before", color="#4878a8")
        plt.bar([x + width / 2 for x in xs], [values[u] for u in users],
                width, label=f"after (alpha={alpha})", color="#c0504d")
        plt.xticks(list(xs), [str(u) for u in users])
        plt.title(f"{obj}: mean SINR per user, alpha={alpha}")
        plt.xlabel("User")
        plt.ylabel("Mean SINR (linear)")
        plt.legend()
        plt.tight_layout()
        plt.savefig(f"{outdir}/{obj}_after_alpha{alpha}.png", dpi=120)
        plt.close()


if __name__ == "__main__":
    main(*sys.argv[1:])
)PY";

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

} // namespace

void write_outputs(const ExperimentReport& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const auto path = [&](const std::string& name) { return dir + "/" + name; };
    write_text_file(path("raw.csv"), raw_csv_string(r));
    write_text_file(path("summary.csv"), summary_csv_string(r));
    write_text_file(path("summary.json"), summary_json_string(r));
    write_text_file(path("plot.py"), kPlotScript);

    const int K = r.num_users();
    for (Model m : r.config.models) {
        std::vector<double> base(K);
        for (int k = 0; k < K; ++k) base[k] = before_user_mean(r, m, k);
        const std::string name(model_name(m));
        write_bar_svg(path(name + "_before.svg"),
                      name + ": mean SINR per user, equal priorities",
                      {"before"}, {base}, r.config.scenario.num_normal);
        for (double alpha : r.config.alphas) {
            std::vector<double> after(K);
            for (int k = 0; k < K; ++k) {
                after[k] = after_user_mean(r, m, alpha, k);
            }
            write_bar_svg(
                path(name + "_after_alpha" + shortest(alpha) + ".svg"),
                name + ": mean SINR per user, alpha=" + shortest(alpha),
                {"before", "after"}, {base, after},
                r.config.scenario.num_normal);
        }
    }
}

} // namespace hetsched
