#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetsched/harness.hpp"

using namespace hetsched;

namespace {

const std::string kFixtures = HETSCHED_FIXTURE_DIR;

// A 4-user network small enough that a full grid solves in milliseconds.
ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.scenario.num_pbs = 2;
    cfg.scenario.rbs_per_pbs = 2;
    cfg.scenario.num_users = 4;
    cfg.scenario.num_normal = 3;
    cfg.instances = 3;
    cfg.alphas = {50.0, 1000.0};
    cfg.state_indices = {0, 2};
    cfg.record_days = 16;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("model names round trip") {
    CHECK(model_name(Model::WsrMax) == "wsrmax");
    CHECK(model_name(Model::Pf) == "pf");
    CHECK(parse_model("wsrmax") == Model::WsrMax);
    CHECK(parse_model("pf") == Model::Pf);
    CHECK_THROWS_AS(parse_model("fairness"), std::invalid_argument);
}

TEST_CASE("experiment config JSON round trip") {
    auto cfg = small_config();
    cfg.smoothing = 0.5;
    cfg.master_seed = 777;
    cfg.record_files = {"a.csv"};
    auto back = experiment_config_from_json(experiment_config_to_json(cfg));
    CHECK(back.scenario.num_users == 4);
    CHECK(back.instances == 3);
    CHECK(back.alphas == cfg.alphas);
    CHECK(back.state_indices == cfg.state_indices);
    CHECK(back.models == cfg.models);
    CHECK(back.record_files == cfg.record_files);
    CHECK(back.smoothing == 0.5);
    CHECK(back.record_days == 16);
    CHECK(back.master_seed == 777);

    // missing keys keep their defaults; unknown model names do not parse
    auto sparse = experiment_config_from_json("{\"instances\": 7}");
    CHECK(sparse.instances == 7);
    CHECK(sparse.alphas == std::vector<double>{50.0, 500.0, 1000.0});
    CHECK(sparse.models == (std::vector<Model>{Model::WsrMax, Model::Pf}));
    CHECK_THROWS_AS(experiment_config_from_json("{\"models\": [\"x\"]}"),
                    std::invalid_argument);
    CHECK_THROWS_AS(experiment_config_from_json("nope"),
                    std::invalid_argument);
}

TEST_CASE("config file loading") {
    namespace fs = std::filesystem;
    auto path = (fs::temp_directory_path() / "hetsched_expcfg.json").string();
    {
        std::ofstream out(path);
        out << experiment_config_to_json(small_config());
    }
    auto cfg = load_experiment_config(path);
    CHECK(cfg.instances == 3);
    CHECK(cfg.scenario.num_users == 4);
    fs::remove(path);
    CHECK_THROWS_AS(load_experiment_config(path), std::invalid_argument);
}

TEST_CASE("validation rejects broken experiment configs") {
    auto run_with = [](auto&& mutate) {
        auto cfg = small_config();
        cfg.instances = 1;
        cfg.alphas = {50.0};
        cfg.state_indices = {0};
        mutate(cfg);
        return run_experiment_serial(cfg);
    };
    CHECK_THROWS_AS(run_with([](auto& c) { c.instances = 0; }),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_with([](auto& c) { c.alphas = {-1.0}; }),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_with([](auto& c) { c.alphas.clear(); }),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_with([](auto& c) { c.state_indices = {7}; }),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_with([](auto& c) { c.state_indices.clear(); }),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_with([](auto& c) { c.models.clear(); }),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_with([](auto& c) { c.smoothing = -0.1; }),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_with([](auto& c) { c.record_days = 1; }),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_with([](auto& c) { c.record_files = {"a", "b"}; }),
                    std::invalid_argument);
}

TEST_CASE("cell grid layout") {
    auto cfg = small_config();
    cfg.instances = 1;
    cfg.alphas = {500.0};
    cfg.state_indices = {3};
    auto rep = run_experiment_serial(cfg);
    // per model: one before cell and one (state, alpha) after cell
    REQUIRE(rep.cells.size() == 4);
    CHECK_FALSE(rep.cells[0].after);
    CHECK(rep.cells[1].after);
    CHECK(rep.cells[1].state_index == 3);
    CHECK(rep.cells[1].alpha == 500.0);
    CHECK(rep.cells[0].model == Model::WsrMax);
    CHECK(rep.cells[2].model == Model::Pf);
    CHECK(rep.cells[2].objective == Objective::PfBefore);
    CHECK(rep.cells[3].objective == Objective::PfAfter);
    CHECK(rep.sinr.size() == 4u * 1u * 4u);
    CHECK(rep.objective_values.size() == 4);
    CHECK(rep.nodes.size() == 4);
    CHECK(rep.deltas.size() == 1);

    // the after cell reweights exactly the outpatient
    REQUIRE(rep.cells[1].up.size() == 4);
    CHECK(rep.cells[1].up[0] == 1.0);
    CHECK(rep.cells[1].up[3] == 1.0 + 500.0 * rep.deltas[0]);
}

TEST_CASE("alpha zero collapses WSRMax after onto before") {
    auto cfg = small_config();
    cfg.models = {Model::WsrMax};
    cfg.alphas = {0.0};
    cfg.state_indices = {0};
    cfg.instances = 4;
    auto rep = run_experiment_serial(cfg);
    REQUIRE(rep.cells.size() == 2);
    for (int i = 0; i < cfg.instances; ++i) {
        CHECK(rep.objective_values[rep.run_index(0, i)] ==
              rep.objective_values[rep.run_index(1, i)]);
        for (int k = 0; k < 4; ++k) {
            CHECK(rep.sinr[rep.raw_index(0, i, k)] ==
                  rep.sinr[rep.raw_index(1, i, k)]);
        }
    }
}

TEST_CASE("parallel run reproduces the serial reference bitwise") {
    auto cfg = small_config();
    auto serial = run_experiment_serial(cfg);
    auto parallel = run_experiment(cfg, 2);
    CHECK(serial.sinr == parallel.sinr);
    CHECK(serial.objective_values == parallel.objective_values);
    CHECK(serial.nodes == parallel.nodes);
    CHECK(serial.deltas == parallel.deltas);
    CHECK(raw_csv_string(serial) == raw_csv_string(parallel));
    CHECK(summary_csv_string(serial) == summary_csv_string(parallel));

    auto again = run_experiment_serial(cfg);
    CHECK(raw_csv_string(serial) == raw_csv_string(again));
}

TEST_CASE("aggregates agree with direct recomputation") {
    auto cfg = small_config();
    auto rep = run_experiment_serial(cfg);
    const int K = 4;
    const int I = cfg.instances;

    for (Model m : cfg.models) {
        int before_cell = -1;
        for (std::size_t c = 0; c < rep.cells.size(); ++c) {
            if (rep.cells[c].model == m && !rep.cells[c].after) {
                before_cell = static_cast<int>(c);
            }
        }
        REQUIRE(before_cell >= 0);
        double pop = 0.0;
        for (int k = 0; k < K; ++k) {
            double mean = 0.0;
            for (int i = 0; i < I; ++i) {
                mean += rep.sinr[rep.raw_index(before_cell, i, k)];
            }
            mean /= I;
            pop += mean;
            CHECK(before_user_mean(rep, m, k) ==
                  doctest::Approx(mean).epsilon(1e-12));
        }
        CHECK(before_population_mean(rep, m) ==
              doctest::Approx(pop / K).epsilon(1e-12));

        for (double alpha : cfg.alphas) {
            std::vector<int> cells;
            for (std::size_t c = 0; c < rep.cells.size(); ++c) {
                if (rep.cells[c].model == m && rep.cells[c].after &&
                    rep.cells[c].alpha == alpha) {
                    cells.push_back(static_cast<int>(c));
                }
            }
            REQUIRE(cells.size() == cfg.state_indices.size());
            for (int k = 0; k < K; ++k) {
                double mean = 0.0;
                for (int c : cells) {
                    for (int i = 0; i < I; ++i) {
                        mean += rep.sinr[rep.raw_index(c, i, k)];
                    }
                }
                mean /= static_cast<double>(cells.size() * I);
                CHECK(after_user_mean(rep, m, alpha, k) ==
                      doctest::Approx(mean).epsilon(1e-12));
            }

            // OP above-average rate, re-derived per instance
            int hits = 0;
            for (int i = 0; i < I; ++i) {
                double op_mean = 0.0;
                double pop_mean = 0.0;
                for (int c : cells) {
                    op_mean += rep.sinr[rep.raw_index(c, i, 3)];
                    for (int k = 0; k < K; ++k) {
                        pop_mean += rep.sinr[rep.raw_index(c, i, k)];
                    }
                }
                op_mean /= static_cast<double>(cells.size());
                pop_mean /= static_cast<double>(cells.size() * K);
                hits += op_mean >= pop_mean ? 1 : 0;
            }
            CHECK(op_above_average_rate(rep, m, alpha, 3) ==
                  doctest::Approx(static_cast<double>(hits) / I)
                      .epsilon(1e-12));

            double worst = 0.0;
            for (int k = 0; k < 3; ++k) {
                double b = before_user_mean(rep, m, k);
                double a = after_user_mean(rep, m, alpha, k);
                worst = std::max(worst, (b - a) / b);
            }
            CHECK(max_normal_user_drop(rep, m, alpha) ==
                  doctest::Approx(worst).epsilon(1e-12));
        }

        double lo = 1e300, hi = -1e300, sum = 0.0;
        for (double alpha : cfg.alphas) {
            double g = after_user_mean(rep, m, alpha, 3);
            lo = std::min(lo, g);
            hi = std::max(hi, g);
            sum += g;
        }
        double spread = (hi - lo) / (sum / static_cast<double>(
                                               cfg.alphas.size()));
        CHECK(op_alpha_spread(rep, m) ==
              doctest::Approx(spread).epsilon(1e-12));
    }

    CHECK(median_solve_ms(rep) >= 0.0);
    CHECK(rep.wall_seconds > 0.0);
}

TEST_CASE("raw CSV shape") {
    auto cfg = small_config();
    cfg.instances = 2;
    auto rep = run_experiment_serial(cfg);
    auto csv = raw_csv_string(rep);
    std::istringstream in(csv);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(!lines.empty());
    CHECK(lines[0] == "objective,phase,state,alpha,instance,user,sinr,sinr_db");
    CHECK(lines.size() == 1 + rep.cells.size() * 2 * 4);
    // before rows leave state and alpha blank
    CHECK(lines[1].rfind("wsrmax,before,,,1,1,", 0) == 0);
    // an after row names the 1-based state and the alpha
    bool has_after = false;
    for (const auto& l : lines) {
        has_after = has_after || l.rfind("wsrmax,after,1,50,", 0) == 0;
    }
    CHECK(has_after);
}

TEST_CASE("outpatient records can come from files") {
    auto cfg = small_config();
    cfg.instances = 1;
    cfg.models = {Model::WsrMax};
    cfg.alphas = {100.0};
    cfg.state_indices = {0};
    cfg.record_files = {kFixtures + "/r1_levels.csv"};
    auto rep = run_experiment_serial(cfg);
    REQUIRE(rep.deltas.size() == 1);
    CHECK(rep.deltas[0] == doctest::Approx(8.0 / 11.0).epsilon(1e-15));
    CHECK(rep.cells[1].up[3] ==
          doctest::Approx(1.0 + 100.0 * 8.0 / 11.0).epsilon(1e-15));
}

TEST_CASE("write_outputs produces the full artifact set") {
    namespace fs = std::filesystem;
    auto cfg = small_config();
    cfg.instances = 2;
    auto rep = run_experiment_serial(cfg);
    auto dir = (fs::temp_directory_path() / "hetsched_outputs").string();
    fs::remove_all(dir);
    write_outputs(rep, dir);

    for (const char* name :
         {"raw.csv", "summary.csv", "summary.json", "plot.py",
          "wsrmax_before.svg", "wsrmax_after_alpha50.svg",
          "wsrmax_after_alpha1000.svg", "pf_before.svg",
          "pf_after_alpha50.svg", "pf_after_alpha1000.svg"}) {
        CHECK(fs::exists(fs::path(dir) / name));
    }

    auto j = nlohmann::json::parse(slurp(dir + "/summary.json"));
    CHECK(j.contains("config"));
    CHECK(j.contains("deltas"));
    CHECK(j.contains("wsrmax"));
    CHECK(j.contains("pf"));
    CHECK(j.contains("timing"));
    CHECK(j["timing"]["solves"].get<int>() ==
          static_cast<int>(rep.cells.size()) * cfg.instances);
    CHECK(j["wsrmax"].contains("population_mean_before"));
    CHECK(j["wsrmax"].contains("op_above_average_rate"));
    CHECK(j["wsrmax"].contains("max_normal_user_drop"));
    CHECK(j["wsrmax"].contains("op_alpha_spread"));

    auto svg = slurp(dir + "/wsrmax_before.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("outpatients") != std::string::npos);

    // rerun: deterministic artifacts regenerate byte-identically
    auto raw_one = slurp(dir + "/raw.csv");
    auto rep2 = run_experiment(cfg, 2);
    auto dir2 = (fs::temp_directory_path() / "hetsched_outputs2").string();
    fs::remove_all(dir2);
    write_outputs(rep2, dir2);
    CHECK(slurp(dir2 + "/raw.csv") == raw_one);
    CHECK(slurp(dir2 + "/summary.csv") == slurp(dir + "/summary.csv"));
    CHECK(slurp(dir2 + "/wsrmax_after_alpha50.svg") ==
          slurp(dir + "/wsrmax_after_alpha50.svg"));
    fs::remove_all(dir);
    fs::remove_all(dir2);
}
