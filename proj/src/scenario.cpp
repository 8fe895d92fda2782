#include "hetsched/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hetsched/rng.hpp"

namespace hetsched {

void validate(const ScenarioConfig& config) {
    if (config.num_pbs < 1 || config.rbs_per_pbs < 1) {
        throw std::invalid_argument("scenario: need at least one PBS and one RB");
    }
    if (config.num_users < 1) {
        throw std::invalid_argument("scenario: need at least one user");
    }
    if (config.num_normal < 0 || config.num_normal >= config.num_users) {
        throw std::invalid_argument("scenario: NU must satisfy 0 <= NU < K");
    }
    if (config.num_slots() < config.num_users) {
        throw std::invalid_argument(
            "scenario: B*N < K, not every user can hold an RB");
    }
    if (config.distance_min_m <= 0.0 ||
        config.distance_max_m < config.distance_min_m) {
        throw std::invalid_argument("scenario: bad distance range");
    }
    if (config.channel.pl_slope_db <= 0.0 ||
        config.channel.rb_bandwidth_hz <= 0.0) {
        throw std::invalid_argument("scenario: bad channel parameters");
    }
}

Scenario generate(const ScenarioConfig& config, std::uint64_t seed) {
    validate(config);
    const int B = config.num_pbs;
    const int N = config.rbs_per_pbs;
    const int K = config.num_users;

    Scenario sc;
    sc.config = config;
    sc.seed = seed;
    sc.sigma_mw = noise_power_mw(config.channel).value;
    sc.op_flags.assign(K, false);
    for (int k = config.num_normal; k < K; ++k) sc.op_flags[k] = true;

    sc.omega_mw.resize(static_cast<std::size_t>(K) * B * N);
    std::mt19937_64 rng(seed);
    for (int k = 0; k < K; ++k) {
        for (int b = 0; b < B; ++b) {
            double d = uniform_in(rng, config.distance_min_m,
                                  config.distance_max_m);
            for (int n = 0; n < N; ++n) {
                double gain =
                    config.unit_fading ? 1.0 : rayleigh_power_gain(rng);
                sc.omega_mw[(static_cast<std::size_t>(k) * B + b) * N + n] =
                    received_power_mw(config.channel, config.tx_per_rb, d,
                                      gain)
                        .value;
            }
        }
    }
    return sc;
}

int max_rbs_per_user(const ScenarioConfig& config) {
    double ratio = dbm_to_mw(config.max_power_per_connection).value /
                   dbm_to_mw(config.tx_per_rb).value;
    return static_cast<int>(std::floor(ratio));
}

namespace {

nlohmann::ordered_json config_to_json(const ScenarioConfig& c) {
    nlohmann::ordered_json j;
    j["num_pbs"] = c.num_pbs;
    j["rbs_per_pbs"] = c.rbs_per_pbs;
    j["num_users"] = c.num_users;
    j["num_normal"] = c.num_normal;
    j["distance_min_m"] = c.distance_min_m;
    j["distance_max_m"] = c.distance_max_m;
    j["tx_per_rb_dbm"] = c.tx_per_rb.value;
    j["max_power_per_connection_dbm"] = c.max_power_per_connection.value;
    j["channel"] = {
        {"pl_intercept_db", c.channel.pl_intercept_db},
        {"pl_slope_db", c.channel.pl_slope_db},
        {"noise_density_dbm_hz", c.channel.noise_density_dbm_hz.value},
        {"rb_bandwidth_hz", c.channel.rb_bandwidth_hz},
    };
    j["num_mbs"] = c.num_mbs;
    j["rbs_per_mbs"] = c.rbs_per_mbs;
    j["unit_fading"] = c.unit_fading;
    return j;
}

ScenarioConfig config_from_json(const nlohmann::json& j) {
    ScenarioConfig c;
    c.num_pbs = j.at("num_pbs").get<int>();
    c.rbs_per_pbs = j.at("rbs_per_pbs").get<int>();
    c.num_users = j.at("num_users").get<int>();
    c.num_normal = j.at("num_normal").get<int>();
    c.distance_min_m = j.at("distance_min_m").get<double>();
    c.distance_max_m = j.at("distance_max_m").get<double>();
    c.tx_per_rb.value = j.at("tx_per_rb_dbm").get<double>();
    c.max_power_per_connection.value =
        j.at("max_power_per_connection_dbm").get<double>();
    const auto& ch = j.at("channel");
    c.channel.pl_intercept_db = ch.at("pl_intercept_db").get<double>();
    c.channel.pl_slope_db = ch.at("pl_slope_db").get<double>();
    c.channel.noise_density_dbm_hz.value =
        ch.at("noise_density_dbm_hz").get<double>();
    c.channel.rb_bandwidth_hz = ch.at("rb_bandwidth_hz").get<double>();
    if (j.contains("num_mbs")) c.num_mbs = j.at("num_mbs").get<int>();
    if (j.contains("rbs_per_mbs"))
        c.rbs_per_mbs = j.at("rbs_per_mbs").get<int>();
    if (j.contains("unit_fading"))
        c.unit_fading = j.at("unit_fading").get<bool>();
    return c;
}

} // namespace

std::string scenario_config_to_json(const ScenarioConfig& config) {
    return config_to_json(config).dump(2);
}

ScenarioConfig scenario_config_from_json(const std::string& text) {
    try {
        return config_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("scenario config JSON: ") +
                                    e.what());
    }
}

std::string scenario_to_json(const Scenario& scenario) {
    const auto& c = scenario.config;
    nlohmann::ordered_json j;
    j["config"] = config_to_json(c);
    j["seed"] = scenario.seed;
    j["op_flags"] = scenario.op_flags;
    j["sigma_mw"] = scenario.sigma_mw;
    nlohmann::ordered_json omega = nlohmann::ordered_json::array();
    for (int k = 0; k < c.num_users; ++k) {
        nlohmann::ordered_json per_pbs = nlohmann::ordered_json::array();
        for (int b = 0; b < c.num_pbs; ++b) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (int n = 0; n < c.rbs_per_pbs; ++n) {
                row.push_back(scenario.omega(k, b, n));
            }
            per_pbs.push_back(std::move(row));
        }
        omega.push_back(std::move(per_pbs));
    }
    j["omega_mw"] = std::move(omega);
    return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("scenario JSON: ") + e.what());
    }
    Scenario sc;
    try {
        sc.config = config_from_json(j.at("config"));
        sc.seed = j.at("seed").get<std::uint64_t>();
        sc.op_flags = j.at("op_flags").get<std::vector<bool>>();
        sc.sigma_mw = j.at("sigma_mw").get<double>();
        const auto& omega = j.at("omega_mw");
        const auto& c = sc.config;
        if (static_cast<int>(sc.op_flags.size()) != c.num_users) {
            throw std::invalid_argument("scenario JSON: op_flags size != K");
        }
        if (static_cast<int>(omega.size()) != c.num_users) {
            throw std::invalid_argument("scenario JSON: omega size != K");
        }
        sc.omega_mw.resize(static_cast<std::size_t>(c.num_users) *
                           c.num_slots());
        for (int k = 0; k < c.num_users; ++k) {
            const auto& per_pbs = omega.at(k);
            if (static_cast<int>(per_pbs.size()) != c.num_pbs) {
                throw std::invalid_argument(
                    "scenario JSON: omega[k] size != B");
            }
            for (int b = 0; b < c.num_pbs; ++b) {
                const auto& row = per_pbs.at(b);
                if (static_cast<int>(row.size()) != c.rbs_per_pbs) {
                    throw std::invalid_argument(
                        "scenario JSON: omega[k][b] size != N");
                }
                for (int n = 0; n < c.rbs_per_pbs; ++n) {
                    double v = row.at(n).get<double>();
                    if (!(v > 0.0)) {
                        throw std::invalid_argument(
                            "scenario JSON: omega entries must be > 0");
                    }
                    sc.omega_mw[(static_cast<std::size_t>(k) * c.num_pbs + b) *
                                    c.rbs_per_pbs +
                                n] = v;
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("scenario JSON: ") + e.what());
    }
    if (!(sc.sigma_mw > 0.0)) {
        throw std::invalid_argument("scenario JSON: sigma_mw must be > 0");
    }
    return sc;
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    out << scenario_to_json(scenario) << '\n';
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open scenario: " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

} // namespace hetsched
