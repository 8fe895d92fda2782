#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hetsched/channel.hpp"

namespace hetsched {

// Network dimensions and radio parameters for one pico-tier instance. The
// macro tier appears only as bookkeeping (num_mbs, rbs_per_mbs): spectrum
// partitioning keeps its RBs disjoint from the pico tier, so it never
// enters the optimization.
struct ScenarioConfig {
    int num_pbs = 2;          // B
    int rbs_per_pbs = 5;      // N
    int num_users = 10;       // K
    int num_normal = 7;       // NU; users NU..K-1 are the outpatients
    double distance_min_m = 40.0;
    double distance_max_m = 100.0;
    PowerDbm tx_per_rb{17.0};
    PowerDbm max_power_per_connection{23.0};
    ChannelParams channel;
    int num_mbs = 1;
    int rbs_per_mbs = 10;
    bool unit_fading = false;  // diagnostic: force every fading gain to 1

    int num_slots() const { return num_pbs * rbs_per_pbs; }
    int num_outpatients() const { return num_users - num_normal; }
};

// Throws std::invalid_argument when dimensions or ranges are unusable
// (fewer slots than users, empty distance range, NU >= K, ...).
void validate(const ScenarioConfig& config);

// One randomized network instance: the received-power tensor Omega in mW
// for every (user, PBS, RB) triple plus the common per-RB noise power.
// A slot is one (PBS b, RB n) pair, indexed b * N + n.
struct Scenario {
    ScenarioConfig config;
    std::uint64_t seed = 0;
    std::vector<bool> op_flags;    // size K, true for outpatients
    double sigma_mw = 0.0;
    std::vector<double> omega_mw;  // [(k * B + b) * N + n]

    double omega(int k, int b, int n) const {
        return omega_mw[(static_cast<std::size_t>(k) * config.num_pbs + b) *
                            config.rbs_per_pbs +
                        n];
    }
    double omega_slot(int k, int slot) const {
        return omega_mw[static_cast<std::size_t>(k) * config.num_slots() +
                        slot];
    }
};

// Deterministic instance generation: per (user, PBS) pair one distance
// drawn uniformly from the configured range, then per RB one Rayleigh
// power gain. The same (config, seed) pair reproduces omega bit-exactly.
Scenario generate(const ScenarioConfig& config, std::uint64_t seed);

// How many RBs one user may hold under the per-connection power cap when
// each RB costs tx_per_rb: floor of the linear power ratio.
int max_rbs_per_user(const ScenarioConfig& config);

// JSON round-trip. Doubles are encoded in shortest round-trip decimal
// form, so save/load reproduces the scenario bit-exactly.
std::string scenario_config_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_config_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);
void save_scenario(const Scenario& scenario, const std::string& path);
Scenario load_scenario(const std::string& path);

} // namespace hetsched
