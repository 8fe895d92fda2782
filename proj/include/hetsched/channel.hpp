#pragma once

#include <random>

namespace hetsched {

// Strong types for the two power scales in play. All SINR arithmetic runs
// in linear milliwatts; dBm appears only at I/O boundaries.
struct PowerDbm {
    double value = 0.0;
};

struct PowerMw {
    double value = 0.0;
};

// Radio constants for the pico tier. The path loss model is
// intercept + slope * log10(d_km); the defaults are a standard urban
// pico-cell parameterization and both numbers are configuration, not
// physics baked into the code.
struct ChannelParams {
    double pl_intercept_db = 140.7;      // path loss at 1 km
    double pl_slope_db = 36.7;           // dB per decade of distance
    PowerDbm noise_density_dbm_hz{-162.0};
    double rb_bandwidth_hz = 180e3;      // one LTE resource block
};

PowerMw dbm_to_mw(PowerDbm x);

// Inverse of dbm_to_mw. Throws std::domain_error for p <= 0.
PowerDbm mw_to_dbm(PowerMw p);

// Throws std::domain_error for distance <= 0.
double path_loss_db(const ChannelParams& params, double distance_m);

// Thermal noise over one resource block, sigma in the SINR denominator.
// Identical for every (user, RB, PBS) triple.
PowerMw noise_power_mw(const ChannelParams& params);

// One power gain draw for a Rayleigh amplitude channel: unit-mean
// exponential, strictly positive.
double rayleigh_power_gain(std::mt19937_64& rng);

// Linear received power: tx attenuated by path loss, scaled by the fading
// power gain.
PowerMw received_power_mw(const ChannelParams& params, PowerDbm tx,
                          double distance_m, double gain);

} // namespace hetsched
