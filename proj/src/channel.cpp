#include "hetsched/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "hetsched/rng.hpp"

namespace hetsched {

PowerMw dbm_to_mw(PowerDbm x) {
    return PowerMw{std::pow(10.0, x.value / 10.0)};
}

PowerDbm mw_to_dbm(PowerMw p) {
    if (!(p.value > 0.0)) {
        throw std::domain_error("mw_to_dbm: power must be > 0 mW");
    }
    return PowerDbm{10.0 * std::log10(p.value)};
}

double path_loss_db(const ChannelParams& params, double distance_m) {
    if (!(distance_m > 0.0)) {
        throw std::domain_error("path_loss_db: distance must be > 0 m");
    }
    return params.pl_intercept_db +
           params.pl_slope_db * std::log10(distance_m / 1000.0);
}

PowerMw noise_power_mw(const ChannelParams& params) {
    PowerDbm total{params.noise_density_dbm_hz.value +
                   10.0 * std::log10(params.rb_bandwidth_hz)};
    return dbm_to_mw(total);
}

double rayleigh_power_gain(std::mt19937_64& rng) {
    // Inverse CDF of the unit-mean exponential; uniform_unit never returns
    // 0 or 1, so the gain is finite and strictly positive.
    return -std::log(uniform_unit(rng));
}

PowerMw received_power_mw(const ChannelParams& params, PowerDbm tx,
                          double distance_m, double gain) {
    if (!(gain > 0.0)) {
        throw std::domain_error("received_power_mw: gain must be > 0");
    }
    double loss = path_loss_db(params, distance_m);
    return PowerMw{dbm_to_mw(PowerDbm{tx.value - loss}).value * gain};
}

} // namespace hetsched
