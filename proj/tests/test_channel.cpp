#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hetsched/channel.hpp"

using namespace hetsched;

TEST_CASE("dbm to mw conversion") {
    CHECK(dbm_to_mw(PowerDbm{0.0}).value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(dbm_to_mw(PowerDbm{23.0}).value ==
          doctest::Approx(199.52623149688787).epsilon(1e-15));
    CHECK(dbm_to_mw(PowerDbm{17.0}).value ==
          doctest::Approx(50.11872336272722).epsilon(1e-15));
}

TEST_CASE("mw to dbm conversion") {
    CHECK(mw_to_dbm(PowerMw{1.0}).value == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(mw_to_dbm(PowerMw{100.0}).value ==
          doctest::Approx(20.0).epsilon(1e-15));
    CHECK(mw_to_dbm(PowerMw{50.11872336272722}).value ==
          doctest::Approx(17.0).epsilon(1e-12));
    CHECK_THROWS_AS(mw_to_dbm(PowerMw{0.0}), std::domain_error);
    CHECK_THROWS_AS(mw_to_dbm(PowerMw{-1.0}), std::domain_error);
}

TEST_CASE("dbm/mw round trip") {
    for (double p = 1e-15; p <= 1e6; p *= 10.0) {
        CHECK(dbm_to_mw(mw_to_dbm(PowerMw{p})).value ==
              doctest::Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("path loss") {
    ChannelParams params;
    CHECK(path_loss_db(params, 1000.0) ==
          doctest::Approx(140.7).epsilon(1e-15));
    CHECK(path_loss_db(params, 100.0) == doctest::Approx(104.0).epsilon(1e-12));
    CHECK(path_loss_db(params, 40.0) ==
          doctest::Approx(89.39560168173621).epsilon(1e-15));
    CHECK_THROWS_AS(path_loss_db(params, 0.0), std::domain_error);
    CHECK_THROWS_AS(path_loss_db(params, -5.0), std::domain_error);
}

TEST_CASE("path loss is monotone in distance") {
    ChannelParams params;
    double prev = path_loss_db(params, 1.0);
    for (double d = 2.0; d < 3000.0; d *= 1.7) {
        double cur = path_loss_db(params, d);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("noise power") {
    ChannelParams params;
    PowerMw sigma = noise_power_mw(params);
    CHECK(mw_to_dbm(sigma).value ==
          doctest::Approx(-109.44727494896694).epsilon(1e-13));
    CHECK(sigma.value ==
          doctest::Approx(1.1357232200643508e-11).epsilon(1e-13));
    CHECK(sigma.value > 0.0);

    ChannelParams one_hz = params;
    one_hz.rb_bandwidth_hz = 1.0;
    CHECK(noise_power_mw(one_hz).value ==
          doctest::Approx(std::pow(10.0, -16.2)).epsilon(1e-13));

    ChannelParams flat;
    flat.noise_density_dbm_hz = PowerDbm{0.0};
    flat.rb_bandwidth_hz = 10.0;
    CHECK(noise_power_mw(flat).value == doctest::Approx(10.0).epsilon(1e-13));
}

TEST_CASE("rayleigh power gain statistics") {
    std::mt19937_64 rng(12345);
    const int n = 1'000'000;
    double sum = 0.0;
    int below_ln2 = 0;
    for (int i = 0; i < n; ++i) {
        double g = rayleigh_power_gain(rng);
        REQUIRE(g > 0.0);
        sum += g;
        if (g <= std::numbers::ln2) ++below_ln2;
    }
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(static_cast<double>(below_ln2) / n ==
          doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("rayleigh power gain is deterministic per seed") {
    std::mt19937_64 a(99), b(99);
    for (int i = 0; i < 100; ++i) {
        CHECK(rayleigh_power_gain(a) == rayleigh_power_gain(b));
    }
}

TEST_CASE("received power") {
    ChannelParams params;
    CHECK(received_power_mw(params, PowerDbm{17.0}, 100.0, 1.0).value ==
          doctest::Approx(1.9952623149688828e-09).epsilon(1e-13));
    double full = received_power_mw(params, PowerDbm{17.0}, 60.0, 1.0).value;
    double half = received_power_mw(params, PowerDbm{17.0}, 60.0, 0.5).value;
    CHECK(half == doctest::Approx(full / 2.0).epsilon(1e-15));
    CHECK(received_power_mw(params, PowerDbm{-300.0}, 60.0, 1.0).value ==
          doctest::Approx(0.0).epsilon(1e-30));
    CHECK_THROWS_AS(received_power_mw(params, PowerDbm{17.0}, 0.0, 1.0),
                    std::domain_error);
}

TEST_CASE("received power decreases with distance") {
    ChannelParams params;
    double prev = received_power_mw(params, PowerDbm{17.0}, 10.0, 1.0).value;
    for (double d = 20.0; d < 500.0; d += 35.0) {
        double cur = received_power_mw(params, PowerDbm{17.0}, d, 1.0).value;
        CHECK(cur < prev);
        prev = cur;
    }
}
