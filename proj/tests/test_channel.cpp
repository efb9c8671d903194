#include <doctest.h>

#include <cmath>
#include <limits>

#include "semeq/channel.hpp"
#include "semeq/errors.hpp"

using namespace semeq;

TEST_CASE("sigma calibration") {
  CHECK(calibrate_sigma(2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(calibrate_sigma(2.0, std::numeric_limits<double>::infinity()) == 0.0);
  CHECK(calibrate_sigma(8.0, 6.0206) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK_THROWS_AS(calibrate_sigma(0.0, 10.0), Error);
  CHECK_THROWS_AS(calibrate_sigma(-1.0, 10.0), Error);

  SUBCASE("monotone in snr") {
    double prev = calibrate_sigma(3.0, -20.0);
    for (double snr = -15.0; snr <= 30.0; snr += 5.0) {
      const double s = calibrate_sigma(3.0, snr);
      CHECK(s < prev);
      prev = s;
    }
  }
}

TEST_CASE("noiseless channel is the identity") {
  Rng rng(1);
  const ChannelConfig cfg = ChannelConfig::noiseless();
  const Vec2 x{1.25, -3.5};
  const Vec2 y = transmit(x, cfg, rng);
  CHECK(y.x == x.x);
  CHECK(y.y == x.y);
  CHECK_THROWS_AS(
      transmit({std::numeric_limits<double>::quiet_NaN(), 0.0}, cfg, rng), Error);
}

TEST_CASE("noise moments at sigma=1") {
  Rng rng(99);
  const ChannelConfig cfg{0.0, 1.0};
  const int n = 1000000;
  double sum_x = 0.0, sum_y = 0.0, sum_xx = 0.0, sum_yy = 0.0, sum_xy = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 v = transmit({0.0, 0.0}, cfg, rng);
    sum_x += v.x;
    sum_y += v.y;
    sum_xx += v.x * v.x;
    sum_yy += v.y * v.y;
    sum_xy += v.x * v.y;
  }
  const double mean_x = sum_x / n;
  const double mean_y = sum_y / n;
  CHECK(std::abs(mean_x) < 0.004);
  CHECK(std::abs(mean_y) < 0.004);
  const double var_x = sum_xx / n - mean_x * mean_x;
  const double var_y = sum_yy / n - mean_y * mean_y;
  CHECK(var_x > 0.995);
  CHECK(var_x < 1.005);
  CHECK(var_y > 0.995);
  CHECK(var_y < 1.005);
  // cross-correlation within 3 sigma Monte-Carlo bounds (sd ~ 1/sqrt(n))
  const double corr = sum_xy / n - mean_x * mean_y;
  CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("empirical snr matches the configured one within 0.1 dB") {
  for (const double snr_db : {0.0, 10.0, 20.0}) {
    const double power = 3.7;
    const ChannelConfig cfg = ChannelConfig::from_snr(snr_db, power);
    Rng rng(4242 + static_cast<std::uint64_t>(snr_db));
    const Vec2 x{std::sqrt(power / 2.0), -std::sqrt(power / 2.0)};
    const int n = 1000000;
    double noise_power = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec2 y = transmit(x, cfg, rng);
      noise_power += (y - x).norm2();
    }
    noise_power /= n;
    const double empirical = 10.0 * std::log10(power / noise_power);
    CHECK(std::abs(empirical - snr_db) < 0.1);
  }
}
