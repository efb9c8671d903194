#pragma once

#include <optional>

#include "semeq/linalg.hpp"
#include "semeq/rng.hpp"

namespace semeq {

/// Additive white Gaussian noise channel over the 2-D semantic space.
/// SNR convention: total symbol power E||x||^2 over total noise power 2*sigma^2.
struct ChannelConfig {
  std::optional<double> snr_db;  // nullopt = noiseless
  double sigma = 0.0;            // per-component noise standard deviation

  static ChannelConfig noiseless() { return {std::nullopt, 0.0}; }
  static ChannelConfig from_snr(double snr_db, double avg_power);
  bool is_noiseless() const { return sigma == 0.0; }
};

/// sigma = sqrt(avg_power / (2 * 10^(snr_db/10))). avg_power is the mean
/// squared symbol norm under the transmitting language's observation
/// distribution. Throws on avg_power <= 0.
double calibrate_sigma(double avg_power, double snr_db);

/// symbol + n with n ~ N(0, sigma^2 I_2), independent per call.
Vec2 transmit(const Vec2& symbol, const ChannelConfig& cfg, Rng& rng);

}  // namespace semeq
