#include "semeq/channel.hpp"

#include <cmath>
#include <string>

#include "semeq/errors.hpp"

namespace semeq {

double calibrate_sigma(double avg_power, double snr_db) {
  if (!(avg_power > 0.0) || !std::isfinite(avg_power)) {
    throw Error("channel calibration needs positive symbol power, got " +
                std::to_string(avg_power));
  }
  if (std::isinf(snr_db) && snr_db > 0.0) return 0.0;
  return std::sqrt(avg_power / (2.0 * std::pow(10.0, snr_db / 10.0)));
}

ChannelConfig ChannelConfig::from_snr(double snr_db, double avg_power) {
  return {snr_db, calibrate_sigma(avg_power, snr_db)};
}

Vec2 transmit(const Vec2& symbol, const ChannelConfig& cfg, Rng& rng) {
  if (!symbol.finite()) {
    throw Error("cannot transmit non-finite symbol");
  }
  if (cfg.is_noiseless()) return symbol;
  const auto [n0, n1] = rng.gaussian_pair();
  return {symbol.x + cfg.sigma * n0, symbol.y + cfg.sigma * n1};
}

}  // namespace semeq
