#pragma once

// Deterministic synthetic tapes built from two independent exponentiated
// AR(1) log-level processes.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mbstat/tape.hpp"

namespace mbstat {

/// SplitMix64, used only to expand a 64-bit seed into generator state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman & Vigna), seeded through SplitMix64.
class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via the Box-Muller transform; the sine branch is cached.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class SynthMode {
  price_volume,  // a = log price, b = log volume; value = price * volume
  value_volume,  // a = log value, b = log volume
};

struct SynthParams {
  SynthMode mode = SynthMode::price_volume;
  std::int64_t length_ticks = 1000;
  double persistence_a = 10.0;  // e-folding scale in ticks
  double persistence_b = 40.0;
  double sigma_a = 0.1;  // stationary std-dev of the log process
  double sigma_b = 0.1;
  double mean_a = 0.0;
  double mean_b = 0.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (length_ticks < 2) throw std::invalid_argument("synthetic length must be >= 2");
    if (!(persistence_a > 0.0) || !(persistence_b > 0.0)) throw std::invalid_argument("persistence must be positive");
    if (!(sigma_a >= 0.0) || !(sigma_b >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
    if (!std::isfinite(mean_a) || !std::isfinite(mean_b)) throw std::invalid_argument("means must be finite");
  }
};

/// Stationary AR(1) in log space, started from its stationary law.
class LogAr1 {
 public:
  LogAr1(double persistence, double sigma, double mean)
      : phi_(std::exp(-1.0 / persistence)),
        innovation_(sigma * std::sqrt(1.0 - phi_ * phi_)),
        sigma_(sigma),
        mean_(mean) {}

  double start(Xoshiro256ss& rng) { return x_ = mean_ + sigma_ * rng.normal(); }

  double step(Xoshiro256ss& rng) { return x_ = mean_ + phi_ * (x_ - mean_) + innovation_ * rng.normal(); }

 private:
  double phi_;
  double innovation_;
  double sigma_;
  double mean_;
  double x_ = 0.0;
};

/// Dense tape on ticks 0..length-1 with epsilon = 1. Same params => same bits.
inline TradeTape gen_tape(const SynthParams& params) {
  params.validate();
  Xoshiro256ss rng(params.seed);
  LogAr1 a(params.persistence_a, params.sigma_a, params.mean_a);
  LogAr1 b(params.persistence_b, params.sigma_b, params.mean_b);

  std::vector<TradeRecord> records;
  records.reserve(static_cast<std::size_t>(params.length_ticks));
  for (std::int64_t i = 0; i < params.length_ticks; ++i) {
    const double xa = i == 0 ? a.start(rng) : a.step(rng);
    const double xb = i == 0 ? b.start(rng) : b.step(rng);
    const double level_a = std::exp(xa);
    const double volume = std::exp(xb);
    const double value = params.mode == SynthMode::price_volume ? level_a * volume : level_a;
    records.push_back({i, value, volume});
  }
  return TradeTape(1.0, std::move(records));
}

/// Autocovariance of the stationary log-level AR(1): sigma^2 exp(-lag / persistence).
inline double theoretical_log_acf(double persistence_ticks, double sigma, Tick lag_ticks) {
  return sigma * sigma * std::exp(-static_cast<double>(lag_ticks) / persistence_ticks);
}

}  // namespace mbstat
