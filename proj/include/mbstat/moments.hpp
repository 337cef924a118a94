#pragma once

// Per-window moments: frequency-based moments of value, volume and price,
// and the market-based price moments built as ratios of value and volume
// moments.

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "mbstat/error.hpp"
#include "mbstat/numeric.hpp"
#include "mbstat/tape.hpp"
#include "mbstat/windows.hpp"

namespace mbstat {

enum class Series { value, volume, price };

inline const char* to_string(Series s) noexcept {
  switch (s) {
    case Series::value: return "value";
    case Series::volume: return "volume";
    case Series::price: return "price";
  }
  return "?";
}

inline double series_of(const TradeRecord& r, Series s) noexcept {
  switch (s) {
    case Series::value: return r.value;
    case Series::volume: return r.volume;
    case Series::price: return r.price();
  }
  return 0.0;
}

/// Highest moment order accepted unless the caller raises it.
/// Powers of raw currency amounts above this overflow on real tapes.
inline constexpr int kDefaultMaxOrder = 8;

namespace detail {

inline void check_order(int n, int cap) {
  if (n < 1) throw DomainError("moment order must be >= 1");
  if (n > cap) throw DomainError("moment order " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
}

inline void check_nonempty(std::span<const TradeRecord> members) {
  if (members.empty()) throw NoDataError("window has no trades");
}

}  // namespace detail

/// Mean of the n-th powers of one per-trade series over the members.
inline double freq_moment(std::span<const TradeRecord> members, Series series, int n,
                          int max_order = kDefaultMaxOrder) {
  detail::check_order(n, max_order);
  detail::check_nonempty(members);
  CompensatedSum sum;
  for (const auto& r : members) sum.add(ipow(series_of(r, series), n));
  return sum.value() / static_cast<double>(members.size());
}

/// C(t;n) / U(t;n).
inline double market_price_moment(std::span<const TradeRecord> members, int n,
                                  int max_order = kDefaultMaxOrder) {
  return freq_moment(members, Series::value, n, max_order) /
         freq_moment(members, Series::volume, n, max_order);
}

/// Total value over total volume; same path as market_price_moment(1).
inline double vwap(std::span<const TradeRecord> members) { return market_price_moment(members, 1); }

namespace detail {

/// C2/U2 - (C/U)(C'/U') as one fraction over window sums (the pair count
/// cancels). Shared by the volatility and the lagged price autocorrelation
/// so that both agree at zero lag; a single trade gives exactly zero.
inline double price_covariance(DoubleDouble c2, DoubleDouble u2, DoubleDouble c_now, DoubleDouble c_lag,
                               DoubleDouble u_now, DoubleDouble u_lag) noexcept {
  const DoubleDouble uu = u_now * u_lag;
  return ((c2 * uu - (c_now * c_lag) * u2) / (u2 * uu)).value();
}

}  // namespace detail

/// p(t;2) - p(t;1)^2. Can be negative; never clamped.
inline double market_volatility(std::span<const TradeRecord> members) {
  detail::check_nonempty(members);
  CompensatedSum c1, u1, c2, u2;
  for (const auto& r : members) {
    c2.add_product(r.value, r.value);
    u2.add_product(r.volume, r.volume);
    c1.add(r.value);
    u1.add(r.volume);
  }
  const DoubleDouble c = c1.exact(), u = u1.exact();
  return detail::price_covariance(c2.exact(), u2.exact(), c, c, u, u);
}

/// Characteristic function truncated after order K:
/// 1 + sum_{n=1..K} (i^n / n!) p(t;n) x^n.
inline std::complex<double> char_fn_taylor(std::span<const TradeRecord> members, double x, int order,
                                           int max_order = kDefaultMaxOrder) {
  detail::check_order(order, max_order);
  detail::check_nonempty(members);
  static constexpr std::complex<double> kUnitPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  std::complex<double> result{1.0, 0.0};
  double coeff = 1.0;  // x^n / n!
  for (int n = 1; n <= order; ++n) {
    coeff *= x / static_cast<double>(n);
    result += kUnitPowers[n % 4] * (coeff * market_price_moment(members, n, max_order));
  }
  return result;
}

struct MomentReport {
  Tick center_tick = 0;
  std::size_t effective_count = 0;
  std::vector<double> freq_price;    // index k holds order k + 1
  std::vector<double> value;
  std::vector<double> volume;
  std::vector<double> market_price;
  double vwap = 0.0;
  double market_volatility = 0.0;

  bool volatility_negative() const noexcept { return market_volatility < 0.0; }
};

/// Moments of orders 1..max_order for one window.
inline MomentReport make_report(const Window& window, std::span<const TradeRecord> members, int max_order,
                                int order_cap = kDefaultMaxOrder) {
  detail::check_order(max_order, order_cap);
  detail::check_nonempty(members);
  MomentReport rep;
  rep.center_tick = window.center;
  rep.effective_count = members.size();
  for (int n = 1; n <= max_order; ++n) {
    rep.freq_price.push_back(freq_moment(members, Series::price, n, order_cap));
    rep.value.push_back(freq_moment(members, Series::value, n, order_cap));
    rep.volume.push_back(freq_moment(members, Series::volume, n, order_cap));
    rep.market_price.push_back(rep.value.back() / rep.volume.back());
  }
  rep.vwap = vwap(members);
  rep.market_volatility = market_volatility(members);
  return rep;
}

}  // namespace mbstat
