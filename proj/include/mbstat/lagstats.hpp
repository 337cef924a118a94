#pragma once

// Lagged second moments, value/volume/price autocorrelations, the closed
// forms for B_p when one of B_C, B_U vanishes, correlation-scale detection
// and n-point moments.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mbstat/error.hpp"
#include "mbstat/moments.hpp"
#include "mbstat/numeric.hpp"
#include "mbstat/parallel.hpp"
#include "mbstat/tape.hpp"
#include "mbstat/windows.hpp"

namespace mbstat {

/// Pairs (r(t_i), r(t_i + lag)) for window members t_i whose partner tick is on
/// the tape. Partners may lie outside the window.
struct LagPairSet {
  Tick center_tick = 0;
  Tick lag_ticks = 0;
  std::vector<std::pair<TradeRecord, TradeRecord>> pairs;

  std::size_t pair_count() const noexcept { return pairs.size(); }
};

inline LagPairSet lag_pairs(const Window& window, const TradeTape& tape, Tick lag_ticks) {
  if (lag_ticks < 0) throw std::invalid_argument("lag must be nonnegative");
  LagPairSet set;
  set.center_tick = window.center;
  set.lag_ticks = lag_ticks;
  const auto recs = tape.records();
  std::size_t partner = window.first;
  for (std::size_t j = window.first; j < window.first + window.count; ++j) {
    const Tick target = recs[j].tick + lag_ticks;
    while (partner < recs.size() && recs[partner].tick < target) ++partner;
    if (partner < recs.size() && recs[partner].tick == target) {
      set.pairs.emplace_back(recs[j], recs[partner]);
    }
  }
  return set;
}

/// Window sums over surviving pairs, kept unrounded.
struct LagSums {
  DoubleDouble cc, uu;  // sum C(t_i) C(t_i+tau), sum U(t_i) U(t_i+tau)
  DoubleDouble c0, c1;  // sum C(t_i), sum C(t_i+tau)
  DoubleDouble u0, u1;
  std::size_t count = 0;
};

/// Plug-in statistics for one (window, lag): the lagged second moments and
/// the first moments at both ends, all averaged over the surviving pairs,
/// and the three autocorrelations built from them.
struct LagStatistics {
  double lag2_value = 0.0;     // C(t, t+tau)
  double lag2_volume = 0.0;    // U(t, t+tau)
  double lag2_price = 0.0;     // p(t, t+tau)
  double value_now = 0.0;      // C(t;1)
  double value_lagged = 0.0;   // C(t+tau;1)
  double volume_now = 0.0;     // U(t;1)
  double volume_lagged = 0.0;  // U(t+tau;1)
  double b_value = 0.0;
  double b_volume = 0.0;
  double b_price = 0.0;
  std::size_t pair_count = 0;
};

/// B_p = C(t,t+tau)/U(t,t+tau) - C(t;1)C(t+tau;1) / (U(t;1)U(t+tau;1)) on plain
/// doubles, for callers holding already-rounded statistics.
inline double price_autocorrelation(double lag2_value, double lag2_volume, double value_now,
                                    double value_lagged, double volume_now, double volume_lagged) noexcept {
  return lag2_value / lag2_volume - (value_now * value_lagged) / (volume_now * volume_lagged);
}

/// Differences of nearly equal moments are taken in double-double so that
/// autocorrelations near zero keep their relative accuracy.
inline LagStatistics evaluate(const LagSums& sums) {
  if (sums.count == 0) throw NoDataError("no surviving lag pairs");
  const DoubleDouble k{static_cast<double>(sums.count), 0.0};
  const DoubleDouble cc = sums.cc / k, uu = sums.uu / k;
  const DoubleDouble c0 = sums.c0 / k, c1 = sums.c1 / k;
  const DoubleDouble u0 = sums.u0 / k, u1 = sums.u1 / k;
  LagStatistics s;
  s.lag2_value = cc.value();
  s.lag2_volume = uu.value();
  s.lag2_price = (cc / uu).value();
  s.value_now = c0.value();
  s.value_lagged = c1.value();
  s.volume_now = u0.value();
  s.volume_lagged = u1.value();
  s.b_value = (cc - c0 * c1).value();
  s.b_volume = (uu - u0 * u1).value();
  s.b_price = detail::price_covariance(sums.cc, sums.uu, sums.c0, sums.c1, sums.u0, sums.u1);
  s.pair_count = sums.count;
  return s;
}

inline LagStatistics lag_statistics(const LagPairSet& set) {
  CompensatedSum cc, uu, c0, c1, u0, u1;
  for (const auto& [a, b] : set.pairs) {
    cc.add_product(a.value, b.value);
    uu.add_product(a.volume, b.volume);
    c0.add(a.value);
    c1.add(b.value);
    u0.add(a.volume);
    u1.add(b.volume);
  }
  return evaluate({cc.exact(), uu.exact(), c0.exact(), c1.exact(), u0.exact(), u1.exact(), set.pairs.size()});
}

inline double lag_moment2(const LagPairSet& set, Series series) {
  if (series == Series::price) throw std::invalid_argument("lag_moment2 is defined for value or volume");
  const LagStatistics s = lag_statistics(set);
  return series == Series::value ? s.lag2_value : s.lag2_volume;
}

/// p(t, t+tau) = C(t,t+tau) / U(t,t+tau).
inline double market_price_lag_moment(const LagPairSet& set) { return lag_statistics(set).lag2_price; }

inline double acf(const LagPairSet& set, Series series) {
  const LagStatistics s = lag_statistics(set);
  switch (series) {
    case Series::value: return s.b_value;
    case Series::volume: return s.b_volume;
    case Series::price: return s.b_price;
  }
  return 0.0;
}

enum class Regime { volume_dominated, value_dominated };

/// Closed forms for B_p. volume_dominated takes b_other = B_U and holds where
/// B_C = 0; value_dominated takes b_other = B_C and holds where B_U = 0.
inline double regime_acf(Regime kind, double b_other, double lag2_volume, double value_now, double value_lagged,
                         double volume_now, double volume_lagged) {
  const double uu = volume_now * volume_lagged;
  if (uu == 0.0) throw DomainError("zero first volume moment");
  if (kind == Regime::volume_dominated) {
    if (lag2_volume == 0.0) throw DomainError("zero lagged volume moment");
    return -(b_other / lag2_volume) * (value_now * value_lagged) / uu;
  }
  return b_other / uu;
}

/// Smallest lag at which |B| <= threshold * |B(0)|. B(0) == 0 yields lags[0].
/// NaN entries (lags without data) are skipped.
inline std::optional<Tick> correlation_scale(std::span<const Tick> lags, std::span<const double> b,
                                             double threshold_fraction) {
  if (lags.empty() || lags.size() != b.size()) throw std::invalid_argument("curve must be nonempty and aligned");
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    throw std::invalid_argument("threshold fraction must lie in (0, 1)");
  }
  if (std::isnan(b[0])) return std::nullopt;
  if (b[0] == 0.0) return lags[0];
  const double limit = threshold_fraction * std::fabs(b[0]);
  for (std::size_t m = 0; m < b.size(); ++m) {
    if (!std::isnan(b[m]) && std::fabs(b[m]) <= limit) return lags[m];
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Curves

enum class Aggregate { per_center, mean };

struct AcfPoint {
  Tick lag_ticks = 0;
  double b_value = std::numeric_limits<double>::quiet_NaN();
  double b_volume = std::numeric_limits<double>::quiet_NaN();
  double b_price = std::numeric_limits<double>::quiet_NaN();
  double lag2_value = std::numeric_limits<double>::quiet_NaN();
  double lag2_volume = std::numeric_limits<double>::quiet_NaN();
  double lag2_price = std::numeric_limits<double>::quiet_NaN();
  std::size_t pair_count = 0;
  std::size_t center_count = 0;  // centers contributing; 1 or 0 in per-center mode

  bool has_data() const noexcept { return pair_count > 0; }
};

struct CorrelationScales {
  std::optional<Tick> value;
  std::optional<Tick> volume;
  std::optional<Tick> price;
};

struct CenterCurve {
  std::optional<Tick> center_tick;  // empty for the mean-over-centers curve
  std::vector<AcfPoint> points;
  CorrelationScales scales;
};

struct AcfOptions {
  Tick max_lag = 0;  // multiple of the lag step
  Aggregate aggregate = Aggregate::per_center;
  double threshold = 0.05;
  unsigned threads = 1;
};

struct AcfCurve {
  WindowSpec spec;
  AcfOptions options;
  std::vector<CenterCurve> curves;
  std::size_t windows_planned = 0;
  std::vector<Tick> invalid_centers;  // below min_trades, skipped
};

inline CorrelationScales detect_scales(const std::vector<AcfPoint>& points, double threshold) {
  std::vector<Tick> lags;
  std::vector<double> bc, bu, bp;
  for (const auto& p : points) {
    lags.push_back(p.lag_ticks);
    bc.push_back(p.b_value);
    bu.push_back(p.b_volume);
    bp.push_back(p.b_price);
  }
  return {correlation_scale(lags, bc, threshold), correlation_scale(lags, bu, threshold),
          correlation_scale(lags, bp, threshold)};
}

namespace detail {

/// Prefix sums over tape records of every quantity the lag statistics need,
/// masked to records whose partner at +lag exists.
struct LagPrefix {
  std::vector<CompensatedSum> cc, uu, c0, c1, u0, u1;
  std::vector<std::size_t> count;

  LagPrefix(const TradeTape& tape, Tick lag) {
    const auto recs = tape.records();
    const std::size_t n = recs.size();
    for (auto* v : {&cc, &uu, &c0, &c1, &u0, &u1}) v->resize(n + 1);
    count.assign(n + 1, 0);
    CompensatedSum scc, suu, sc0, sc1, su0, su1;
    std::size_t partner = 0, k = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const Tick target = recs[j].tick + lag;
      while (partner < n && recs[partner].tick < target) ++partner;
      if (partner < n && recs[partner].tick == target) {
        const auto& a = recs[j];
        const auto& b = recs[partner];
        scc.add_product(a.value, b.value);
        suu.add_product(a.volume, b.volume);
        sc0.add(a.value);
        sc1.add(b.value);
        su0.add(a.volume);
        su1.add(b.volume);
        ++k;
      }
      cc[j + 1] = scc;
      uu[j + 1] = suu;
      c0[j + 1] = sc0;
      c1[j + 1] = sc1;
      u0[j + 1] = su0;
      u1[j + 1] = su1;
      count[j + 1] = k;
    }
  }

  AcfPoint point(const Window& w, Tick lag) const {
    AcfPoint p;
    p.lag_ticks = lag;
    const std::size_t lo = w.first, hi = w.first + w.count;
    const std::size_t k = count[hi] - count[lo];
    if (k == 0) return p;
    const LagStatistics s = evaluate({prefix_difference(cc[hi], cc[lo]), prefix_difference(uu[hi], uu[lo]),
                                      prefix_difference(c0[hi], c0[lo]), prefix_difference(c1[hi], c1[lo]),
                                      prefix_difference(u0[hi], u0[lo]), prefix_difference(u1[hi], u1[lo]), k});
    p.b_value = s.b_value;
    p.b_volume = s.b_volume;
    p.b_price = s.b_price;
    p.lag2_value = s.lag2_value;
    p.lag2_volume = s.lag2_volume;
    p.lag2_price = s.lag2_price;
    p.pair_count = k;
    p.center_count = 1;
    return p;
  }
};

inline AcfPoint pair_weighted_mean(const std::vector<AcfPoint>& per_center, Tick lag) {
  AcfPoint out;
  out.lag_ticks = lag;
  CompensatedSum bc, bu, bp, c2, u2, p2;
  std::size_t pairs = 0, centers = 0;
  for (const auto& p : per_center) {
    if (!p.has_data()) continue;
    const double w = static_cast<double>(p.pair_count);
    bc.add(w * p.b_value);
    bu.add(w * p.b_volume);
    bp.add(w * p.b_price);
    c2.add(w * p.lag2_value);
    u2.add(w * p.lag2_volume);
    p2.add(w * p.lag2_price);
    pairs += p.pair_count;
    ++centers;
  }
  if (pairs == 0) return out;
  const double total = static_cast<double>(pairs);
  out.b_value = bc.value() / total;
  out.b_volume = bu.value() / total;
  out.b_price = bp.value() / total;
  out.lag2_value = c2.value() / total;
  out.lag2_volume = u2.value() / total;
  out.lag2_price = p2.value() / total;
  out.pair_count = pairs;
  out.center_count = centers;
  return out;
}

}  // namespace detail

/// Autocorrelation curve at lags 0, l, 2l, ..., max_lag for every valid window.
/// Per-lag work runs on `options.threads` workers; results are identical for
/// any thread count.
inline AcfCurve acf_curve(const TradeTape& tape, const WindowSpec& spec, const AcfOptions& options) {
  spec.validate();
  if (options.max_lag < 0 || options.max_lag % spec.lag_step != 0) {
    throw std::invalid_argument("max lag must be a nonnegative multiple of the lag step");
  }
  if (!(options.threshold > 0.0 && options.threshold < 1.0)) {
    throw std::invalid_argument("threshold must lie in (0, 1)");
  }

  AcfCurve curve;
  curve.spec = spec;
  curve.options = options;
  const auto planned = plan_windows(tape, spec);
  curve.windows_planned = planned.size();
  std::vector<Window> windows;
  for (const auto& w : planned) {
    if (w.valid) {
      windows.push_back(w);
    } else {
      curve.invalid_centers.push_back(w.center);
    }
  }
  if (windows.empty()) throw NoDataError("no valid windows");

  const std::size_t nlags = static_cast<std::size_t>(options.max_lag / spec.lag_step) + 1;
  // by_lag[m][w]: point for lag m * l at window w.
  std::vector<std::vector<AcfPoint>> by_lag(nlags);
  std::vector<AcfPoint> means(nlags);
  const bool mean_mode = options.aggregate == Aggregate::mean;

  parallel_for(nlags, options.threads, [&](std::size_t m) {
    const Tick lag = static_cast<Tick>(m) * spec.lag_step;
    const detail::LagPrefix prefix(tape, lag);
    std::vector<AcfPoint> row;
    row.reserve(windows.size());
    for (const auto& w : windows) row.push_back(prefix.point(w, lag));
    if (mean_mode) {
      means[m] = detail::pair_weighted_mean(row, lag);
    } else {
      by_lag[m] = std::move(row);
    }
  });

  if (mean_mode) {
    CenterCurve c;
    c.points = std::move(means);
    c.scales = detect_scales(c.points, options.threshold);
    curve.curves.push_back(std::move(c));
  } else {
    curve.curves.reserve(windows.size());
    for (std::size_t w = 0; w < windows.size(); ++w) {
      CenterCurve c;
      c.center_tick = windows[w].center;
      c.points.reserve(nlags);
      for (std::size_t m = 0; m < nlags; ++m) c.points.push_back(by_lag[m][w]);
      c.scales = detect_scales(c.points, options.threshold);
      curve.curves.push_back(std::move(c));
    }
  }
  return curve;
}

// ---------------------------------------------------------------------------
// n-point moments

/// Maximum number of positive lags accepted by the n-point moments.
inline constexpr std::size_t kMaxNpointLags = 4;

/// Mean over members t_i of prod_k series(t_i + tau_k), tau_0 = 0, taken over
/// members whose every partner tick is on the tape.
inline double npoint_moment(const Window& window, const TradeTape& tape, Series series,
                            std::span<const Tick> lags) {
  if (series == Series::price) throw std::invalid_argument("npoint_moment is defined for value or volume");
  if (lags.size() > kMaxNpointLags) throw DomainError("at most 4 lags are supported");
  for (std::size_t k = 0; k < lags.size(); ++k) {
    if (lags[k] <= 0 || (k > 0 && lags[k] <= lags[k - 1])) {
      throw std::invalid_argument("lags must be positive and strictly ascending");
    }
  }
  CompensatedSum sum;
  std::size_t survivors = 0;
  for (const auto& r : members(window, tape)) {
    double product = series_of(r, series);
    bool complete = true;
    for (const Tick lag : lags) {
      const TradeRecord* partner = tape.find(r.tick + lag);
      if (partner == nullptr) {
        complete = false;
        break;
      }
      product *= series_of(*partner, series);
    }
    if (complete) {
      sum.add(product);
      ++survivors;
    }
  }
  if (survivors == 0) throw NoDataError("no surviving tuples");
  return sum.value() / static_cast<double>(survivors);
}

/// p(t, t+tau_1, ..., t+tau_n) as the ratio of the value and volume n-point moments.
inline double market_price_npoint(const Window& window, const TradeTape& tape, std::span<const Tick> lags) {
  return npoint_moment(window, tape, Series::value, lags) / npoint_moment(window, tape, Series::volume, lags);
}

}  // namespace mbstat
