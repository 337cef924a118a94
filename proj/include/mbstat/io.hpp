#pragma once

// JSON and CSV serialization of reports and curves. Requires nlohmann/json.

#include <cmath>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "mbstat/lagstats.hpp"
#include "mbstat/moments.hpp"
#include "mbstat/numeric.hpp"

namespace mbstat {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json tick_or_null(const std::optional<Tick>& t) { return t ? Json(*t) : Json(nullptr); }

inline std::string csv_number(double x) { return std::isfinite(x) ? format_double(x) : std::string(); }

}  // namespace detail

inline Json to_json(const MomentReport& r) {
  return Json{{"center_tick", r.center_tick},
              {"effective_count", r.effective_count},
              {"vwap", detail::number_or_null(r.vwap)},
              {"market_volatility", detail::number_or_null(r.market_volatility)},
              {"volatility_negative", r.volatility_negative()},
              {"freq_price", r.freq_price},
              {"value", r.value},
              {"volume", r.volume},
              {"market_price", r.market_price}};
}

inline Json to_json(const AcfPoint& p) {
  return Json{{"lag_ticks", p.lag_ticks},
              {"b_value", detail::number_or_null(p.b_value)},
              {"b_volume", detail::number_or_null(p.b_volume)},
              {"b_price", detail::number_or_null(p.b_price)},
              {"lag2_value", detail::number_or_null(p.lag2_value)},
              {"lag2_volume", detail::number_or_null(p.lag2_volume)},
              {"lag2_price", detail::number_or_null(p.lag2_price)},
              {"pair_count", p.pair_count},
              {"center_count", p.center_count}};
}

inline Json to_json(const CorrelationScales& s) {
  return Json{{"value", detail::tick_or_null(s.value)},
              {"volume", detail::tick_or_null(s.volume)},
              {"price", detail::tick_or_null(s.price)}};
}

inline Json to_json(const AcfCurve& curve) {
  Json doc{{"window_n", curve.spec.n},
           {"lag_step", curve.spec.lag_step},
           {"min_trades", curve.spec.min_trades},
           {"max_lag", curve.options.max_lag},
           {"aggregate", curve.options.aggregate == Aggregate::mean ? "mean" : "per-center"},
           {"threshold", curve.options.threshold},
           {"windows_planned", curve.windows_planned},
           {"invalid_centers", curve.invalid_centers}};
  Json curves = Json::array();
  for (const auto& c : curve.curves) {
    Json points = Json::array();
    for (const auto& p : c.points) points.push_back(to_json(p));
    Json entry;
    if (c.center_tick) entry["center_tick"] = *c.center_tick;
    entry["scales"] = to_json(c.scales);
    entry["points"] = std::move(points);
    curves.push_back(std::move(entry));
  }
  doc["curves"] = std::move(curves);
  return doc;
}

/// Flat CSV for plotting. Per-center curves get a leading center_tick column.
/// Lags without pairs leave the statistic columns empty.
inline std::string to_csv(const AcfCurve& curve) {
  const bool per_center = curve.options.aggregate == Aggregate::per_center;
  std::string out = per_center ? "center_tick,lag,b_value,b_volume,b_price,pair_count\n"
                               : "lag,b_value,b_volume,b_price,pair_count\n";
  for (const auto& c : curve.curves) {
    for (const auto& p : c.points) {
      if (per_center) {
        out += std::to_string(c.center_tick.value_or(0));
        out += ',';
      }
      out += std::to_string(p.lag_ticks);
      out += ',';
      out += detail::csv_number(p.b_value);
      out += ',';
      out += detail::csv_number(p.b_volume);
      out += ',';
      out += detail::csv_number(p.b_price);
      out += ',';
      out += std::to_string(p.pair_count);
      out += '\n';
    }
  }
  return out;
}

/// Rows of the frequency-vs-market price moment comparison for one window.
inline std::string compare_rows(const MomentReport& r) {
  std::string out;
  for (std::size_t k = 0; k < r.market_price.size(); ++k) {
    out += std::to_string(r.center_tick);
    out += ',';
    out += std::to_string(k + 1);
    out += ',';
    out += format_double(r.freq_price[k]);
    out += ',';
    out += format_double(r.market_price[k]);
    out += ',';
    out += format_double(r.freq_price[k] - r.market_price[k]);
    out += '\n';
  }
  return out;
}

inline constexpr const char* kCompareHeader = "center_tick,n,freq_price,market_price,difference\n";

}  // namespace mbstat
