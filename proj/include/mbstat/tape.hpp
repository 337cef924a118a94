#pragma once

// Trade records on a uniform time grid: ingestion, validation, bucketing
// and CSV round-tripping.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mbstat/error.hpp"
#include "mbstat/numeric.hpp"

namespace mbstat {

/// Grid index i; wall time is epsilon * i.
using Tick = std::int64_t;

/// One aggregated trade at a grid tick.
struct TradeRecord {
  Tick tick = 0;
  double value = 0.0;   // currency units
  double volume = 0.0;  // asset units

  double price() const noexcept { return value / volume; }

  friend bool operator==(const TradeRecord&, const TradeRecord&) = default;
};

inline double price_of(const TradeRecord& record) noexcept { return record.price(); }

/// Throws std::invalid_argument when a record breaks the value/volume invariants.
inline void check_record(const TradeRecord& r) {
  if (!(r.volume > 0.0) || !std::isfinite(r.volume)) {
    throw std::invalid_argument("volume must be positive and finite at tick " + std::to_string(r.tick));
  }
  if (!(r.value >= 0.0) || !std::isfinite(r.value)) {
    throw std::invalid_argument("value must be nonnegative and finite at tick " + std::to_string(r.tick));
  }
  if (!std::isfinite(r.price())) {
    throw std::invalid_argument("price is not finite at tick " + std::to_string(r.tick));
  }
}

/// Immutable, time-ordered sequence of records with at most one record per tick.
class TradeTape {
 public:
  TradeTape() = default;

  TradeTape(double epsilon, std::vector<TradeRecord> records)
      : epsilon_(epsilon), records_(std::move(records)) {
    if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
      throw std::invalid_argument("epsilon must be positive");
    }
    for (std::size_t i = 0; i < records_.size(); ++i) {
      check_record(records_[i]);
      if (i > 0 && records_[i].tick <= records_[i - 1].tick) {
        throw std::invalid_argument("tape ticks must be strictly increasing");
      }
    }
  }

  double epsilon() const noexcept { return epsilon_; }
  std::span<const TradeRecord> records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const TradeRecord& operator[](std::size_t i) const noexcept { return records_[i]; }

  Tick first_tick() const noexcept { return records_.front().tick; }
  Tick last_tick() const noexcept { return records_.back().tick; }

  /// Index of the first record with tick >= `tick`.
  std::size_t lower_index(Tick tick) const noexcept {
    auto it = std::lower_bound(records_.begin(), records_.end(), tick,
                               [](const TradeRecord& r, Tick t) { return r.tick < t; });
    return static_cast<std::size_t>(it - records_.begin());
  }

  /// Record at exactly `tick`, or nullptr.
  const TradeRecord* find(Tick tick) const noexcept {
    const std::size_t i = lower_index(tick);
    if (i < records_.size() && records_[i].tick == tick) return &records_[i];
    return nullptr;
  }

  friend bool operator==(const TradeTape&, const TradeTape&) = default;

 private:
  double epsilon_ = 1.0;
  std::vector<TradeRecord> records_;
};

/// Merge records sharing a tick by summing values and volumes; output is sorted.
inline TradeTape bucket(std::vector<TradeRecord> raw, double epsilon) {
  for (const auto& r : raw) check_record(r);
  std::stable_sort(raw.begin(), raw.end(),
                   [](const TradeRecord& a, const TradeRecord& b) { return a.tick < b.tick; });
  std::vector<TradeRecord> merged;
  merged.reserve(raw.size());
  for (const auto& r : raw) {
    if (!merged.empty() && merged.back().tick == r.tick) {
      merged.back().value += r.value;
      merged.back().volume += r.volume;
    } else {
      merged.push_back(r);
    }
  }
  return TradeTape(epsilon, std::move(merged));
}

/// Nearest grid tick for a wall-clock offset in seconds, ties to even.
inline Tick quantize_time(double seconds, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const double q = std::nearbyint(seconds / epsilon);
  if (!std::isfinite(q)) throw std::invalid_argument("timestamp not representable as a tick");
  return static_cast<Tick>(q);
}

enum class CsvFormat { tick_value_volume, tick_price_volume };

inline std::string_view header_of(CsvFormat format) noexcept {
  return format == CsvFormat::tick_value_volume ? "tick,value,volume" : "tick,price,volume";
}

namespace detail {

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view field, T& out) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc{} && ptr == field.data() + field.size();
}

}  // namespace detail

/// Parse a headed CSV tape. Rows sharing a tick are merged by `bucket`.
inline TradeTape parse_csv(std::istream& in, CsvFormat format, double epsilon) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<TradeRecord> raw;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = detail::trim(line);
    if (!have_header) {
      if (line_no == 1 && row.size() >= 3 && row.substr(0, 3) == "\xEF\xBB\xBF") row.remove_prefix(3);
      if (row != header_of(format)) {
        throw ParseError(line_no, "expected header '" + std::string(header_of(format)) + "'");
      }
      have_header = true;
      continue;
    }
    if (row.empty()) continue;

    std::string_view fields[3];
    std::size_t nfields = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      if (nfields == 3) {
        throw ParseError(line_no, "expected 3 fields");
      }
      fields[nfields++] = row.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (nfields != 3) throw ParseError(line_no, "expected 3 fields");

    TradeRecord r;
    double amount = 0.0;
    if (!detail::parse_number(fields[0], r.tick)) throw ParseError(line_no, "tick is not an integer");
    if (!detail::parse_number(fields[1], amount) || !std::isfinite(amount)) {
      throw ParseError(line_no, "malformed number in column 2");
    }
    if (!detail::parse_number(fields[2], r.volume) || !std::isfinite(r.volume)) {
      throw ParseError(line_no, "malformed number in column 3");
    }
    if (!(r.volume > 0.0)) throw ParseError(line_no, "volume must be positive");
    if (amount < 0.0) {
      throw ParseError(line_no, format == CsvFormat::tick_value_volume ? "negative value" : "negative price");
    }
    r.value = format == CsvFormat::tick_value_volume ? amount : amount * r.volume;
    raw.push_back(r);
  }
  if (!have_header) throw ParseError(line_no + 1, "missing header");
  return bucket(std::move(raw), epsilon);
}

inline TradeTape parse_csv(std::string_view text, CsvFormat format, double epsilon) {
  std::istringstream in{std::string(text)};
  return parse_csv(in, format, epsilon);
}

/// Write a tape in tick,value,volume form with shortest round-trip decimals.
inline std::string emit_csv(const TradeTape& tape) {
  std::string out(header_of(CsvFormat::tick_value_volume));
  out += '\n';
  for (const auto& r : tape.records()) {
    out += std::to_string(r.tick);
    out += ',';
    out += format_double(r.value);
    out += ',';
    out += format_double(r.volume);
    out += '\n';
  }
  return out;
}

}  // namespace mbstat
