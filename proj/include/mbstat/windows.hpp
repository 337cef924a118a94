#pragma once

// Averaging windows of N ticks whose centers sit on multiples of the lag step.

#include <span>
#include <stdexcept>
#include <vector>

#include "mbstat/tape.hpp"

namespace mbstat {

struct WindowSpec {
  Tick n = 1;                  // window width in ticks, odd
  Tick lag_step = 1;           // stride between centers, 1 <= lag_step <= n
  std::size_t min_trades = 1;  // windows with fewer members are flagged invalid

  Tick half_width() const noexcept { return (n - 1) / 2; }

  void validate() const {
    if (n < 1 || n % 2 == 0) throw std::invalid_argument("window N must be odd and >= 1");
    if (lag_step < 1 || lag_step > n) throw std::invalid_argument("lag step must lie in [1, N]");
    if (min_trades < 1) throw std::invalid_argument("min_trades must be >= 1");
  }
};

/// A planned window. Members are the contiguous tape records
/// [first, first + count) whose ticks fall in [center - h, center + h].
struct Window {
  Tick center = 0;
  Tick half_width = 0;
  std::size_t first = 0;
  std::size_t count = 0;
  bool valid = false;

  Tick lo() const noexcept { return center - half_width; }
  Tick hi() const noexcept { return center + half_width; }
};

namespace detail {

inline Tick floor_div(Tick a, Tick b) noexcept {
  Tick q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Tick ceil_div(Tick a, Tick b) noexcept { return -floor_div(-a, b); }

}  // namespace detail

inline Window make_window(const TradeTape& tape, Tick center, Tick half_width, std::size_t min_trades) {
  Window w;
  w.center = center;
  w.half_width = half_width;
  w.first = tape.lower_index(w.lo());
  w.count = tape.lower_index(w.hi() + 1) - w.first;
  w.valid = w.count >= min_trades;
  return w;
}

/// Windows fully contained in [first tick, last tick], ordered by center.
/// Windows below min_trades are kept with valid = false.
inline std::vector<Window> plan_windows(const TradeTape& tape, const WindowSpec& spec) {
  spec.validate();
  std::vector<Window> out;
  if (tape.empty()) return out;
  const Tick h = spec.half_width();
  const Tick k_lo = detail::ceil_div(tape.first_tick() + h, spec.lag_step);
  const Tick k_hi = detail::floor_div(tape.last_tick() - h, spec.lag_step);
  if (k_hi < k_lo) return out;
  out.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
  for (Tick k = k_lo; k <= k_hi; ++k) {
    out.push_back(make_window(tape, k * spec.lag_step, h, spec.min_trades));
  }
  return out;
}

inline std::span<const TradeRecord> members(const Window& window, const TradeTape& tape) noexcept {
  if (window.count == 0) return {};
  return tape.records().subspan(window.first, window.count);
}

}  // namespace mbstat
