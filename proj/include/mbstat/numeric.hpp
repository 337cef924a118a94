#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace mbstat {

/// Unevaluated sum hi + lo with |lo| <= ulp(hi) / 2. Used where a final
/// subtraction of nearly equal moments would otherwise cancel most digits.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  double value() const noexcept { return hi + lo; }
};

namespace detail {

inline DoubleDouble two_sum(double a, double b) noexcept {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DoubleDouble quick_two_sum(double a, double b) noexcept {
  const double s = a + b;
  return {s, b - (s - a)};
}

}  // namespace detail

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) noexcept {
  DoubleDouble s = detail::two_sum(a.hi, b.hi);
  const DoubleDouble t = detail::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = detail::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return detail::quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble operator-(DoubleDouble a) noexcept { return {-a.hi, -a.lo}; }
inline DoubleDouble operator-(DoubleDouble a, DoubleDouble b) noexcept { return a + (-b); }

inline DoubleDouble operator*(DoubleDouble a, DoubleDouble b) noexcept {
  const double p = a.hi * b.hi;
  const double e = std::fma(a.hi, b.hi, -p);
  return detail::quick_two_sum(p, e + (a.hi * b.lo + a.lo * b.hi));
}

inline DoubleDouble operator/(DoubleDouble a, DoubleDouble b) noexcept {
  const double q1 = a.hi / b.hi;
  const DoubleDouble r = a - b * DoubleDouble{q1, 0.0};
  const double q2 = r.hi / b.hi;
  const DoubleDouble r2 = r - b * DoubleDouble{q2, 0.0};
  const double q3 = r2.hi / b.hi;
  return DoubleDouble{q1, 0.0} + DoubleDouble{q2, 0.0} + DoubleDouble{q3, 0.0};
}

/// Neumaier-compensated running sum. Order of `add` calls is significant;
/// callers feed terms in tick order so results are reproducible.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  /// Adds a * b including the rounding error of the product.
  void add_product(double a, double b) noexcept {
    const double p = a * b;
    add(p);
    comp_ += std::fma(a, b, -p);
  }

  double value() const noexcept { return sum_ + comp_; }

  DoubleDouble exact() const noexcept { return detail::two_sum(sum_, comp_); }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Window sum from two compensated prefix sums, `hi - lo`.
inline DoubleDouble prefix_difference(const CompensatedSum& hi, const CompensatedSum& lo) noexcept {
  return hi.exact() - lo.exact();
}

/// x^n by repeated multiplication; n >= 0.
inline double ipow(double x, int n) noexcept {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

inline bool relative_close(double a, double b, double rel) noexcept {
  if (a == b) return true;
  const double scale = std::fmax(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= rel * scale;
}

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

}  // namespace mbstat
