#pragma once

#include <compare>
#include <iosfwd>
#include <limits>

namespace mininfo {

/// Nonnegative extended real: a finite value >= 0 or +infinity.
///
/// Information quantities live here. Sums saturate at +infinity and NaN is
/// never produced; multiplying zero by infinity is rejected because the
/// callers have explicit conventions for those points.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  /// Throws std::domain_error for negative or NaN input.
  explicit ExtReal(double value);

  static constexpr ExtReal infinity() {
    ExtReal r;
    r.value_ = std::numeric_limits<double>::infinity();
    return r;
  }
  static constexpr ExtReal zero() { return ExtReal{}; }

  [[nodiscard]] constexpr bool is_infinite() const {
    return value_ == std::numeric_limits<double>::infinity();
  }
  [[nodiscard]] constexpr bool is_finite() const { return !is_infinite(); }

  /// Finite value; throws std::domain_error when infinite.
  [[nodiscard]] double value() const;
  /// IEEE view, +inf when infinite.
  [[nodiscard]] constexpr double to_double() const { return value_; }

  ExtReal& operator+=(const ExtReal& other);
  friend ExtReal operator+(ExtReal a, const ExtReal& b) { return a += b; }

  /// Scales by a nonnegative finite factor. 0 * inf throws.
  [[nodiscard]] ExtReal scaled(double factor) const;

  friend constexpr auto operator<=>(const ExtReal& a, const ExtReal& b) {
    return a.value_ <=> b.value_;
  }
  friend constexpr bool operator==(const ExtReal& a, const ExtReal& b) {
    return a.value_ == b.value_;
  }

 private:
  double value_ = 0.0;
};

std::ostream& operator<<(std::ostream& os, const ExtReal& v);

}  // namespace mininfo
