#pragma once

#include <limits>
#include <string>
#include <string_view>

namespace mpsg {

/// An element of the max-plus semifield R_max = R u {-inf}.
///
/// The bottom element is held as IEEE -inf, which is a distinct encoding
/// rather than a large negative sentinel: max(a, -inf) == a and
/// a + (-inf) == -inf hold exactly, so oplus/otimes never confuse bottom with
/// a finite value. NaN and +inf are rejected at construction.
class MaxScalar {
 public:
  /// Default-constructed scalars are bottom, the neutral element of oplus.
  constexpr MaxScalar() noexcept = default;

  /// Throws std::invalid_argument for NaN or +inf; -inf maps to bottom.
  explicit MaxScalar(double value);

  static constexpr MaxScalar bottom() noexcept { return MaxScalar(); }
  /// The otimes unit, 0.
  static constexpr MaxScalar unit() noexcept { return MaxScalar(Raw{}, 0.0); }

  constexpr bool is_bottom() const noexcept { return value_ == kBottom; }
  constexpr bool is_finite() const noexcept { return value_ != kBottom; }

  /// Extended-real value; -inf for bottom.
  constexpr double raw() const noexcept { return value_; }

  /// Throws BottomValueError when called on bottom.
  double finite_value() const;

  friend constexpr bool operator==(MaxScalar a, MaxScalar b) noexcept { return a.value_ == b.value_; }

 private:
  static constexpr double kBottom = -std::numeric_limits<double>::infinity();
  struct Raw {};
  constexpr MaxScalar(Raw, double v) noexcept : value_(v) {}

  double value_ = kBottom;
};

/// a (+) b = max{a, b}. Introduces no rounding.
constexpr MaxScalar oplus(MaxScalar a, MaxScalar b) noexcept { return a.raw() < b.raw() ? b : a; }

/// a (x) b = a + b, bottom absorbing. Throws std::overflow_error if two finite
/// values sum past the largest double.
MaxScalar otimes(MaxScalar a, MaxScalar b);

/// Standard order: a <= b iff a (+) b == b.
constexpr bool leq(MaxScalar a, MaxScalar b) noexcept { return oplus(a, b) == b; }

/// Shortest round-trip decimal for finite values, `-inf` for bottom.
std::string to_string(MaxScalar a);

/// Inverse of to_string. Throws std::invalid_argument on anything that is not
/// a finite decimal literal or the exact token `-inf`.
MaxScalar parse_max_scalar(std::string_view token);

/// Same formatting rule applied to a raw double (finite or -inf).
std::string format_double(double v);

}  // namespace mpsg
