#include "mpsg/max_scalar.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

#include "mpsg/errors.hpp"

namespace mpsg {

MaxScalar::MaxScalar(double value) : value_(value) {
  if (std::isnan(value)) throw std::invalid_argument("MaxScalar: NaN is not an element of R_max");
  if (value == std::numeric_limits<double>::infinity())
    throw std::invalid_argument("MaxScalar: +inf is not an element of R_max");
}

double MaxScalar::finite_value() const {
  if (is_bottom()) throw BottomValueError("MaxScalar: bottom has no finite value");
  return value_;
}

MaxScalar otimes(MaxScalar a, MaxScalar b) {
  if (a.is_bottom() || b.is_bottom()) return MaxScalar::bottom();
  const double s = a.raw() + b.raw();
  if (std::isinf(s)) throw std::overflow_error("otimes: finite sum overflows");
  return MaxScalar(s);
}

std::string format_double(double v) {
  if (v == -std::numeric_limits<double>::infinity()) return "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf, end);
}

std::string to_string(MaxScalar a) { return format_double(a.raw()); }

MaxScalar parse_max_scalar(std::string_view token) {
  if (token == "-inf") return MaxScalar::bottom();
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  // from_chars does not accept a leading '+'
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || token.empty())
    throw std::invalid_argument("unparseable max-plus scalar '" + std::string(token) + "'");
  if (!std::isfinite(v))
    throw std::invalid_argument("non-finite literal '" + std::string(token) + "' (bottom is written -inf)");
  return MaxScalar(v);
}

}  // namespace mpsg
