#include "mininfo/ext_real.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mininfo {

ExtReal::ExtReal(double value) : value_(value) {
  if (std::isnan(value) || value < 0.0) {
    throw std::domain_error("ExtReal requires a nonnegative value");
  }
}

double ExtReal::value() const {
  if (is_infinite()) throw std::domain_error("ExtReal is infinite");
  return value_;
}

ExtReal& ExtReal::operator+=(const ExtReal& other) {
  if (is_infinite() || other.is_infinite()) {
    value_ = std::numeric_limits<double>::infinity();
  } else {
    value_ += other.value_;
  }
  return *this;
}

ExtReal ExtReal::scaled(double factor) const {
  if (std::isnan(factor) || factor < 0.0 || std::isinf(factor)) {
    throw std::domain_error("ExtReal scale factor must be finite and nonnegative");
  }
  if (is_infinite()) {
    if (factor == 0.0) throw std::domain_error("0 * infinity is undefined");
    return infinity();
  }
  return ExtReal(value_ * factor);
}

std::ostream& operator<<(std::ostream& os, const ExtReal& v) {
  if (v.is_infinite()) return os << "inf";
  return os << v.to_double();
}

}  // namespace mininfo
