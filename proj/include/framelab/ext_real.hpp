#pragma once

// Extended-real value: either a finite double or positive infinity. Ratio
// minima are genuinely +infinity for interference-free systems (sigma = 0,
// pairwise orthogonal), and reports must carry that state explicitly rather
// than smuggling a float infinity through JSON. NaN is rejected at the door.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace framelab {

class ExtReal {
 public:
  constexpr ExtReal() : value_(0.0), infinite_(false) {}

  /// Finite value; throws on NaN or float infinity (use infinity() for that).
  ExtReal(double v) : value_(v), infinite_(false) {  // NOLINT: implicit by design
    if (!std::isfinite(v))
      throw std::invalid_argument("ExtReal: non-finite double; use ExtReal::infinity()");
  }

  static constexpr ExtReal infinity() {
    ExtReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }

  /// Finite payload; throws if infinite.
  double value() const {
    if (infinite_) throw std::logic_error("ExtReal: value() on infinity");
    return value_;
  }

  /// Lossy view for ordering/printing convenience: +inf double when infinite.
  constexpr double as_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend constexpr bool operator==(const ExtReal& a, const ExtReal& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ && b.infinite_;
    return a.value_ == b.value_;
  }
  friend constexpr bool operator!=(const ExtReal& a, const ExtReal& b) { return !(a == b); }
  friend constexpr bool operator<(const ExtReal& a, const ExtReal& b) {
    if (a.infinite_) return false;            // +inf is never less
    if (b.infinite_) return true;             // finite < +inf
    return a.value_ < b.value_;
  }
  friend constexpr bool operator>(const ExtReal& a, const ExtReal& b) { return b < a; }
  friend constexpr bool operator<=(const ExtReal& a, const ExtReal& b) { return !(b < a); }
  friend constexpr bool operator>=(const ExtReal& a, const ExtReal& b) { return !(a < b); }

  std::string to_string() const {
    return infinite_ ? std::string("inf") : std::to_string(value_);
  }

 private:
  double value_;
  bool infinite_;
};

}  // namespace framelab
