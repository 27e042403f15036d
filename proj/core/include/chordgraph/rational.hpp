#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

namespace chordgraph {

/// Exact score time in whole-note units (a quarter note is 1/4).
///
/// Always stored in lowest terms with a positive denominator. Comparisons
/// cross-multiply in 128-bit arithmetic, so ordering is exact for every
/// representable value.
class RationalTime {
 public:
  constexpr RationalTime() = default;
  RationalTime(std::int64_t numerator, std::int64_t denominator = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const { return den_ == 1; }

  /// Largest integer not greater than the value.
  std::int64_t floor() const;
  std::int64_t ceil() const;

  RationalTime operator-() const { return {-num_, den_}; }
  RationalTime &operator+=(const RationalTime &o);
  RationalTime &operator-=(const RationalTime &o);
  RationalTime &operator*=(const RationalTime &o);
  RationalTime &operator/=(const RationalTime &o);

  friend RationalTime operator+(RationalTime a, const RationalTime &b) { return a += b; }
  friend RationalTime operator-(RationalTime a, const RationalTime &b) { return a -= b; }
  friend RationalTime operator*(RationalTime a, const RationalTime &b) { return a *= b; }
  friend RationalTime operator/(RationalTime a, const RationalTime &b) { return a /= b; }

  friend bool operator==(const RationalTime &a, const RationalTime &b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const RationalTime &a, const RationalTime &b);

  /// "num/den" in lowest terms.
  std::string to_string() const;
  /// Accepts "num/den" or a bare integer. Throws std::invalid_argument.
  static RationalTime parse(std::string_view text);

 private:
  __extension__ using wide = __int128;
  static RationalTime from_wide(wide num, wide den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream &operator<<(std::ostream &os, const RationalTime &t);

}  // namespace chordgraph

template <>
struct std::hash<chordgraph::RationalTime> {
  std::size_t operator()(const chordgraph::RationalTime &t) const noexcept {
    return std::hash<std::int64_t>{}(t.num()) * 1000003u ^ std::hash<std::int64_t>{}(t.den());
  }
};
