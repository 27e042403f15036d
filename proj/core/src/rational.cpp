#include "chordgraph/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace chordgraph {

namespace {

__extension__ using i128 = __int128;

i128 gcd_wide(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const char *begin = text.data();
  const char *end = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || begin == end) {
    throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

RationalTime::RationalTime(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw std::invalid_argument("rational with zero denominator");
  *this = from_wide(numerator, denominator);
}

RationalTime RationalTime::from_wide(wide num, wide den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const i128 g = gcd_wide(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr auto lo = std::numeric_limits<std::int64_t>::min();
  constexpr auto hi = std::numeric_limits<std::int64_t>::max();
  if (num < lo || num > hi || den > hi) throw std::overflow_error("rational overflow");
  RationalTime r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

std::int64_t RationalTime::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::int64_t RationalTime::ceil() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  return q;
}

RationalTime &RationalTime::operator+=(const RationalTime &o) {
  *this = from_wide(static_cast<i128>(num_) * o.den_ + static_cast<i128>(o.num_) * den_,
                    static_cast<i128>(den_) * o.den_);
  return *this;
}

RationalTime &RationalTime::operator-=(const RationalTime &o) { return *this += -o; }

RationalTime &RationalTime::operator*=(const RationalTime &o) {
  *this = from_wide(static_cast<i128>(num_) * o.num_, static_cast<i128>(den_) * o.den_);
  return *this;
}

RationalTime &RationalTime::operator/=(const RationalTime &o) {
  if (o.num_ == 0) throw std::domain_error("division of rational by zero");
  *this = from_wide(static_cast<i128>(num_) * o.den_, static_cast<i128>(den_) * o.num_);
  return *this;
}

std::strong_ordering operator<=>(const RationalTime &a, const RationalTime &b) {
  const i128 lhs = static_cast<i128>(a.num_) * b.den_;
  const i128 rhs = static_cast<i128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string RationalTime::to_string() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

RationalTime RationalTime::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return RationalTime(parse_int(text, text), 1);
  const std::int64_t num = parse_int(text.substr(0, slash), text);
  const std::int64_t den = parse_int(text.substr(slash + 1), text);
  if (den == 0) throw std::invalid_argument("rational '" + std::string(text) + "' has zero denominator");
  return RationalTime(num, den);
}

std::ostream &operator<<(std::ostream &os, const RationalTime &t) { return os << t.to_string(); }

}  // namespace chordgraph
