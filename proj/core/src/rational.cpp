#include "fairstream/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>
#include <ostream>

namespace fairstream {

namespace {

using Wide = __int128;

std::int64_t narrow(Wide v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw ArithmeticOverflow("rational overflow");
  }
  return static_cast<std::int64_t>(v);
}

Wide wide_gcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rational make_rational(Wide num, Wide den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide g = wide_gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational(Rational::Raw{}, narrow(num), narrow(den));
}

namespace {

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || first == s.data() + s.size()) {
    throw std::invalid_argument("bad rational: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  Rational r = make_rational(num, den);
  num_ = r.num_;
  den_ = r.den_;
}

Rational Rational::operator-() const { return make_rational(-static_cast<Wide>(num_), den_); }

Rational& Rational::operator+=(const Rational& o) {
  if (den_ == 1 && o.den_ == 1) {
    num_ = narrow(static_cast<Wide>(num_) + o.num_);
    return *this;
  }
  return *this = make_rational(static_cast<Wide>(num_) * o.den_ + static_cast<Wide>(o.num_) * den_,
                      static_cast<Wide>(den_) * o.den_);
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  return *this = make_rational(static_cast<Wide>(num_) * o.num_, static_cast<Wide>(den_) * o.den_);
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::domain_error("rational division by zero");
  return *this = make_rational(static_cast<Wide>(num_) * o.den_, static_cast<Wide>(den_) * o.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  Wide lhs = static_cast<Wide>(a.num_) * b.den_;
  Wide rhs = static_cast<Wide>(b.num_) * a.den_;
  return lhs <=> rhs;
}

std::string Rational::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational Rational::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string digits(text.substr(0, dot));
    auto frac = text.substr(dot + 1);
    if (frac.size() > 15) throw std::invalid_argument("bad rational: too many decimals");
    digits += frac;
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    if (digits == "-" || digits == "+" || digits.empty()) digits += "0";
    return Rational(parse_int(digits), den);
  }
  return Rational(parse_int(text));
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Ratio Ratio::of(const Rational& a, const Rational& b) {
  if (b.is_zero()) return a.is_zero() ? Ratio(1) : infinity();
  return Ratio(a / b);
}

const Rational& Ratio::value() const {
  if (infinite_) throw std::logic_error("value() of infinite ratio");
  return value_;
}

std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
  if (a.infinite_ || b.infinite_) {
    if (a.infinite_ && b.infinite_) return std::strong_ordering::equal;
    return a.infinite_ ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return a.value_ <=> b.value_;
}

std::string Ratio::str() const { return infinite_ ? "inf" : value_.str(); }

Ratio Ratio::parse(std::string_view text) {
  if (text == "inf" || text == "infinity") return infinity();
  return Ratio(Rational::parse(text));
}

double Ratio::to_double() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : value_.to_double();
}

std::ostream& operator<<(std::ostream& os, const Ratio& r) { return os << r.str(); }

}  // namespace fairstream
