#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fairstream {

struct ArithmeticOverflow : std::overflow_error {
  using std::overflow_error::overflow_error;
};

// Normalized p/q with q > 0. Every operation checks for int64 overflow.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num) : num_(num) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  // Always "p/q", including integers ("10/1").
  std::string str() const;
  // Accepts "p/q", "p", or a finite decimal such as "0.05".
  static Rational parse(std::string_view text);

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

 private:
  struct Raw {};
  Rational(Raw, std::int64_t num, std::int64_t den) : num_(num), den_(den) {}
  friend Rational make_rational(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

// Non-negative rational extended with +infinity, used for ratios.
class Ratio {
 public:
  constexpr Ratio() = default;
  Ratio(Rational v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  Ratio(std::int64_t v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  static Ratio infinity() {
    Ratio r;
    r.infinite_ = true;
    return r;
  }
  // a/b with the zero-denominator policy 0/0 -> 1, x/0 -> infinity.
  static Ratio of(const Rational& a, const Rational& b);

  bool is_infinite() const { return infinite_; }
  const Rational& value() const;

  friend bool operator==(const Ratio& a, const Ratio& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b);

  // "p/q" or "inf".
  std::string str() const;
  static Ratio parse(std::string_view text);
  double to_double() const;

 private:
  Rational value_;
  bool infinite_ = false;
};

std::ostream& operator<<(std::ostream& os, const Ratio& r);

inline Ratio min(const Ratio& a, const Ratio& b) { return b < a ? b : a; }
inline Ratio max(const Ratio& a, const Ratio& b) { return a < b ? b : a; }

}  // namespace fairstream
