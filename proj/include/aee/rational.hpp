#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aee {

/// Exact rational number used for every time value in the library.
/// Max-plus scheduling and the conformance checks rely on exact
/// comparisons, so floating point is never used for time.
class Rat {
 public:
  constexpr Rat() = default;
  constexpr Rat(std::int64_t value) : num_(value), den_(1) {}  // NOLINT(google-explicit-constructor)

  Rat(std::int64_t num, std::int64_t den) { assign(num, den); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }

  friend Rat operator+(const Rat& a, const Rat& b) {
    I128 n = I128(a.num_) * b.den_ + I128(b.num_) * a.den_;
    return make(n, I128(a.den_) * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    I128 n = I128(a.num_) * b.den_ - I128(b.num_) * a.den_;
    return make(n, I128(a.den_) * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return make(I128(a.num_) * b.num_, I128(a.den_) * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
    return make(I128(a.num_) * b.den_, I128(a.den_) * b.num_);
  }
  Rat operator-() const { return Rat(-num_, den_); }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    I128 lhs = I128(a.num_) * b.den_;
    I128 rhs = I128(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  static Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }
  static Rat min(const Rat& a, const Rat& b) { return b < a ? b : a; }

  /// Parses an exact decimal ("2", "-0.125", "1.6") or a fraction ("7/3").
  static Rat parse(std::string_view text);

  /// Exact decimal when the denominator is 2^a * 5^b, otherwise "num/den".
  std::string to_string() const;

 private:
  using I128 = __int128;

  static Rat make(I128 num, I128 den) {
    if (den == 0) throw std::domain_error("Rat: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    I128 g = gcd128(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
    constexpr I128 kMax = INT64_MAX;
    constexpr I128 kMin = INT64_MIN;
    if (num > kMax || num < kMin || den > kMax)
      throw std::overflow_error("Rat: value out of 64-bit range");
    Rat r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }

  static I128 gcd128(I128 a, I128 b) {
    while (b != 0) { I128 t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }

  void assign(std::int64_t num, std::int64_t den) {
    *this = make(num, den);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Time values share one canonical unit across the model and the simulated
/// wall clock (milliseconds when a suffix is given). Accepted suffixes:
/// "s", "ms", "us"; a bare number is a raw model unit.
Rat parse_time(std::string_view text);

using Time = Rat;

// ---------------------------------------------------------------------------

inline Rat Rat::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("Rat: empty string");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rat n = parse(text.substr(0, slash));
    Rat d = parse(text.substr(slash + 1));
    return n / d;
  }
  bool negative = false;
  std::size_t pos = 0;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  I128 num = 0;
  I128 den = 1;
  bool any_digit = false;
  bool seen_dot = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c == '.') {
      if (seen_dot) throw std::invalid_argument("Rat: malformed number");
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9')
      throw std::invalid_argument("Rat: malformed number: " + std::string(text));
    any_digit = true;
    num = num * 10 + (c - '0');
    if (seen_dot) den *= 10;
    // guard the int128 intermediates only; make() enforces the 64-bit fit
    constexpr I128 kLimit = I128(1000000000000000000LL) * 1000000000000LL;  // 1e30
    if (num > kLimit || den > kLimit)
      throw std::overflow_error("Rat: literal too large");
  }
  if (!any_digit) throw std::invalid_argument("Rat: malformed number");
  return make(negative ? -num : num, den);
}

inline std::string Rat::to_string() const {
  // Reduce the denominator to a power of ten if possible.
  std::int64_t d = den_;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return std::to_string(num_) + "/" + std::to_string(den_);
  int digits = twos > fives ? twos : fives;
  I128 scaled = num_;
  for (int i = 0; i < digits - fives; ++i) scaled *= 5;
  for (int i = 0; i < digits - twos; ++i) scaled *= 2;
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string body;
  if (scaled == 0) body = "0";
  while (scaled > 0) {
    body.insert(body.begin(), static_cast<char>('0' + int(scaled % 10)));
    scaled /= 10;
  }
  while (static_cast<int>(body.size()) <= digits) body.insert(body.begin(), '0');
  std::string out = negative ? "-" : "";
  if (digits == 0) return out + body;
  out += body.substr(0, body.size() - digits);
  std::string frac = body.substr(body.size() - digits);
  while (frac.size() > 1 && frac.back() == '0') frac.pop_back();
  if (frac == "0") return out;
  return out + "." + frac;
}

inline Rat parse_time(std::string_view text) {
  auto ends_with = [&](std::string_view sfx) {
    return text.size() > sfx.size() &&
           text.substr(text.size() - sfx.size()) == sfx;
  };
  if (ends_with("ms")) return Rat::parse(text.substr(0, text.size() - 2));
  if (ends_with("us"))
    return Rat::parse(text.substr(0, text.size() - 2)) / Rat(1000);
  if (ends_with("s"))
    return Rat::parse(text.substr(0, text.size() - 1)) * Rat(1000);
  return Rat::parse(text);
}

}  // namespace aee
