#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace relloc {

/// Exact fraction kept in lowest terms with a positive denominator.
class Rational {
 public:
  constexpr Rational(std::int64_t num = 0, std::int64_t den = 1) : num_(num), den_(den) {
    if (den_ == 0) throw std::domain_error("zero denominator");
    normalize();
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend constexpr Rational operator+(Rational a, Rational b) {
    const std::int64_t g = std::gcd(a.den_, b.den_);
    return {a.num_ * (b.den_ / g) + b.num_ * (a.den_ / g), a.den_ / g * b.den_};
  }
  friend constexpr Rational operator-(Rational a, Rational b) { return a + Rational(-b.num_, b.den_); }
  friend constexpr Rational operator*(Rational a, Rational b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend constexpr Rational operator/(Rational a, Rational b) {
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  Rational& operator+=(Rational o) { return *this = *this + o; }

  friend constexpr bool operator==(Rational a, Rational b) = default;
  friend constexpr auto operator<=>(Rational a, Rational b) {
    // Cross-multiplication fits int64 for desk-scale denominators.
    return a.num_ * b.den_ <=> b.num_ * a.den_;
  }

  /// "num/den", or "num" when the denominator is 1.
  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }
  /// Decimal rendering rounded half away from zero.
  std::string fixed(int digits) const;

 private:
  constexpr void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_;
  std::int64_t den_;
};

inline std::string Rational::fixed(int digits) const {
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const bool negative = num_ < 0;
  const std::int64_t a = negative ? -num_ : num_;
  const std::int64_t scaled = (a * scale * 2 + den_) / (2 * den_);
  std::string frac = std::to_string(scaled % scale);
  frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
  std::string out = (negative && scaled != 0 ? "-" : "") + std::to_string(scaled / scale);
  if (digits > 0) out += "." + frac;
  return out;
}

}  // namespace relloc
