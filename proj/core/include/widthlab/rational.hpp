#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace widthlab {

// Exact rational number with a positive denominator in lowest terms.
class Rational {
public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational operator-() const { return Rational(-num_, den_); }

  bool operator==(const Rational& o) const = default;
  std::strong_ordering operator<=>(const Rational& o) const;

  // Accepts "3", "-1/2", "0.25" (finite decimal).
  static Rational parse(const std::string& text);
  std::string str() const;

private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

Rational positive_part(const Rational& x);

// Lebesgue index in [1, inf]; stores the reciprocal 1/p exactly so that
// inf is represented by 0.
class LpIndex {
public:
  LpIndex() = default;
  static LpIndex infinity() { return LpIndex(Rational(0)); }
  static LpIndex from_value(const Rational& p);
  static LpIndex parse(const std::string& text); // "inf", "2", "3/2"

  const Rational& reciprocal() const { return inv_; }
  bool is_infinite() const { return inv_.num() == 0; }
  double value() const;        // +inf for infinity
  double inverse() const { return inv_.to_double(); }
  std::string str() const;

  bool operator==(const LpIndex& o) const = default;
  // Ordered by the index value p (so infinity is largest).
  std::strong_ordering operator<=>(const LpIndex& o) const { return o.inv_ <=> inv_; }

private:
  explicit LpIndex(Rational inv) : inv_(inv) {}
  Rational inv_{1};
};

} // namespace widthlab
