#include "widthlab/rational.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "widthlab/errors.hpp"

namespace widthlab {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) fail(ErrorCode::InvalidArgument, "rational overflow");
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) fail(ErrorCode::InvalidArgument, "rational overflow");
  return out;
}

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) fail(ErrorCode::InvalidArgument, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

Rational Rational::operator+(const Rational& o) const {
  return Rational(checked_add(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
                  checked_mul(den_, o.den_));
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
  return Rational(checked_mul(num_, o.num_), checked_mul(den_, o.den_));
}

Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) fail(ErrorCode::InvalidArgument, "rational division by zero");
  return Rational(checked_mul(num_, o.den_), checked_mul(den_, o.num_));
}

std::strong_ordering Rational::operator<=>(const Rational& o) const {
  const std::int64_t lhs = checked_mul(num_, o.den_);
  const std::int64_t rhs = checked_mul(o.num_, den_);
  return lhs <=> rhs;
}

Rational Rational::parse(const std::string& text) {
  if (text.empty()) fail(ErrorCode::InvalidArgument, "empty rational");
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      std::size_t used = 0;
      const std::int64_t num = std::stoll(text.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument("num");
      const std::string den_text = text.substr(slash + 1);
      const std::int64_t den = std::stoll(den_text, &used);
      if (used != den_text.size()) throw std::invalid_argument("den");
      return Rational(num, den);
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) {
      std::size_t used = 0;
      const std::int64_t num = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument("int");
      return Rational(num);
    }
    const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    const std::size_t frac_len = text.size() - dot - 1;
    if (frac_len > 15) throw std::invalid_argument("too many decimals");
    std::size_t used = 0;
    const std::int64_t num = std::stoll(digits, &used);
    if (used != digits.size()) throw std::invalid_argument("decimal");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rational(num, den);
  } catch (const std::logic_error&) {
    fail(ErrorCode::InvalidArgument, "cannot parse rational '" + text + "'");
  }
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational positive_part(const Rational& x) { return x.num() > 0 ? x : Rational(0); }

LpIndex LpIndex::from_value(const Rational& p) {
  if (p < Rational(1)) fail(ErrorCode::InvalidArgument, "Lebesgue index must be >= 1, got " + p.str());
  return LpIndex(Rational(1) / p);
}

LpIndex LpIndex::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  return from_value(Rational::parse(text));
}

double LpIndex::value() const {
  if (is_infinite()) return std::numeric_limits<double>::infinity();
  return 1.0 / inv_.to_double();
}

std::string LpIndex::str() const {
  if (is_infinite()) return "inf";
  return (Rational(1) / inv_).str();
}

} // namespace widthlab
