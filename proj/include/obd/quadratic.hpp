#pragma once

// Exact arithmetic in a real quadratic field Q(sqrt D) and purely periodic
// continued fractions.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace obd {

using BigInt = boost::multiprecision::cpp_int;

/// Raised for invalid mathematical input (mixed radicands, rational input to
/// an operation that needs an irrational, malformed periods).
class MathError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

BigInt floor_div(const BigInt& a, const BigInt& b);
BigInt isqrt(const BigInt& n);

/// The exact value (a + b*sqrt(D)) / c.
///
/// Values are kept normalized: c >= 1, gcd(a, b, c) = 1, D squarefree-reduced
/// and D = 0 whenever b = 0.  Two values are equal iff their fields are equal.
class QuadraticReal {
 public:
  QuadraticReal() = default;
  QuadraticReal(BigInt a, BigInt b, BigInt radicand, BigInt c);
  static QuadraticReal rational(BigInt numerator, BigInt denominator = 1);

  const BigInt& a() const { return a_; }
  const BigInt& b() const { return b_; }
  const BigInt& radicand() const { return d_; }
  const BigInt& c() const { return c_; }

  bool is_rational() const { return b_ == 0; }

  friend QuadraticReal operator+(const QuadraticReal& x, const QuadraticReal& y);
  friend QuadraticReal operator-(const QuadraticReal& x, const QuadraticReal& y);
  friend QuadraticReal operator*(const QuadraticReal& x, const QuadraticReal& y);
  QuadraticReal operator-() const;
  QuadraticReal reciprocal() const;

  /// Sign of the value: -1, 0 or +1, decided with integer arithmetic only.
  int sign() const;

  friend bool operator==(const QuadraticReal& x, const QuadraticReal& y) = default;
  friend std::strong_ordering operator<=>(const QuadraticReal& x, const QuadraticReal& y);

  std::string to_string() const;

 private:
  void normalize();

  BigInt a_ = 0;
  BigInt b_ = 0;
  BigInt d_ = 0;
  BigInt c_ = 1;
};

std::ostream& operator<<(std::ostream& os, const QuadraticReal& x);

/// floor((a + b sqrt D)/c), exact.
BigInt qr_floor(const QuadraticReal& x);

/// First `count` partial quotients a_1, a_2, ... of x = [0; a_1, a_2, ...].
/// Requires 0 < x < 1 irrational.
std::vector<BigInt> cf_expand(const QuadraticReal& x, int count);

/// The purely periodic continued fraction [0; a_1, ..., a_m, a_1, ...].
class PeriodicCF {
 public:
  explicit PeriodicCF(std::vector<int> period);

  const std::vector<int>& period() const { return period_; }
  int length() const { return static_cast<int>(period_.size()); }
  /// a_i for i >= 1 (a_0 = 0 is implicit).
  int partial_quotient(int i) const;
  int max_entry() const;
  bool all_ones() const;

  friend bool operator==(const PeriodicCF&, const PeriodicCF&) = default;

 private:
  std::vector<int> period_;
};

/// Convergent numerators and denominators p_i, q_i for i >= -1.
class ConvergentTable {
 public:
  ConvergentTable(const PeriodicCF& cf, int upto);

  const BigInt& p(int i) const { return p_.at(static_cast<std::size_t>(i + 1)); }
  const BigInt& q(int i) const { return q_.at(static_cast<std::size_t>(i + 1)); }
  /// Largest index i with p(i), q(i) available.
  int upto() const { return static_cast<int>(q_.size()) - 2; }

 private:
  std::vector<BigInt> p_;
  std::vector<BigInt> q_;
};

ConvergentTable convergents(const PeriodicCF& cf, int upto);

/// The unique value in (0, 1) with the given purely periodic expansion.
QuadraticReal cf_value(const PeriodicCF& cf);

struct RotatedPeriod {
  PeriodicCF period;
  bool all_ones_warning = false;
};

/// Rotation of the period to its lexicographically largest cyclic shift, so
/// that it starts with an entry larger than 1 whenever that is possible.
RotatedPeriod period_rotate(const PeriodicCF& cf);

}  // namespace obd
