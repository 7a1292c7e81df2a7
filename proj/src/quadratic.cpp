#include "obd/quadratic.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace obd {

BigInt floor_div(const BigInt& a, const BigInt& b) {
  if (b == 0) throw MathError("division by zero");
  BigInt q = a / b;
  BigInt r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

BigInt isqrt(const BigInt& n) {
  if (n < 0) throw MathError("isqrt of negative number");
  return boost::multiprecision::sqrt(n);
}

namespace {

BigInt gcd_abs(BigInt x, BigInt y) {
  if (x < 0) x = -x;
  if (y < 0) y = -y;
  while (y != 0) {
    BigInt r = x % y;
    x = std::move(y);
    y = std::move(r);
  }
  return x;
}

// Pull square factors out of the radicand: sqrt(f^2 D) = f sqrt(D).
// Trial division is bounded; large radicands may keep a square factor,
// which only affects the printed form, never arithmetic correctness.
void reduce_radicand(BigInt& b, BigInt& d) {
  if (d <= 1) return;
  for (BigInt p = 2; p * p <= d && p < 100000; ++p) {
    BigInt sq = p * p;
    while (d % sq == 0) {
      d /= sq;
      b *= p;
    }
  }
}

}  // namespace

QuadraticReal::QuadraticReal(BigInt a, BigInt b, BigInt radicand, BigInt c)
    : a_(std::move(a)), b_(std::move(b)), d_(std::move(radicand)), c_(std::move(c)) {
  if (c_ == 0) throw MathError("zero denominator");
  if (b_ != 0) {
    if (d_ < 2) throw MathError("radicand must be at least 2");
    reduce_radicand(b_, d_);
    if (d_ == 1) {
      a_ += b_;
      b_ = 0;
    }
  }
  normalize();
}

QuadraticReal QuadraticReal::rational(BigInt numerator, BigInt denominator) {
  return QuadraticReal(std::move(numerator), 0, 0, std::move(denominator));
}

void QuadraticReal::normalize() {
  if (c_ < 0) {
    a_ = -a_;
    b_ = -b_;
    c_ = -c_;
  }
  if (b_ == 0) d_ = 0;
  BigInt g = gcd_abs(gcd_abs(a_, b_), c_);
  if (g > 1) {
    a_ /= g;
    b_ /= g;
    c_ /= g;
  }
}

namespace {

BigInt common_radicand(const QuadraticReal& x, const QuadraticReal& y) {
  if (x.is_rational()) return y.radicand();
  if (y.is_rational()) return x.radicand();
  if (x.radicand() != y.radicand()) {
    throw MathError("incompatible radicands " + x.radicand().str() + " and " +
                    y.radicand().str());
  }
  return x.radicand();
}

}  // namespace

QuadraticReal operator+(const QuadraticReal& x, const QuadraticReal& y) {
  BigInt d = common_radicand(x, y);
  return QuadraticReal(x.a_ * y.c_ + y.a_ * x.c_, x.b_ * y.c_ + y.b_ * x.c_,
                       d == 0 ? BigInt(0) : d, x.c_ * y.c_);
}

QuadraticReal QuadraticReal::operator-() const {
  QuadraticReal r = *this;
  r.a_ = -r.a_;
  r.b_ = -r.b_;
  return r;
}

QuadraticReal operator-(const QuadraticReal& x, const QuadraticReal& y) { return x + (-y); }

QuadraticReal operator*(const QuadraticReal& x, const QuadraticReal& y) {
  BigInt d = common_radicand(x, y);
  return QuadraticReal(x.a_ * y.a_ + x.b_ * y.b_ * d, x.a_ * y.b_ + x.b_ * y.a_, d,
                       x.c_ * y.c_);
}

QuadraticReal QuadraticReal::reciprocal() const {
  // c / (a + b sqrt D) = c (a - b sqrt D) / (a^2 - b^2 D)
  BigInt norm = a_ * a_ - b_ * b_ * d_;
  if (norm == 0) throw MathError("reciprocal of zero");
  return QuadraticReal(c_ * a_, -c_ * b_, d_, norm);
}

int QuadraticReal::sign() const {
  int sa = a_ > 0 ? 1 : (a_ < 0 ? -1 : 0);
  int sb = b_ > 0 ? 1 : (b_ < 0 ? -1 : 0);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // opposite signs: compare a^2 with b^2 D
  BigInt lhs = a_ * a_;
  BigInt rhs = b_ * b_ * d_;
  if (lhs == rhs) return 0;  // impossible for irrational sqrt D
  return lhs > rhs ? sa : sb;
}

std::strong_ordering operator<=>(const QuadraticReal& x, const QuadraticReal& y) {
  int s = (x - y).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string QuadraticReal::to_string() const {
  std::ostringstream os;
  bool wrap = c_ != 1 && b_ != 0 && a_ != 0;
  if (wrap) os << "(";
  if (a_ != 0 || b_ == 0) os << a_;
  if (b_ != 0) {
    BigInt mag = b_ < 0 ? BigInt(-b_) : b_;
    if (b_ < 0) os << '-';
    else if (a_ != 0) os << '+';
    if (mag != 1) os << mag;
    os << "sqrt(" << d_ << ")";
  }
  if (wrap) os << ")";
  if (c_ != 1) os << "/" << c_;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const QuadraticReal& x) { return os << x.to_string(); }

BigInt qr_floor(const QuadraticReal& x) {
  if (x.is_rational()) return floor_div(x.a(), x.c());
  BigInt s = isqrt(x.b() * x.b() * x.radicand());
  // b sqrt D lies in [s, s+1) for b > 0 and in (-s-1, -s] for b < 0
  BigInt lower = x.b() > 0 ? s : BigInt(-s - 1);
  BigInt f = floor_div(x.a() + lower, x.c());
  while ((x - QuadraticReal::rational(f + 1)).sign() >= 0) ++f;
  while ((x - QuadraticReal::rational(f)).sign() < 0) --f;
  return f;
}

std::vector<BigInt> cf_expand(const QuadraticReal& x, int count) {
  if (x.is_rational()) throw MathError("cf_expand needs an irrational value");
  if (x.sign() <= 0 || (x - QuadraticReal::rational(1)).sign() >= 0) {
    throw MathError("cf_expand needs a value in (0, 1)");
  }
  std::vector<BigInt> out;
  QuadraticReal cur = x;
  for (int i = 0; i < count; ++i) {
    QuadraticReal y = cur.reciprocal();
    BigInt a = qr_floor(y);
    out.push_back(a);
    cur = y - QuadraticReal::rational(a);
  }
  return out;
}

PeriodicCF::PeriodicCF(std::vector<int> period) : period_(std::move(period)) {
  if (period_.empty()) throw MathError("continued fraction period must be nonempty");
  for (int a : period_) {
    if (a < 1) throw MathError("partial quotients must be positive");
  }
}

int PeriodicCF::partial_quotient(int i) const {
  if (i < 1) throw MathError("partial quotient index must be >= 1");
  return period_[static_cast<std::size_t>((i - 1) % length())];
}

int PeriodicCF::max_entry() const { return *std::max_element(period_.begin(), period_.end()); }

bool PeriodicCF::all_ones() const {
  return std::all_of(period_.begin(), period_.end(), [](int a) { return a == 1; });
}

ConvergentTable::ConvergentTable(const PeriodicCF& cf, int upto) {
  if (upto < 0) throw MathError("convergent table bound must be >= 0");
  p_ = {1, 0};
  q_ = {0, 1};
  for (int i = 1; i <= upto; ++i) {
    BigInt a = cf.partial_quotient(i);
    std::size_t k = p_.size();
    p_.push_back(a * p_[k - 1] + p_[k - 2]);
    q_.push_back(a * q_[k - 1] + q_[k - 2]);
  }
}

ConvergentTable convergents(const PeriodicCF& cf, int upto) { return ConvergentTable(cf, upto); }

QuadraticReal cf_value(const PeriodicCF& cf) {
  // x = (p_m + p_{m-1} x) / (q_m + q_{m-1} x), i.e.
  // q_{m-1} x^2 + (q_m - p_{m-1}) x - p_m = 0; take the positive root.
  int m = cf.length();
  ConvergentTable t(cf, m);
  BigInt lin = t.q(m) - t.p(m - 1);
  BigInt disc = lin * lin + 4 * t.q(m - 1) * t.p(m);
  return QuadraticReal(-lin, 1, disc, 2 * t.q(m - 1));
}

RotatedPeriod period_rotate(const PeriodicCF& cf) {
  if (cf.all_ones()) return {cf, true};
  std::vector<int> best = cf.period();
  std::vector<int> cur = best;
  for (int r = 1; r < cf.length(); ++r) {
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    if (cur > best) best = cur;
  }
  return {PeriodicCF(best), false};
}

}  // namespace obd
