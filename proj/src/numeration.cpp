#include "obd/numeration.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace obd {

NumerationSystem::NumerationSystem(std::string name, PeriodicCF period)
    : name_(std::move(name)),
      period_(std::move(period)),
      gamma_(cf_value(period_)),
      dmax_(period_.max_entry()),
      cache_(period_, 64) {}

void NumerationSystem::grow(int upto) const {
  if (cache_.upto() < upto) cache_ = ConvergentTable(period_, std::max(upto, 2 * cache_.upto()));
}

BigInt NumerationSystem::p(int i) const {
  std::lock_guard lock(mutex_);
  grow(i);
  return cache_.p(i);
}

BigInt NumerationSystem::q(int i) const {
  std::lock_guard lock(mutex_);
  grow(i);
  return cache_.q(i);
}

ConvergentTable NumerationSystem::table(int upto) const {
  std::lock_guard lock(mutex_);
  grow(upto);
  return cache_;
}

DigitString encode(const NumerationSystem& sys, const BigInt& n) {
  if (n < 0) throw MathError("cannot encode a negative number");
  if (n == 0) return DigitString{{0}};
  int top = 0;
  while (sys.q(top + 1) <= n) ++top;
  DigitString out;
  BigInt rest = n;
  for (int i = top; i >= 0; --i) {
    BigInt qi = sys.q(i);
    BigInt d = rest / qi;
    rest -= d * qi;
    out.digits.push_back(static_cast<int>(d));
  }
  return out;
}

BigInt decode(const NumerationSystem& sys, const DigitString& x) {
  BigInt value = 0;
  int len = static_cast<int>(x.digits.size());
  for (int k = 0; k < len; ++k) {
    int d = x.digits[static_cast<std::size_t>(k)];
    if (d < 0 || d > sys.dmax()) {
      throw MathError("digit " + std::to_string(d) + " outside 0.." + std::to_string(sys.dmax()));
    }
    if (d != 0) value += sys.q(len - 1 - k) * d;
  }
  return value;
}

bool is_canonical(const NumerationSystem& sys, const DigitString& x) {
  int len = static_cast<int>(x.digits.size());
  bool prev_saturated = false;
  for (int k = 0; k < len; ++k) {
    int pos = len - 1 - k;
    int d = x.digits[static_cast<std::size_t>(k)];
    int bound = sys.digit_bound(pos);
    if (d < 0 || d > bound) return false;
    if (prev_saturated && d != 0) return false;
    if (pos == 0 && d == bound) return false;
    prev_saturated = d == bound;
  }
  return true;
}

std::vector<DigitString> pad_parallel(std::span<const DigitString> xs) {
  std::size_t width = 0;
  for (const auto& x : xs) width = std::max(width, x.digits.size());
  std::vector<DigitString> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    DigitString padded;
    padded.digits.assign(width - x.digits.size(), 0);
    padded.digits.insert(padded.digits.end(), x.digits.begin(), x.digits.end());
    out.push_back(std::move(padded));
  }
  return out;
}

std::string format_digits(const NumerationSystem& sys, const DigitString& x) {
  std::string out;
  bool spaced = sys.dmax() > 9;
  for (std::size_t i = 0; i < x.digits.size(); ++i) {
    if (spaced && i > 0) out += ' ';
    out += std::to_string(x.digits[i]);
  }
  return out;
}

DigitString parse_digits(const NumerationSystem& sys, const std::string& text) {
  DigitString out;
  if (sys.dmax() > 9) {
    std::istringstream in(text);
    int d;
    while (in >> d) out.digits.push_back(d);
  } else {
    for (char ch : text) {
      if (std::isspace(static_cast<unsigned char>(ch))) continue;
      if (!std::isdigit(static_cast<unsigned char>(ch))) throw MathError("bad digit string: " + text);
      out.digits.push_back(ch - '0');
    }
  }
  return out;
}

}  // namespace obd
