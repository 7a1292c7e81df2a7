#pragma once

// Ostrowski numeration over a purely periodic quadratic irrational.

#include "obd/quadratic.hpp"

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace obd {

/// Most-significant-first digit string e_t ... e_0.
struct DigitString {
  std::vector<int> digits;

  friend bool operator==(const DigitString&, const DigitString&) = default;
};

/// The Ostrowski gamma-numeration system for gamma = [0; period, period, ...].
///
/// Convergent denominators are grown on demand; the cache is internally
/// synchronized so a system can be shared between threads.
class NumerationSystem {
 public:
  NumerationSystem(std::string name, PeriodicCF period);

  const std::string& name() const { return name_; }
  const PeriodicCF& period() const { return period_; }
  const QuadraticReal& gamma() const { return gamma_; }
  int dmax() const { return dmax_; }
  int period_length() const { return period_.length(); }

  /// Digit bound at position i, i.e. a_{i+1}.
  int digit_bound(int position) const { return period_.partial_quotient(position + 1); }

  BigInt p(int i) const;
  BigInt q(int i) const;
  /// Smallest table holding indices up to `upto`.
  ConvergentTable table(int upto) const;

 private:
  void grow(int upto) const;

  std::string name_;
  PeriodicCF period_;
  QuadraticReal gamma_;
  int dmax_;
  mutable std::mutex mutex_;
  mutable ConvergentTable cache_;
};

using SystemPtr = std::shared_ptr<const NumerationSystem>;

DigitString encode(const NumerationSystem& sys, const BigInt& n);
BigInt decode(const NumerationSystem& sys, const DigitString& x);
bool is_canonical(const NumerationSystem& sys, const DigitString& x);
std::vector<DigitString> pad_parallel(std::span<const DigitString> xs);

/// Contiguous digits when dmax <= 9, space separated otherwise.
std::string format_digits(const NumerationSystem& sys, const DigitString& x);
DigitString parse_digits(const NumerationSystem& sys, const std::string& text);

}  // namespace obd
