#pragma once

// Additive-basis search, sums-complement sets and the scripted
// reproduction runs with their expected outcomes.

#include "obd/beatty.hpp"

#include <chrono>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace obd {

enum class BasisVerdict { Basis, AsymptoticBasis, NotBasisAtCap };

struct BasisReport {
  QuadraticReal alpha, beta;
  int order = 0;  // 0 with NotBasisAtCap
  BasisVerdict verdict = BasisVerdict::NotBasisAtCap;
  std::vector<BigInt> exceptional;  // naturals that are not h-fold sums
};

/// Smallest h <= cap such that all but finitely many naturals are sums of h
/// terms floor(i*alpha + beta) with i >= min_index.
BasisReport find_min_basis_order(const SystemPtr& sys, const BeattySpec& spec, int cap, int min_index = 1);

/// {n >= 1 : no i, j >= 1 with n = floor(i*alpha + beta) - floor(j*alpha + beta)}.
Automaton sums_complement(const SystemPtr& sys, const BeattySpec& spec);

struct Check {
  std::string name;
  int line = 0;
  std::string expected;
  std::string actual;
  bool pass = false;
};

struct SectionReport {
  std::string section;
  std::vector<Check> checks;
  std::chrono::milliseconds elapsed{0};
  std::string error;  // script failure, if any
  bool passed() const;
};

struct ReproduceOptions {
  std::filesystem::path script_dir;  // empty: the installed scripts
  std::filesystem::path work_dir;    // empty: a directory under the system temp dir
  std::ostream* log = nullptr;       // receives the session output
};

/// Known sections; the slow ones only when asked.
std::vector<std::string> reproducible_sections(bool include_slow);
bool is_slow_section(const std::string& section);

SectionReport reproduce(const std::string& section, const ReproduceOptions& options = {});

void print_report(std::ostream& os, const SectionReport& report);
void write_junit(std::ostream& os, const std::vector<SectionReport>& reports);

std::filesystem::path default_script_dir();

}  // namespace obd
