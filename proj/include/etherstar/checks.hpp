#pragma once

// Invariant suites over every module, aggregated into one report.

#include <cstdint>
#include <string>
#include <vector>

#include "etherstar/geometry.hpp"

namespace etherstar {

struct CheckResult {
  std::string name;
  bool passed = false;
  double max_residual = 0.0;
  double tolerance = 0.0;
  int samples = 0;
  int skipped = 0;  // samples dropped as focal
  double wall_seconds = 0.0;
  std::string note;
};

struct SuiteReport {
  std::string manifold;
  std::uint64_t seed = 0;
  double hbar = 0.2;
  std::vector<CheckResult> checks;

  bool passed() const;
};

struct CheckConfig {
  std::uint64_t seed = 7;
  /// Samples for the cheap checks; expensive checks use a fixed fraction.
  int samples = 20;
  double hbar = 0.2;
  /// Restrict to checks whose name starts with this prefix (empty: all).
  std::string only;
};

SuiteReport run_checks(const ManifoldModel& m, const CheckConfig& cfg);

}  // namespace etherstar
