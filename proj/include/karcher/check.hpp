#pragma once

// Randomized invariant suite: each check samples instances, evaluates an
// inequality of the form value ≤ bound, and reports the worst margin.

#include <cstdint>
#include <string>
#include <vector>

#include "karcher/lln.hpp"

namespace karcher {

/// Deterministic source of random SPD instances.
class InstanceGenerator {
 public:
  InstanceGenerator(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  double uniform(double lo, double hi);
  double normal();
  int integer(int lo, int hi);  // inclusive

  /// Q·diag(e^{u})·Qᵀ with Q Haar-orthogonal and u uniform in [−spread, spread].
  SpdMatrix spd(int n, double spread);
  /// Diagonal with log-entries uniform in [−spread, spread].
  SpdMatrix diagonal_spd(int n, double spread);
  /// Symmetric with standard normal entries (off-diagonals averaged).
  SymMatrix sym(int n);
  /// k atoms from spd(n, spread); uniform weights or weights uniform in [0.2, 1].
  DiscreteMeasure measure(int n, int k, double spread, bool uniform_weights = false);

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

struct CheckResult {
  std::string anchor;
  std::string description;
  bool passed = false;
  int instances = 0;
  /// min over instances of (bound − value); negative means a violation.
  double worst_margin = 0.0;
  std::string detail;
};

struct CheckOptions {
  std::uint64_t seed = 0;
  int instances = 10;
  int threads = 1;
};

/// Names of all checks, in suite order.
std::vector<std::string> check_anchors();

/// Runs every check. Results are in suite order regardless of thread count.
std::vector<CheckResult> run_invariant_suite(const CheckOptions& opts = {});

}  // namespace karcher
