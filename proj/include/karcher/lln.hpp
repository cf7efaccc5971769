#pragma once

// Seeded SPD-valued laws, empirical measures, and the law-of-large-numbers
// experiment comparing means and flows of samples against a reference.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "karcher/flow.hpp"

namespace karcher {

/// Counter-based generator: the value at (seed, stream, counter) is a fixed hash,
/// so draw i of a sample never depends on how many draws came before it.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter, std::uint64_t lane) const;
  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t counter, std::uint64_t lane) const;
  /// Standard normal by the Box–Muller transform of lanes 2·lane and 2·lane+1.
  double normal(std::uint64_t counter, std::uint64_t lane) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

struct FiniteLaw {
  DiscreteMeasure measure;
};

/// Y = base^{1/2}·exp(scale·G)·base^{1/2} with G = (Z + Zᵀ)/2, Z standard normal.
/// The law is invariant under Y ↦ base·Y^{-1}·base, so its Karcher mean is base.
struct LogGaussianLaw {
  SpdMatrix base;
  double scale = 1.0;
};

class SpdLaw {
 public:
  static SpdLaw finite(DiscreteMeasure mu);
  /// Throws DomainError unless scale > 0.
  static SpdLaw log_gaussian(SpdMatrix base, double scale);

  int dim() const;
  bool is_finite() const { return std::holds_alternative<FiniteLaw>(kind_); }
  const FiniteLaw& as_finite() const { return std::get<FiniteLaw>(kind_); }
  const LogGaussianLaw& as_log_gaussian() const { return std::get<LogGaussianLaw>(kind_); }

 private:
  explicit SpdLaw(std::variant<FiniteLaw, LogGaussianLaw> k) : kind_(std::move(k)) {}
  std::variant<FiniteLaw, LogGaussianLaw> kind_;
};

/// Empirical measure of draws 0..n−1 on the given stream. Repeated atoms of a
/// finite law are merged, so weights are hit counts over n.
DiscreteMeasure sample(const SpdLaw& law, int n, std::uint64_t seed, std::uint64_t stream = 0);

struct LlnRow {
  int n = 0;
  std::optional<double> w1_to_law;
  double d_mean = 0.0;
  double d_flow = 0.0;
  std::uint64_t seed = 0;
};

struct LlnOptions {
  SolverConfig solver;
  FlowOptions flow;
  int threads = 1;
  /// Size of the reference sample for non-finite laws, as a multiple of the largest size.
  int reference_factor = 16;
};

struct LlnReport {
  std::vector<LlnRow> rows;
  /// Describes the reference sample when the law is not finite.
  std::optional<std::string> reference_note;
};

/// One row per size: distances of Λ(μ_n) and S^{μ_n}(t)X to those of the law
/// (or of a large reference sample). Sizes must be positive and ascending.
LlnReport lln_run(const SpdLaw& law, const std::vector<int>& sizes, double t, const SpdMatrix& x,
                  std::uint64_t seed, const LlnOptions& opts = {});

/// Header `n,w1_to_law,d_mean,d_flow,seed`, preceded by `# reference ...` when present.
void write_csv(std::ostream& out, const LlnReport& report);
std::string to_csv(const LlnReport& report);

}  // namespace karcher
