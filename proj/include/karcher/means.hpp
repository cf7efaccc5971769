#pragma once

// Power means, the Karcher mean, the Karcher residual field and its derivative,
// and the resolvent J_λ(X) = Λ(λ/(λ+1)·μ + 1/(λ+1)·δ_X).

#include <optional>

#include "karcher/measure.hpp"

namespace karcher {

struct SolverConfig {
  double tol = 1e-10;
  int max_iter = 10000;
  double power_t_start = 0.5;
  double power_t_shrink = 0.5;
  double damping = 1.0;

  /// Throws DomainError if a field is out of range.
  void validate() const;
};

struct MeanResult {
  SpdMatrix value;
  SolveReport report;
};

/// φ_μ(X) = Σ wᵢ·log_X Aᵢ. Exactly zero for μ = δ_X.
SymMatrix karcher_residual(const DiscreteMeasure& mu, const SpdMatrix& x);

/// ‖φ_μ(X)‖ / ‖X‖ in the operator norm, the Karcher solver's stopping quantity.
double relative_residual(const DiscreteMeasure& mu, const SpdMatrix& x);

/// Fixed point P_t of X ↦ Σ wᵢ·X #_t Aᵢ by Picard iteration from `start`, or from
/// the weighted arithmetic mean. report.residual bounds d∞(P, f(P)) and
/// report.certified_bound = residual / t bounds d∞(P, P_t).
MeanResult power_mean(const DiscreteMeasure& mu, double t, const SolverConfig& cfg = {},
                      const std::optional<SpdMatrix>& start = std::nullopt);

/// Solution of φ_μ(X) = 0 with ‖φ_μ(X)‖ ≤ tol·‖X‖. With a start point the damped
/// residual iteration is tried from it first; otherwise, or if that fails, power
/// means P_t with shrinking t lead in from the arithmetic mean.
MeanResult karcher_mean(const DiscreteMeasure& mu, const SolverConfig& cfg = {},
                        const std::optional<SpdMatrix>& start = std::nullopt);

/// J_λ(X), the Karcher mean of λ/(λ+1)·μ + 1/(λ+1)·δ_X, warm-started at X.
SpdMatrix resolvent(const DiscreteMeasure& mu, double lambda, const SpdMatrix& x,
                    const SolverConfig& cfg = {});

/// J_λ applied n times.
SpdMatrix resolvent_power(const DiscreteMeasure& mu, double lambda, int n, const SpdMatrix& x,
                          const SolverConfig& cfg = {});

/// Fréchet derivative of φ_μ at X in direction V.
SymMatrix dphi(const DiscreteMeasure& mu, const SpdMatrix& x, const SymMatrix& v);

}  // namespace karcher
