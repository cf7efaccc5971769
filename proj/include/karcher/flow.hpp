#pragma once

// The semigroup S(t) generated by the Karcher residual field, built from
// iterated resolvents (the exponential formula); resolvents and semigroups of
// general nonexpansive maps; and products of short geodesic steps that
// approximate S(t) without inner solves.

#include <functional>
#include <string>
#include <vector>

#include "karcher/means.hpp"

namespace karcher {

struct FlowOptions {
  /// Target Thompson distance between successive refinement levels.
  double tol = 1e-8;
  /// Largest refinement level; level k uses 2^k backward steps.
  int max_level = 14;
  /// Number of Richardson columns in the extrapolation table (0 disables it).
  int extrapolation = 6;
  /// Solver for the inner resolvents.
  SolverConfig solver{1e-12, 10000, 0.5, 0.5, 1.0};
  /// Banach tolerance for fixed points of nonexpansive-map resolvents.
  double map_tol = 1e-13;
};

struct FlowResult {
  SpdMatrix state;
  int n_used = 0;
  /// A-priori bound 2t/√n_used · c, with c = first_moment(μ, X) for the
  /// Karcher flow and c = d∞(X, F(X))/ρ for a nonexpansive map F.
  double error_bound = 0.0;
  /// Thompson distance between the last two refinement levels.
  double level_gap = 0.0;
};

/// A map ℙ → ℙ assumed nonexpansive in d∞, with the step ρ it was built for.
struct NonexpansiveMap {
  std::function<SpdMatrix(const SpdMatrix&)> fn;
  double rho = 1.0;
  std::string name;

  SpdMatrix operator()(const SpdMatrix& x) const { return fn(x); }

  static NonexpansiveMap identity(double rho = 1.0);
  /// Same map with a different declared step.
  NonexpansiveMap with_rho(double rho) const;
};

enum class TrotterOrder { forward, reverse };

/// (J_{t/n})ⁿ X, the plain backward-Euler iterate.
SpdMatrix exponential_formula(const DiscreteMeasure& mu, double t, int n, const SpdMatrix& x,
                              const SolverConfig& cfg = FlowOptions{}.solver);

/// S(t)X by refinement n = 1, 2, 4, ... of the exponential formula with
/// Richardson extrapolation in the step size. Stops when two successive
/// estimates agree to `tol` or the a-priori bound falls below it.
FlowResult semigroup(const DiscreteMeasure& mu, double t, const SpdMatrix& x,
                     const FlowOptions& opts = {});

/// Advances S in unit time steps until a step moves less than tol.
SpdMatrix flow_to_mean(const DiscreteMeasure& mu, const SpdMatrix& x, double tol,
                       const FlowOptions& opts = {});

/// Fixed point of Z ↦ Y #_q F(Z), q = (λ/ρ)/(1 + λ/ρ), accurate to tol in d∞.
SpdMatrix approx_resolvent(const NonexpansiveMap& f, double lambda, const SpdMatrix& y,
                           double tol);

/// X ↦ (((X #_{s₁} A₁) #_{s₂} A₂) ⋯) with sᵢ = ρwᵢ/(ρwᵢ + 1); for uniform
/// weights sᵢ = ρ/(ρ + n). Reverse order applies the last atom first.
NonexpansiveMap trotter_map(const DiscreteMeasure& mu, double rho,
                            TrotterOrder order = TrotterOrder::forward);
NonexpansiveMap trotter_map(const std::vector<SpdMatrix>& atoms, double rho,
                            TrotterOrder order = TrotterOrder::forward);

/// S_ρ(t)X for the map F, by the same refinement scheme as `semigroup`.
FlowResult approx_semigroup(const NonexpansiveMap& f, double t, const SpdMatrix& x,
                            const FlowOptions& opts = {});

/// (F_{t/m})^m X with F the Trotter map of μ.
SpdMatrix trotter_product(const DiscreteMeasure& mu, double t, int m, const SpdMatrix& x,
                          TrotterOrder order = TrotterOrder::forward);

/// ‖(S(h)X − X)/h − φ_μ(X)‖ in the operator norm.
double cauchy_residual(const DiscreteMeasure& mu, const SpdMatrix& x, double h,
                       const FlowOptions& opts = {});

struct ChernoffGap {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = d∞(F^m X, S_ρ(t)X); rhs = [t/ρ − m + 2√((t/ρ − m)² + t/ρ)]·d∞(X, F(X)).
ChernoffGap chernoff_gap(const NonexpansiveMap& f, double t, int m, const SpdMatrix& x,
                         const FlowOptions& opts = {});

}  // namespace karcher
