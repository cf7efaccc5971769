#pragma once

// Finitely supported probability measures on the SPD cone and the exact
// L¹-Wasserstein distance between them.

#include <functional>
#include <vector>

#include "karcher/geometry.hpp"

namespace karcher {

/// Probability measure Σ wᵢ·δ_{Aᵢ}. Weights are renormalized to sum to one and
/// zero-weight atoms are dropped on construction.
class DiscreteMeasure {
 public:
  /// Throws DomainError on empty support, negative or non-finite weights, or an
  /// all-zero weight vector; DimensionMismatch on mixed atom dimensions.
  DiscreteMeasure(std::vector<SpdMatrix> atoms, std::vector<double> weights);

  static DiscreteMeasure uniform(std::vector<SpdMatrix> atoms);
  static DiscreteMeasure dirac(SpdMatrix atom);

  int dim() const noexcept { return atoms_.front().dim(); }
  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<SpdMatrix>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const SpdMatrix& atom(std::size_t i) const { return atoms_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// True iff every weight equals 1/size() within 1e-12.
  bool is_uniform() const;

 private:
  std::vector<SpdMatrix> atoms_;
  std::vector<double> weights_;
};

struct Coupling {
  Matrix plan;  // rows indexed by the first measure's atoms, columns by the second's
};

struct W1Result {
  double cost = 0.0;
  Coupling coupling;
};

/// True iff d∞(A,B) ≤ 1e-14, with a trace test that rejects most pairs cheaply.
bool same_atom(const SpdMatrix& a, const SpdMatrix& b);

/// (1−s)·μ + s·ν with duplicate atoms merged. Throws DomainError unless s ∈ [0,1].
DiscreteMeasure mix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double s);

/// Σ wᵢ·d∞(X, Aᵢ).
double first_moment(const DiscreteMeasure& mu, const SpdMatrix& x);

/// Pairwise Thompson distances between the atoms of μ (rows) and ν (columns).
Matrix distance_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Exact W₁ with Thompson cost, and an optimal coupling.
W1Result w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Brute force over all permutations for uniform measures with equal atom
/// counts ≤ 8. Throws DomainError otherwise.
double w1_uniform_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

DiscreteMeasure pushforward(const DiscreteMeasure& mu,
                            const std::function<SpdMatrix(const SpdMatrix&)>& f);

}  // namespace karcher
