#pragma once

// Thompson-metric geometry of the SPD cone: distance, Loewner order, geodesics,
// relative operator entropy and its inverse, the logarithm's derivative and
// norming states.

#include "karcher/spd.hpp"

namespace karcher {

/// d∞(A,B) = max |log λ| over the spectrum of A^{-1/2}·B·A^{-1/2}.
double thompson_distance(const SpdMatrix& a, const SpdMatrix& b);

/// True iff the smallest eigenvalue of B − A is ≥ −tol.
bool loewner_leq(const SpdMatrix& a, const SpdMatrix& b, double tol);

/// A #_t B = A^{1/2}(A^{-1/2}BA^{-1/2})^t A^{1/2}. Throws DomainError unless t ∈ [0,1].
SpdMatrix geodesic(const SpdMatrix& a, const SpdMatrix& b, double t);

/// log_X A = X^{1/2}·log(X^{-1/2}AX^{-1/2})·X^{1/2}. Exactly zero when A == X.
SymMatrix log_point(const SpdMatrix& x, const SpdMatrix& a);

/// exp_X V = X^{1/2}·exp(X^{-1/2}VX^{-1/2})·X^{1/2}, the inverse of log_point(X, ·).
SpdMatrix exp_point(const SpdMatrix& x, const SymMatrix& v);

/// Fréchet derivative of mat_log at P in direction V.
SymMatrix dlog(const SpdMatrix& p, const SymMatrix& v);

/// Divided difference of log at (a, b), with the limit 1/a used once the two
/// arguments agree to a relative 1e-8.
double log_divided_difference(double a, double b);

/// A state ω(M) = vᵀMv along which the geodesic from B to A grows (or decays)
/// at the full exponential rate e^{±t·d∞(A,B)}.
struct NormingState {
  enum class Side { upper, lower };

  Vector v;
  Side side = Side::upper;

  double evaluate(const SpdMatrix& m) const { return v.dot(m.matrix() * v); }
  double evaluate(const SymMatrix& m) const { return v.dot(m.matrix() * v); }
};

/// ω(B #_t A) = e^{t·d}·ω(B) on the upper side, e^{−t·d}·ω(B) on the lower side.
NormingState norming_state(const SpdMatrix& a, const SpdMatrix& b);

/// X^{-1/2}·A·X^{-1/2}, symmetrized.
SymMatrix whiten(const SpdMatrix& x, const SpdMatrix& a);

void require_same_dim(int expected, int actual);

}  // namespace karcher
