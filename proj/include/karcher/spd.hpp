#pragma once

// Dense symmetric matrices, their eigendecomposition and the functional
// calculus on the cone of symmetric positive-definite matrices.

#include <Eigen/Dense>

#include <optional>
#include <span>

#include "karcher/error.hpp"

namespace karcher {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real symmetric matrix. The stored entries are exactly symmetric and finite.
class SymMatrix {
 public:
  SymMatrix() = default;

  /// Symmetrizes `m` as (m + mᵀ)/2. Throws DomainError if `m` is not square or has
  /// non-finite entries.
  explicit SymMatrix(const Matrix& m);

  static SymMatrix zero(int n);
  static SymMatrix identity(int n);
  static SymMatrix diagonal(std::span<const double> d);
  static SymMatrix from_row_major(int n, std::span<const double> data);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }

  double frobenius_norm() const { return m_.norm(); }
  /// Operator 2-norm, i.e. the largest absolute eigenvalue.
  double spectral_norm() const;

  SymMatrix operator-() const;
  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

  /// Exact entrywise equality.
  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  struct Trusted {};
  SymMatrix(Matrix m, Trusted) : m_(std::move(m)) {}
  friend class SpdMatrix;
  friend SymMatrix symmetric_part(const Matrix& m);

  Matrix m_;
};

/// Returns (m + mᵀ)/2 without the finiteness check. Internal building block.
SymMatrix symmetric_part(const Matrix& m);

/// Orthogonal eigendecomposition S = q·diag(d)·qᵀ with d ascending.
struct EigenDecomposition {
  Matrix q;
  Vector d;

  int dim() const noexcept { return static_cast<int>(d.size()); }

  /// q·diag(f(d))·qᵀ, symmetrized.
  template <class F>
  SymMatrix apply(F&& f) const {
    Vector fd(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) fd(i) = f(d(i));
    return symmetric_part(q * fd.asDiagonal() * q.transpose());
  }
};

/// Cyclic Jacobi eigensolver. Throws ConvergenceError after 100 sweeps.
EigenDecomposition sym_eigen(const SymMatrix& s);

/// Eigenvalues only, ascending.
Vector sym_eigenvalues(const SymMatrix& s);

/// Symmetric positive-definite matrix: a point of the cone. Carries its own
/// eigendecomposition, computed once at construction, so that square roots,
/// inverses and logarithms do not re-factor.
class SpdMatrix {
 public:
  SpdMatrix() = default;

  /// Throws NotPositiveDefinite unless the smallest eigenvalue is > 0.
  explicit SpdMatrix(SymMatrix s);
  explicit SpdMatrix(const Matrix& m) : SpdMatrix(SymMatrix(m)) {}

  static SpdMatrix identity(int n);
  static SpdMatrix diagonal(std::span<const double> d);
  /// Builds q·diag(d)·qᵀ from a known factorization (q orthogonal, d > 0 ascending).
  static SpdMatrix from_eigen(EigenDecomposition e);

  int dim() const noexcept { return s_.dim(); }
  const SymMatrix& sym() const noexcept { return s_; }
  const Matrix& matrix() const noexcept { return s_.matrix(); }
  double operator()(int i, int j) const { return s_(i, j); }
  const EigenDecomposition& eigen() const noexcept { return eig_; }

  double min_eigenvalue() const { return eig_.d(0); }
  double max_eigenvalue() const { return eig_.d(eig_.d.size() - 1); }
  double norm() const { return max_eigenvalue(); }

  const Matrix& sqrt_matrix() const noexcept { return sqrt_; }
  const Matrix& inv_sqrt_matrix() const noexcept { return inv_sqrt_; }

  SpdMatrix inverse() const;

  friend bool operator==(const SpdMatrix& a, const SpdMatrix& b) { return a.s_ == b.s_; }

 private:
  SpdMatrix(SymMatrix s, EigenDecomposition e);
  void finish();

  SymMatrix s_;
  EigenDecomposition eig_;
  Matrix sqrt_;
  Matrix inv_sqrt_;
};

SymMatrix mat_log(const SpdMatrix& p);
/// Throws NotPositiveDefinite if the exponential overflows or underflows.
SpdMatrix mat_exp(const SymMatrix& s);
SpdMatrix mat_pow(const SpdMatrix& p, double t);

/// Weighted arithmetic mean Σ wᵢ·Aᵢ.
SpdMatrix arithmetic_mean(std::span<const SpdMatrix> atoms, std::span<const double> weights);

/// c·m·cᵀ, symmetrized.
SymMatrix congruence(const Matrix& c, const Matrix& m);

/// Returns nullopt if `m` is not symmetric positive definite.
std::optional<SpdMatrix> try_spd(const Matrix& m);

}  // namespace karcher
