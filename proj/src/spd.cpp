#include "karcher/spd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace karcher {

namespace {

constexpr int kMaxSweeps = 100;

bool all_finite(const Matrix& m) { return m.allFinite(); }

// Cyclic Jacobi with a relative threshold: a rotation is skipped once the
// off-diagonal entry is negligible against the geometric mean of the two
// diagonal entries it couples, which keeps small eigenvalues accurate.
EigenDecomposition jacobi(const Matrix& input, bool want_vectors) {
  const Eigen::Index n = input.rows();
  Matrix a = input;
  Matrix v = want_vectors ? Matrix::Identity(n, n) : Matrix();
  const double eps = std::numeric_limits<double>::epsilon();
  const double floor = 1e-18 * a.norm() + std::numeric_limits<double>::min();

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double app = a(p, p);
        const double aqq = a(q, q);
        if (std::abs(apq) <= std::max(eps * std::sqrt(std::abs(app * aqq)), floor)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        rotated = true;
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double g = a(r, p);
          const double h = a(r, q);
          const double rp = g - s * (h + g * tau);
          const double rq = h + s * (g - h * tau);
          a(r, p) = a(p, r) = rp;
          a(r, q) = a(q, r) = rq;
        }
        if (want_vectors) {
          for (Eigen::Index r = 0; r < n; ++r) {
            const double g = v(r, p);
            const double h = v(r, q);
            v(r, p) = g - s * (h + g * tau);
            v(r, q) = h + s * (g - h * tau);
          }
        }
      }
    }
    if (!rotated) break;
  }
  if (sweep == kMaxSweeps) {
    throw ConvergenceError("Jacobi eigensolver did not converge in 100 sweeps",
                           SolveReport{sweep, 0.0, std::nullopt});
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.d.resize(n);
  if (want_vectors) out.q.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.d(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    if (want_vectors) out.q.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw DomainError("matrix is not square");
  if (m.rows() == 0) throw DomainError("matrix has dimension 0");
  if (!all_finite(m)) throw DomainError("matrix has non-finite entries");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix symmetric_part(const Matrix& m) {
  return SymMatrix(Matrix(0.5 * (m + m.transpose())), SymMatrix::Trusted{});
}

SymMatrix SymMatrix::zero(int n) { return SymMatrix(Matrix::Zero(n, n), Trusted{}); }

SymMatrix SymMatrix::identity(int n) { return SymMatrix(Matrix::Identity(n, n), Trusted{}); }

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) v(static_cast<Eigen::Index>(i)) = d[i];
  return SymMatrix(Matrix(v.asDiagonal()));
}

SymMatrix SymMatrix::from_row_major(int n, std::span<const double> data) {
  if (n <= 0) throw DomainError("dimension must be positive");
  if (data.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw DimensionMismatch(n * n, static_cast<int>(data.size()));
  }
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = data[static_cast<std::size_t>(i * n + j)];
  return SymMatrix(m);
}

double SymMatrix::spectral_norm() const {
  if (m_.size() == 0) return 0.0;
  const EigenDecomposition e = jacobi(m_, false);
  return std::max(std::abs(e.d(0)), std::abs(e.d(e.d.size() - 1)));
}

SymMatrix SymMatrix::operator-() const { return SymMatrix(Matrix(-m_), Trusted{}); }

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.dim() != dim()) throw DimensionMismatch(dim(), o.dim());
  m_ += o.m_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  if (o.dim() != dim()) throw DimensionMismatch(dim(), o.dim());
  m_ -= o.m_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

EigenDecomposition sym_eigen(const SymMatrix& s) { return jacobi(s.matrix(), true); }

Vector sym_eigenvalues(const SymMatrix& s) { return jacobi(s.matrix(), false).d; }

SpdMatrix::SpdMatrix(SymMatrix s) : s_(std::move(s)) {
  eig_ = sym_eigen(s_);
  if (!(eig_.d(0) > 0.0)) {
    throw NotPositiveDefinite("matrix is not positive definite (smallest eigenvalue " +
                              std::to_string(eig_.d(0)) + ")");
  }
  finish();
}

SpdMatrix::SpdMatrix(SymMatrix s, EigenDecomposition e) : s_(std::move(s)), eig_(std::move(e)) {
  finish();
}

void SpdMatrix::finish() {
  sqrt_ = eig_.apply([](double x) { return std::sqrt(x); }).matrix();
  inv_sqrt_ = eig_.apply([](double x) { return 1.0 / std::sqrt(x); }).matrix();
}

SpdMatrix SpdMatrix::identity(int n) {
  EigenDecomposition e{Matrix::Identity(n, n), Vector::Ones(n)};
  return SpdMatrix(SymMatrix::identity(n), std::move(e));
}

SpdMatrix SpdMatrix::diagonal(std::span<const double> d) {
  return SpdMatrix(SymMatrix::diagonal(d));
}

SpdMatrix SpdMatrix::from_eigen(EigenDecomposition e) {
  if (!e.d.allFinite() || !e.q.allFinite()) {
    throw NotPositiveDefinite("non-finite spectrum");
  }
  if (!(e.d.minCoeff() > 0.0)) throw NotPositiveDefinite("non-positive eigenvalue");
  SymMatrix s = symmetric_part(e.q * e.d.asDiagonal() * e.q.transpose());
  return SpdMatrix(std::move(s), std::move(e));
}

SpdMatrix SpdMatrix::inverse() const {
  EigenDecomposition e;
  const Eigen::Index n = eig_.d.size();
  e.d.resize(n);
  e.q.resize(n, n);
  // Reverse so the inverted spectrum stays ascending.
  for (Eigen::Index k = 0; k < n; ++k) {
    e.d(k) = 1.0 / eig_.d(n - 1 - k);
    e.q.col(k) = eig_.q.col(n - 1 - k);
  }
  return from_eigen(std::move(e));
}

SymMatrix mat_log(const SpdMatrix& p) {
  return p.eigen().apply([](double x) { return std::log(x); });
}

SpdMatrix mat_exp(const SymMatrix& s) {
  EigenDecomposition e = sym_eigen(s);
  for (Eigen::Index i = 0; i < e.d.size(); ++i) {
    e.d(i) = std::exp(e.d(i));
    if (!std::isfinite(e.d(i)) || e.d(i) <= 0.0) {
      throw NotPositiveDefinite("matrix exponential overflows or underflows");
    }
  }
  return SpdMatrix::from_eigen(std::move(e));
}

SpdMatrix mat_pow(const SpdMatrix& p, double t) {
  if (!std::isfinite(t)) throw DomainError("exponent must be finite");
  if (t == 1.0) return p;
  if (t == 0.0) return SpdMatrix::identity(p.dim());
  EigenDecomposition e = p.eigen();
  for (Eigen::Index i = 0; i < e.d.size(); ++i) e.d(i) = std::pow(e.d(i), t);
  if (t < 0) {
    e.d.reverseInPlace();
    e.q = e.q.rowwise().reverse().eval();
  }
  return SpdMatrix::from_eigen(std::move(e));
}

SpdMatrix arithmetic_mean(std::span<const SpdMatrix> atoms, std::span<const double> weights) {
  if (atoms.empty()) throw DomainError("arithmetic mean of an empty family");
  if (atoms.size() != weights.size()) {
    throw DimensionMismatch(static_cast<int>(atoms.size()), static_cast<int>(weights.size()));
  }
  const int n = atoms.front().dim();
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].dim() != n) throw DimensionMismatch(n, atoms[i].dim());
    sum += weights[i] * atoms[i].matrix();
  }
  return SpdMatrix(symmetric_part(sum));
}

SymMatrix congruence(const Matrix& c, const Matrix& m) {
  return symmetric_part(c * m * c.transpose());
}

std::optional<SpdMatrix> try_spd(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0 || !m.allFinite()) return std::nullopt;
  try {
    return SpdMatrix(symmetric_part(m));
  } catch (const NotPositiveDefinite&) {
    return std::nullopt;
  }
}

}  // namespace karcher
