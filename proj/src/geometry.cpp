#include "karcher/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace karcher {

void require_same_dim(int expected, int actual) {
  if (expected != actual) throw DimensionMismatch(expected, actual);
}

SymMatrix whiten(const SpdMatrix& x, const SpdMatrix& a) {
  require_same_dim(x.dim(), a.dim());
  return congruence(x.inv_sqrt_matrix(), a.matrix());
}

double thompson_distance(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim());
  if (a == b) return 0.0;
  const Vector d = sym_eigenvalues(whiten(a, b));
  if (!(d(0) > 0.0)) throw NotPositiveDefinite("whitened matrix lost positivity");
  return std::max(std::abs(std::log(d(0))), std::abs(std::log(d(d.size() - 1))));
}

bool loewner_leq(const SpdMatrix& a, const SpdMatrix& b, double tol) {
  require_same_dim(a.dim(), b.dim());
  const Vector d = sym_eigenvalues(b.sym() - a.sym());
  return d(0) >= -tol;
}

SpdMatrix geodesic(const SpdMatrix& a, const SpdMatrix& b, double t) {
  require_same_dim(a.dim(), b.dim());
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("geodesic parameter must lie in [0,1]");
  if (t == 0.0 || a == b) return a;
  if (t == 1.0) return b;
  const EigenDecomposition c = sym_eigen(whiten(a, b));
  const SymMatrix ct = c.apply([t](double x) { return std::pow(x, t); });
  return SpdMatrix(congruence(a.sqrt_matrix(), ct.matrix()));
}

SymMatrix log_point(const SpdMatrix& x, const SpdMatrix& a) {
  require_same_dim(x.dim(), a.dim());
  if (x == a) return SymMatrix::zero(x.dim());
  const EigenDecomposition c = sym_eigen(whiten(x, a));
  const SymMatrix lc = c.apply([](double v) { return std::log(v); });
  return congruence(x.sqrt_matrix(), lc.matrix());
}

SpdMatrix exp_point(const SpdMatrix& x, const SymMatrix& v) {
  require_same_dim(x.dim(), v.dim());
  if (v == SymMatrix::zero(v.dim())) return x;
  const SpdMatrix e = mat_exp(congruence(x.inv_sqrt_matrix(), v.matrix()));
  return SpdMatrix(congruence(x.sqrt_matrix(), e.matrix()));
}

double log_divided_difference(double a, double b) {
  if (std::abs(a - b) <= 1e-8 * std::max(a, b)) return 1.0 / a;
  return (std::log(a) - std::log(b)) / (a - b);
}

SymMatrix dlog(const SpdMatrix& p, const SymMatrix& v) {
  require_same_dim(p.dim(), v.dim());
  const EigenDecomposition& e = p.eigen();
  Matrix w = e.q.transpose() * v.matrix() * e.q;
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) *= log_divided_difference(e.d(i), e.d(j));
  return symmetric_part(e.q * w * e.q.transpose());
}

NormingState norming_state(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim());
  const int n = a.dim();
  NormingState out;
  if (a == b) {
    out.v = Vector::Unit(n, 0);
    return out;
  }
  const EigenDecomposition c = sym_eigen(whiten(b, a));
  const double lo = c.d(0);
  const double hi = c.d(n - 1);
  Eigen::Index k = 0;
  if (std::log(hi) >= -std::log(lo)) {
    out.side = NormingState::Side::upper;
    k = n - 1;
    while (k > 0 && c.d(k - 1) == hi) --k;
  } else {
    out.side = NormingState::Side::lower;
    k = 0;
  }
  Vector u = b.inv_sqrt_matrix() * c.q.col(k);
  u /= u.norm();
  out.v = u;
  return out;
}

}  // namespace karcher
