#include "karcher/means.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace karcher {

namespace {

// Residual field expressed in the frame whitened by X: φ_μ(X) = X^{1/2}·s·X^{1/2}.
struct Field {
  Matrix s;
  double relative = 0.0;
};

Field field(const DiscreteMeasure& mu, const SpdMatrix& x) {
  const int n = x.dim();
  Field f;
  f.s = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.atom(i) == x) continue;
    const EigenDecomposition c = sym_eigen(whiten(x, mu.atom(i)));
    f.s += mu.weight(i) * c.apply([](double v) { return std::log(v); }).matrix();
  }
  f.relative = congruence(x.sqrt_matrix(), f.s).spectral_norm() / x.norm();
  return f;
}

struct Attempt {
  std::optional<SpdMatrix> value;
  SolveReport best;
};

// Damped residual iteration X ← exp_X(α·φ_μ(X)). α starts at `damping` and is
// halved whenever a step fails to decrease the residual; below 1/1024 the
// attempt is abandoned as stagnant.
Attempt polish(const DiscreteMeasure& mu, const SpdMatrix& x0, const SolverConfig& cfg,
               int& iterations) {
  SpdMatrix x = x0;
  Field f = field(mu, x);
  Attempt out;
  out.best = SolveReport{iterations, f.relative, std::nullopt};
  double alpha = cfg.damping;
  for (int it = 0;; ++it) {
    if (f.relative <= cfg.tol) {
      out.value = x;
      out.best = SolveReport{iterations, f.relative, std::nullopt};
      return out;
    }
    if (it >= cfg.max_iter) return out;
    ++iterations;
    std::optional<SpdMatrix> next;
    Field fn;
    try {
      const SpdMatrix step = mat_exp(symmetric_part(alpha * f.s));
      next = SpdMatrix(congruence(x.sqrt_matrix(), step.matrix()));
      fn = field(mu, *next);
    } catch (const NotPositiveDefinite&) {
      next.reset();
    }
    if (next && fn.relative < f.relative) {
      x = std::move(*next);
      f = std::move(fn);
      out.best = SolveReport{iterations, f.relative, std::nullopt};
    } else {
      alpha *= 0.5;
      if (alpha < 1.0 / 1024.0) return out;
    }
  }
}

SpdMatrix weighted_arithmetic_mean(const DiscreteMeasure& mu) {
  return arithmetic_mean(mu.atoms(), mu.weights());
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw DomainError("tol must be positive");
  if (max_iter <= 0) throw DomainError("max_iter must be positive");
  if (!(power_t_start > 0.0 && power_t_start <= 1.0)) {
    throw DomainError("power_t_start must lie in (0,1]");
  }
  if (!(power_t_shrink > 0.0 && power_t_shrink < 1.0)) {
    throw DomainError("power_t_shrink must lie in (0,1)");
  }
  if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("damping must lie in (0,1]");
}

SymMatrix karcher_residual(const DiscreteMeasure& mu, const SpdMatrix& x) {
  require_same_dim(mu.dim(), x.dim());
  SymMatrix sum = SymMatrix::zero(x.dim());
  for (std::size_t i = 0; i < mu.size(); ++i) sum += mu.weight(i) * log_point(x, mu.atom(i));
  return sum;
}

double relative_residual(const DiscreteMeasure& mu, const SpdMatrix& x) {
  require_same_dim(mu.dim(), x.dim());
  return field(mu, x).relative;
}

MeanResult power_mean(const DiscreteMeasure& mu, double t, const SolverConfig& cfg,
                      const std::optional<SpdMatrix>& start) {
  cfg.validate();
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("power mean parameter must lie in (0,1]");
  if (start) require_same_dim(mu.dim(), start->dim());
  if (mu.size() == 1) return MeanResult{mu.atom(0), SolveReport{0, 0.0, 0.0}};
  if (t == 1.0) return MeanResult{weighted_arithmetic_mean(mu), SolveReport{1, 0.0, 0.0}};

  SpdMatrix x = start ? *start : weighted_arithmetic_mean(mu);
  const int n = x.dim();
  double residual = 0.0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    // f(X) = X^{1/2}·(Σ wᵢ·Cᵢ^t)·X^{1/2} with Cᵢ = X^{-1/2}AᵢX^{-1/2}, and
    // d∞(X, f(X)) is read off the spectrum of the middle factor.
    Matrix m = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (mu.atom(i) == x) {
        m += mu.weight(i) * Matrix::Identity(n, n);
        continue;
      }
      const EigenDecomposition c = sym_eigen(whiten(x, mu.atom(i)));
      m += mu.weight(i) * c.apply([t](double v) { return std::pow(v, t); }).matrix();
    }
    const SymMatrix ms = symmetric_part(m);
    const Vector d = sym_eigenvalues(ms);
    const double step = std::max(std::abs(std::log(d(0))), std::abs(std::log(d(n - 1))));
    x = SpdMatrix(congruence(x.sqrt_matrix(), ms.matrix()));
    residual = (1.0 - t) * step;
    if (residual <= cfg.tol) return MeanResult{x, SolveReport{it, residual, residual / t}};
  }
  throw ConvergenceError("power mean did not reach tolerance within max_iter",
                         SolveReport{cfg.max_iter, residual, residual / t});
}

MeanResult karcher_mean(const DiscreteMeasure& mu, const SolverConfig& cfg,
                        const std::optional<SpdMatrix>& start) {
  cfg.validate();
  if (start) require_same_dim(mu.dim(), start->dim());
  if (mu.size() == 1) return MeanResult{mu.atom(0), SolveReport{0, 0.0, std::nullopt}};

  int iterations = 0;
  SolveReport best{0, std::numeric_limits<double>::infinity(), std::nullopt};
  auto keep_best = [&](const SolveReport& r) {
    if (r.residual < best.residual) best = r;
  };

  if (start) {
    Attempt a = polish(mu, *start, cfg, iterations);
    keep_best(a.best);
    if (a.value) return MeanResult{std::move(*a.value), SolveReport{iterations, a.best.residual, std::nullopt}};
  }

  SolverConfig stage = cfg;
  stage.tol = std::max(cfg.tol, 1e-6);
  SpdMatrix x = start ? *start : weighted_arithmetic_mean(mu);
  std::optional<SpdMatrix> previous;
  for (double t = cfg.power_t_start; t > 0.0; t *= cfg.power_t_shrink) {
    MeanResult p;
    try {
      p = power_mean(mu, t, stage, x);
    } catch (const ConvergenceError& e) {
      iterations += e.report().iterations;
      keep_best(SolveReport{iterations, field(mu, x).relative, std::nullopt});
      best.iterations = iterations;
      throw ConvergenceError("Karcher mean: power-mean continuation exhausted max_iter", best);
    }
    iterations += p.report.iterations;
    Attempt a = polish(mu, p.value, cfg, iterations);
    keep_best(a.best);
    if (a.value) {
      return MeanResult{std::move(*a.value), SolveReport{iterations, a.best.residual, std::nullopt}};
    }
    if (previous && thompson_distance(*previous, p.value) <= 10.0 * cfg.tol) break;
    previous = p.value;
    x = std::move(p.value);
  }
  best.iterations = iterations;
  throw ConvergenceError("Karcher mean: residual did not reach tolerance", best);
}

SpdMatrix resolvent(const DiscreteMeasure& mu, double lambda, const SpdMatrix& x,
                    const SolverConfig& cfg) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("resolvent step must be positive");
  require_same_dim(mu.dim(), x.dim());
  const DiscreteMeasure m = mix(mu, DiscreteMeasure::dirac(x), 1.0 / (lambda + 1.0));
  return karcher_mean(m, cfg, x).value;
}

SpdMatrix resolvent_power(const DiscreteMeasure& mu, double lambda, int n, const SpdMatrix& x,
                          const SolverConfig& cfg) {
  if (n < 0) throw DomainError("iteration count must be nonnegative");
  SpdMatrix y = x;
  for (int i = 0; i < n; ++i) y = resolvent(mu, lambda, y, cfg);
  return y;
}

SymMatrix dphi(const DiscreteMeasure& mu, const SpdMatrix& x, const SymMatrix& v) {
  require_same_dim(mu.dim(), x.dim());
  require_same_dim(x.dim(), v.dim());
  const int n = x.dim();
  const Matrix vt = congruence(x.inv_sqrt_matrix(), v.matrix()).matrix();
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < mu.size(); ++k) {
    // In the eigenframe of C = X^{-1/2}AX^{-1/2} the derivative of log_X A acts
    // entrywise by (log cᵢ + log cⱼ)/2 − (cᵢ + cⱼ)/2 · L(cᵢ, cⱼ).
    const EigenDecomposition c = sym_eigen(whiten(x, mu.atom(k)));
    Matrix w = c.q.transpose() * vt * c.q;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double ci = c.d(i);
        const double cj = c.d(j);
        const double g = 0.5 * (std::log(ci) + std::log(cj)) -
                         0.5 * (ci + cj) * log_divided_difference(ci, cj);
        w(i, j) *= g;
      }
    }
    sum += mu.weight(k) * (c.q * w * c.q.transpose());
  }
  return congruence(x.sqrt_matrix(), symmetric_part(sum).matrix());
}

}  // namespace karcher
