#include "karcher/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace karcher {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive");
}

// Refines n = 1, 2, 4, ... backward steps. Row k of the Richardson table holds
// the level-k iterate and its extrapolations; backward Euler has an error
// expansion in whole powers of the step, so column j removes the h^j term.
FlowResult refine(const std::function<SpdMatrix(int)>& euler, double t, double moment,
                  const FlowOptions& opts) {
  if (!(opts.tol > 0.0)) throw DomainError("flow tolerance must be positive");
  std::vector<Matrix> previous_row;
  std::optional<SpdMatrix> previous;
  double gap = std::numeric_limits<double>::infinity();
  for (int level = 0; level <= opts.max_level; ++level) {
    const int n = 1 << level;
    const SpdMatrix e = euler(n);
    std::vector<Matrix> row{e.matrix()};
    const int columns = std::min(level, std::max(opts.extrapolation, 0));
    for (int j = 1; j <= columns; ++j) {
      const double factor = std::ldexp(1.0, j) - 1.0;
      const Matrix& lo = row[static_cast<std::size_t>(j - 1)];
      row.push_back(lo + (lo - previous_row[static_cast<std::size_t>(j - 1)]) / factor);
    }
    std::optional<SpdMatrix> estimate = try_spd(row.back());
    const bool extrapolated_ok = estimate.has_value();
    if (!estimate) estimate = e;

    const double bound = 2.0 * t / std::sqrt(static_cast<double>(n)) * moment;
    gap = (previous && extrapolated_ok) ? thompson_distance(*estimate, *previous)
                                        : std::numeric_limits<double>::infinity();
    if (gap <= opts.tol || bound <= opts.tol) {
      return FlowResult{std::move(*estimate), n, bound, previous ? gap : 0.0};
    }
    previous = std::move(estimate);
    previous_row = std::move(row);
  }
  throw ConvergenceError("exponential formula did not settle by the maximum level",
                         SolveReport{opts.max_level, gap, std::nullopt});
}

}  // namespace

NonexpansiveMap NonexpansiveMap::identity(double rho) {
  require_positive(rho, "step");
  return NonexpansiveMap{[](const SpdMatrix& x) { return x; }, rho, "identity"};
}

NonexpansiveMap NonexpansiveMap::with_rho(double r) const {
  require_positive(r, "step");
  NonexpansiveMap out = *this;
  out.rho = r;
  return out;
}

SpdMatrix exponential_formula(const DiscreteMeasure& mu, double t, int n, const SpdMatrix& x,
                              const SolverConfig& cfg) {
  require_positive(t, "time");
  if (n < 1) throw DomainError("step count must be at least 1");
  return resolvent_power(mu, t / n, n, x, cfg);
}

FlowResult semigroup(const DiscreteMeasure& mu, double t, const SpdMatrix& x,
                     const FlowOptions& opts) {
  require_positive(t, "time");
  require_same_dim(mu.dim(), x.dim());
  const double moment = first_moment(mu, x);
  FlowResult r = refine([&](int n) { return exponential_formula(mu, t, n, x, opts.solver); }, t,
                        moment, opts);
  return r;
}

SpdMatrix flow_to_mean(const DiscreteMeasure& mu, const SpdMatrix& x, double tol,
                       const FlowOptions& opts) {
  require_positive(tol, "tolerance");
  FlowOptions inner = opts;
  inner.tol = std::min(opts.tol, 0.1 * tol);
  SpdMatrix y = x;
  constexpr int kMaxSteps = 1000;
  double step = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kMaxSteps; ++i) {
    SpdMatrix next = semigroup(mu, 1.0, y, inner).state;
    step = thompson_distance(y, next);
    y = std::move(next);
    if (step <= tol) return y;
  }
  throw ConvergenceError("flow did not settle within 1000 unit steps",
                         SolveReport{kMaxSteps, step, std::nullopt});
}

SpdMatrix approx_resolvent(const NonexpansiveMap& f, double lambda, const SpdMatrix& y,
                           double tol) {
  require_positive(lambda, "resolvent step");
  require_positive(f.rho, "map step");
  require_positive(tol, "tolerance");
  const double r = lambda / f.rho;
  const double q = r / (1.0 + r);
  const double stop = tol * (1.0 - q) / q;
  constexpr int kMaxIter = 10'000'000;
  SpdMatrix z = y;
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxIter; ++it) {
    SpdMatrix next = geodesic(y, f(z), q);
    const double step = thompson_distance(z, next);
    z = std::move(next);
    if (step <= stop) return z;
    // Once steps sit at the rounding floor they no longer shrink.
    if (step < 1e-13 && step >= last) return z;
    last = step;
  }
  throw ConvergenceError("approximating resolvent did not converge",
                         SolveReport{kMaxIter, last, last * q / (1.0 - q)});
}

NonexpansiveMap trotter_map(const DiscreteMeasure& mu, double rho, TrotterOrder order) {
  require_positive(rho, "step");
  std::vector<SpdMatrix> atoms = mu.atoms();
  std::vector<double> s(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double rw = rho * mu.weight(i);
    s[i] = rw / (rw + 1.0);
  }
  if (order == TrotterOrder::reverse) {
    std::reverse(atoms.begin(), atoms.end());
    std::reverse(s.begin(), s.end());
  }
  auto fn = [atoms = std::move(atoms), s = std::move(s)](const SpdMatrix& x) {
    SpdMatrix y = x;
    for (std::size_t i = 0; i < atoms.size(); ++i) y = geodesic(y, atoms[i], s[i]);
    return y;
  };
  return NonexpansiveMap{std::move(fn), rho,
                         order == TrotterOrder::forward ? "trotter-forward" : "trotter-reverse"};
}

NonexpansiveMap trotter_map(const std::vector<SpdMatrix>& atoms, double rho, TrotterOrder order) {
  return trotter_map(DiscreteMeasure::uniform(atoms), rho, order);
}

FlowResult approx_semigroup(const NonexpansiveMap& f, double t, const SpdMatrix& x,
                            const FlowOptions& opts) {
  require_positive(t, "time");
  const double moment = thompson_distance(x, f(x)) / f.rho;
  auto euler = [&](int n) {
    SpdMatrix y = x;
    for (int i = 0; i < n; ++i) y = approx_resolvent(f, t / n, y, opts.map_tol);
    return y;
  };
  return refine(euler, t, moment, opts);
}

SpdMatrix trotter_product(const DiscreteMeasure& mu, double t, int m, const SpdMatrix& x,
                          TrotterOrder order) {
  require_positive(t, "time");
  if (m < 1) throw DomainError("step count must be at least 1");
  require_same_dim(mu.dim(), x.dim());
  const NonexpansiveMap f = trotter_map(mu, t / m, order);
  SpdMatrix y = x;
  for (int i = 0; i < m; ++i) y = f(y);
  return y;
}

double cauchy_residual(const DiscreteMeasure& mu, const SpdMatrix& x, double h,
                       const FlowOptions& opts) {
  require_positive(h, "step");
  const SpdMatrix s = semigroup(mu, h, x, opts).state;
  const Matrix diff = (s.matrix() - x.matrix()) / h - karcher_residual(mu, x).matrix();
  return symmetric_part(diff).spectral_norm();
}

ChernoffGap chernoff_gap(const NonexpansiveMap& f, double t, int m, const SpdMatrix& x,
                         const FlowOptions& opts) {
  require_positive(t, "time");
  if (m < 0) throw DomainError("step count must be nonnegative");
  SpdMatrix fm = x;
  for (int i = 0; i < m; ++i) fm = f(fm);
  const SpdMatrix s = approx_semigroup(f, t, x, opts).state;
  const double tr = t / f.rho;
  const double dm = tr - m;
  ChernoffGap g;
  g.lhs = thompson_distance(fm, s);
  g.rhs = (dm + 2.0 * std::sqrt(dm * dm + tr)) * thompson_distance(x, f(x));
  return g;
}

}  // namespace karcher
