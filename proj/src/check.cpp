#include "karcher/check.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <thread>

namespace karcher {

double InstanceGenerator::uniform(double lo, double hi) {
  return lo + (hi - lo) * rng_.uniform(counter_++, 0);
}

double InstanceGenerator::normal() { return rng_.normal(counter_++, 0); }

int InstanceGenerator::integer(int lo, int hi) {
  const int v = lo + static_cast<int>(std::floor(uniform(0.0, 1.0) * (hi - lo + 1)));
  return std::min(v, hi);
}

SpdMatrix InstanceGenerator::spd(int n, double spread) {
  Matrix z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = normal();
  const Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  // Sign fix so that Q is Haar-distributed.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = std::exp(uniform(-spread, spread));
  return SpdMatrix(congruence(q, d.asDiagonal().toDenseMatrix()));
}

SpdMatrix InstanceGenerator::diagonal_spd(int n, double spread) {
  std::vector<double> d(static_cast<std::size_t>(n));
  for (double& x : d) x = std::exp(uniform(-spread, spread));
  return SpdMatrix::diagonal(d);
}

SymMatrix InstanceGenerator::sym(int n) {
  Matrix z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = normal();
  return symmetric_part(z);
}

DiscreteMeasure InstanceGenerator::measure(int n, int k, double spread, bool uniform_weights) {
  std::vector<SpdMatrix> atoms;
  std::vector<double> weights;
  for (int i = 0; i < k; ++i) {
    atoms.push_back(spd(n, spread));
    weights.push_back(uniform_weights ? 1.0 : uniform(0.2, 1.0));
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

namespace {

class Margin {
 public:
  void record(double value, double bound) {
    ++count_;
    worst_ = std::min(worst_, bound - value);
  }
  void require(bool ok) { record(ok ? 0.0 : 1.0, 0.0); }
  int count() const { return count_; }
  double worst() const { return worst_; }

 private:
  int count_ = 0;
  double worst_ = std::numeric_limits<double>::infinity();
};

struct Check {
  const char* anchor;
  const char* description;
  std::function<void(InstanceGenerator&, int, Margin&)> run;
};

int dim_for(int i) { return 2 + i % 3; }

SolverConfig tight() {
  SolverConfig c;
  c.tol = 1e-12;
  c.max_iter = 100000;
  return c;
}

FlowOptions flow_opts(double tol) {
  FlowOptions o;
  o.tol = tol;
  return o;
}

double fro_rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

std::vector<Check> suite() {
  std::vector<Check> s;

  // --- cone geometry ---
  s.push_back({"thompson/metric-axioms", "d(A,A)=0, symmetry, triangle inequality",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const SpdMatrix a = g.spd(n, 1.5), b = g.spd(n, 1.5), c = g.spd(n, 1.5);
                   m.record(thompson_distance(a, a), 1e-10);
                   m.record(std::abs(thompson_distance(a, b) - thompson_distance(b, a)), 1e-10);
                   m.record(thompson_distance(a, c), thompson_distance(a, b) + thompson_distance(b, c) + 1e-9);
                 }
               }});
  s.push_back({"thompson/invariance", "congruence and inversion invariance",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const SpdMatrix a = g.spd(n, 1.5), b = g.spd(n, 1.5);
                   Matrix c(n, n);
                   for (int r = 0; r < n; ++r)
                     for (int k = 0; k < n; ++k) c(r, k) = g.normal();
                   c += 3.0 * Matrix::Identity(n, n);
                   const double d = thompson_distance(a, b);
                   const SpdMatrix ca(congruence(c, a.matrix())), cb(congruence(c, b.matrix()));
                   m.record(std::abs(thompson_distance(ca, cb) - d), 1e-9);
                   m.record(std::abs(thompson_distance(a.inverse(), b.inverse()) - d), 1e-9);
                 }
               }});
  s.push_back({"thompson/emi", "‖log A − log B‖ ≤ d∞(A,B)",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const SpdMatrix a = g.spd(n, 1.5), b = g.spd(n, 1.5);
                   m.record((mat_log(a) - mat_log(b)).spectral_norm(), thompson_distance(a, b) + 1e-10);
                 }
               }});
  s.push_back({"geodesic/parametrization", "d(A#sB, A#uB) = |s−u|·d(A,B)",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const SpdMatrix a = g.spd(n, 1.5), b = g.spd(n, 1.5);
                   const double su = g.uniform(0, 1), u = g.uniform(0, 1);
                   const double lhs = thompson_distance(geodesic(a, b, su), geodesic(a, b, u));
                   m.record(std::abs(lhs - std::abs(su - u) * thompson_distance(a, b)), 1e-9);
                 }
               }});
  s.push_back({"geodesic/contraction", "X ↦ X#tA is (1−t)-Lipschitz, X ↦ A#tX is t-Lipschitz",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const SpdMatrix a = g.spd(n, 1.5), x = g.spd(n, 1.5), y = g.spd(n, 1.5);
                   const double t = g.uniform(0, 1);
                   const double d = thompson_distance(x, y);
                   m.record(thompson_distance(geodesic(x, a, t), geodesic(y, a, t)), (1 - t) * d + 1e-9);
                   m.record(thompson_distance(geodesic(a, x, t), geodesic(a, y, t)), t * d + 1e-9);
                 }
               }});
  s.push_back({"logmap/round-trip", "exp_X(log_X A) = A",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const SpdMatrix x = g.spd(n, 1.5), a = g.spd(n, 1.5);
                   m.record(thompson_distance(exp_point(x, log_point(x, a)), a), 1e-9);
                 }
               }});
  s.push_back({"dlog/finite-difference", "dlog agrees with central differences to 1e-6",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const SpdMatrix p = g.spd(n, 1.5);
                   const SymMatrix v = g.sym(n);
                   const double h = 1e-5 * p.norm() / v.spectral_norm();
                   const Matrix fd = (mat_log(SpdMatrix(p.sym() + h * v)).matrix() -
                                      mat_log(SpdMatrix(p.sym() - h * v)).matrix()) / (2 * h);
                   m.record(fro_rel(dlog(p, v).matrix(), fd), 1e-6);
                 }
               }});
  s.push_back({"norming-state/equality", "ω(B#tA) = e^{±t·d}·ω(B) at t ∈ {0, ¼, ½, 1}",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const SpdMatrix a = g.spd(n, 1.5), b = g.spd(n, 1.5);
                   const NormingState w = norming_state(a, b);
                   const double d = thompson_distance(a, b);
                   const double sign = w.side == NormingState::Side::upper ? 1.0 : -1.0;
                   for (double t : {0.0, 0.25, 0.5, 1.0}) {
                     const double expected = std::exp(sign * t * d) * w.evaluate(b);
                     m.record(std::abs(w.evaluate(geodesic(b, a, t)) - expected), 1e-8 * expected);
                   }
                 }
               }});

  // --- measures ---
  s.push_back({"w1/metric-axioms", "W1 symmetry and triangle inequality",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure a = g.measure(n, g.integer(1, 5), 1.0);
                   const DiscreteMeasure b = g.measure(n, g.integer(1, 5), 1.0);
                   const DiscreteMeasure c = g.measure(n, g.integer(1, 5), 1.0);
                   const double ab = w1(a, b).cost, ba = w1(b, a).cost;
                   m.record(std::abs(ab - ba), 1e-9);
                   m.record(w1(a, c).cost, ab + w1(b, c).cost + 1e-8);
                 }
               }});
  s.push_back({"w1/convexity", "W1 of mixtures ≤ mixture of W1",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure m1 = g.measure(n, 3, 1.0), m2 = g.measure(n, 2, 1.0);
                   const DiscreteMeasure n1 = g.measure(n, 2, 1.0), n2 = g.measure(n, 3, 1.0);
                   const double t = g.uniform(0, 1);
                   const double lhs = w1(mix(m1, m2, t), mix(n1, n2, t)).cost;
                   m.record(lhs, (1 - t) * w1(m1, n1).cost + t * w1(m2, n2).cost + 1e-8);
                 }
               }});
  s.push_back({"w1/permutation-oracle", "W1 equals the permutation minimum for uniform measures",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const int k = g.integer(1, 6);
                   const DiscreteMeasure a = g.measure(n, k, 1.0, true), b = g.measure(n, k, 1.0, true);
                   m.record(std::abs(w1(a, b).cost - w1_uniform_oracle(a, b)), 1e-9);
                 }
               }});
  s.push_back({"w1/dirac", "W1(μ, δ_X) = first moment",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure a = g.measure(n, g.integer(1, 6), 1.0);
                   const SpdMatrix x = g.spd(n, 1.0);
                   m.record(std::abs(w1(a, DiscreteMeasure::dirac(x)).cost - first_moment(a, x)), 1e-10);
                 }
               }});

  // --- means ---
  s.push_back({"karcher/two-point", "Λ((1−t)δA + tδB) = A#tB",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const SpdMatrix a = g.spd(n, 1.0), b = g.spd(n, 1.0);
                   for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                     const DiscreteMeasure mu({a, b}, {1 - t, t});
                     m.record(thompson_distance(karcher_mean(mu, tight()).value, geodesic(a, b, t)), 1e-9);
                   }
                 }
               }});
  s.push_back({"karcher/commutative", "diagonal atoms: Λ = exp(Σ w log A)",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const int k = g.integer(2, 5);
                   std::vector<SpdMatrix> atoms;
                   std::vector<double> w;
                   for (int j = 0; j < k; ++j) {
                     atoms.push_back(g.diagonal_spd(n, 1.0));
                     w.push_back(g.uniform(0.2, 1.0));
                   }
                   const DiscreteMeasure mu(atoms, w);
                   SymMatrix acc = SymMatrix::zero(n);
                   for (std::size_t j = 0; j < mu.size(); ++j) acc += mu.weight(j) * mat_log(mu.atom(j));
                   m.record(thompson_distance(karcher_mean(mu, tight()).value, mat_exp(acc)), 1e-8);
                 }
               }});
  s.push_back({"karcher/w1-contraction", "d(Λμ, Λν) ≤ W1(μ,ν)",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure a = g.measure(n, g.integer(1, 5), 1.0);
                   const DiscreteMeasure b = g.measure(n, g.integer(1, 5), 1.0);
                   const double lhs =
                       thompson_distance(karcher_mean(a, tight()).value, karcher_mean(b, tight()).value);
                   m.record(lhs, w1(a, b).cost + 1e-8);
                 }
               }});
  s.push_back({"karcher/uniform-contraction", "d(Λμ, Λν) ≤ (1/n)Σ d(Ai, Bi)",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const int k = g.integer(2, 5);
                   const DiscreteMeasure a = g.measure(n, k, 1.0, true), b = g.measure(n, k, 1.0, true);
                   double avg = 0.0;
                   for (int j = 0; j < k; ++j) avg += thompson_distance(a.atom(j), b.atom(j)) / k;
                   const double lhs =
                       thompson_distance(karcher_mean(a, tight()).value, karcher_mean(b, tight()).value);
                   m.record(lhs, avg + 1e-8);
                 }
               }});
  s.push_back({"karcher/multistart", "Λ from 10 random starts agrees to 1e-8",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, g.integer(2, 5), 1.0);
                   const SpdMatrix ref = karcher_mean(mu, tight()).value;
                   for (int s0 = 0; s0 < 10; ++s0) {
                     const SpdMatrix start = g.spd(n, 2.0);
                     m.record(thompson_distance(karcher_mean(mu, tight(), start).value, ref), 1e-8);
                   }
                 }
               }});
  s.push_back({"power-mean/monotone", "P_t ≤ P_s for t ≤ s (Loewner)",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 1.0);
                   std::vector<SpdMatrix> p;
                   for (double t : {1.0, 0.5, 0.25, 0.125}) p.push_back(power_mean(mu, t, tight()).value);
                   for (std::size_t j = 1; j < p.size(); ++j) m.require(loewner_leq(p[j], p[j - 1], 1e-8));
                 }
               }});
  s.push_back({"power-mean/operator-monotone", "Ai ≤ Bi ⇒ P_t(μ) ≤ P_t(ν)",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure a = g.measure(n, 3, 1.0);
                   std::vector<SpdMatrix> bigger;
                   for (const SpdMatrix& x : a.atoms()) {
                     const SymMatrix v = g.sym(n);
                     bigger.emplace_back(x.sym() + symmetric_part(v.matrix() * v.matrix()));
                   }
                   const DiscreteMeasure b(bigger, a.weights());
                   const double t = g.uniform(0.1, 1.0);
                   m.require(loewner_leq(power_mean(a, t, tight()).value, power_mean(b, t, tight()).value, 1e-8));
                 }
               }});
  s.push_back({"power-mean/limit", "d(P_{2^-k}, Λ) decreases in k and is ≤ 1e-4 at k = 10",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 0.5);
                   const SpdMatrix lam = karcher_mean(mu, tight()).value;
                   std::optional<SpdMatrix> start;
                   double last = std::numeric_limits<double>::infinity();
                   for (int k = 1; k <= 10; ++k) {
                     const MeanResult p = power_mean(mu, std::ldexp(1.0, -k), tight(), start);
                     start = p.value;
                     const double d = thompson_distance(p.value, lam);
                     m.record(d, last);
                     last = d;
                   }
                   m.record(last, 1e-4);
                 }
               }});
  s.push_back({"resolvent/contraction", "d(JλX, JλY) ≤ d(X,Y)/(1+λ)",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 1.0);
                   const SpdMatrix x = g.spd(n, 1.0), y = g.spd(n, 1.0);
                   const double lam = g.uniform(0.1, 3.0);
                   const double lhs = thompson_distance(resolvent(mu, lam, x, tight()), resolvent(mu, lam, y, tight()));
                   m.record(lhs, thompson_distance(x, y) / (1 + lam) + 1e-8);
                 }
               }});
  s.push_back({"resolvent/identity", "Jτ X = Jλ(Jτ X #_{λ/τ} X) for τ > λ",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 1.0);
                   const SpdMatrix x = g.spd(n, 1.0);
                   const double tau = g.uniform(0.5, 3.0), lam = g.uniform(0.05, 0.45);
                   const SpdMatrix jt = resolvent(mu, tau, x, tight());
                   const SpdMatrix rhs = resolvent(mu, lam, geodesic(jt, x, lam / tau), tight());
                   m.record(thompson_distance(jt, rhs), 1e-8);
                 }
               }});
  s.push_back({"resolvent/bound", "d(JλX, X) ≤ λ/(1+λ)·first moment",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 1.0);
                   const SpdMatrix x = g.spd(n, 1.0);
                   const double lam = g.uniform(0.1, 3.0);
                   m.record(thompson_distance(resolvent(mu, lam, x, tight()), x),
                            lam / (1 + lam) * first_moment(mu, x) + 1e-8);
                 }
               }});
  s.push_back({"resolvent/asymptotics", "‖log_J X − (X − J)‖ shrinks 3–5× per halving of λ",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 1.0);
                   const SpdMatrix x = g.spd(n, 1.0);
                   double prev = 0.0;
                   for (double lam : {0.1, 0.05, 0.025}) {
                     const SpdMatrix j = resolvent(mu, lam, x, tight());
                     const double e = (log_point(j, x) - (x.sym() - j.sym())).spectral_norm();
                     if (prev > 0.0) {
                       m.record(3.0, prev / e);
                       m.record(prev / e, 5.0);
                     }
                     prev = e;
                   }
                 }
               }});
  s.push_back({"dphi/finite-difference", "Dφ agrees with central differences to 1e-6",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 1.0);
                   const SpdMatrix x = g.spd(n, 1.0);
                   const SymMatrix v = g.sym(n);
                   const double h = 1e-5 * x.norm() / v.spectral_norm();
                   const Matrix fd = (karcher_residual(mu, SpdMatrix(x.sym() + h * v)).matrix() -
                                      karcher_residual(mu, SpdMatrix(x.sym() - h * v)).matrix()) / (2 * h);
                   m.record(fro_rel(dphi(mu, x, v).matrix(), fd), 1e-6);
                 }
               }});
  s.push_back({"dphi/lower-bound", "‖Dφ(Λ)[log_Λ Z]‖ ≥ λmin(Λ)·d(Λ,Z)",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 1.0);
                   const SpdMatrix lam = karcher_mean(mu, tight()).value;
                   const SpdMatrix z = g.spd(n, 1.5);
                   const double lhs = dphi(mu, lam, log_point(lam, z)).spectral_norm();
                   m.record(lam.min_eigenvalue() * thompson_distance(lam, z) - 1e-8, lhs);
                 }
               }});

  // --- flow ---
  s.push_back({"flow/exponential-contraction", "d(S(t)X, S(t)Y) ≤ e^{-t}·d(X,Y)",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 0.5);
                   const SpdMatrix x = g.spd(n, 0.5), y = g.spd(n, 0.5);
                   const double t = std::array{0.5, 1.0, 2.0}[static_cast<std::size_t>(i % 3)];
                   const double lhs = thompson_distance(semigroup(mu, t, x, flow_opts(1e-9)).state,
                                                        semigroup(mu, t, y, flow_opts(1e-9)).state);
                   m.record(lhs, std::exp(-t) * thompson_distance(x, y) + 1e-7);
                 }
               }});
  s.push_back({"flow/crandall-liggett", "d(J_{t/n}^n X, J_{t/2n}^{2n} X) ≤ 2t·√(1/n − 1/2n)·first moment",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 0.5);
                   const SpdMatrix x = g.spd(n, 0.5);
                   const double t = 1.0;
                   const double fm = first_moment(mu, x);
                   SpdMatrix prev = exponential_formula(mu, t, 1, x, tight());
                   for (int steps = 1; steps <= 8; steps *= 2) {
                     const SpdMatrix next = exponential_formula(mu, t, 2 * steps, x, tight());
                     m.record(thompson_distance(prev, next),
                              2 * t * std::sqrt(1.0 / steps - 0.5 / steps) * fm + 1e-7);
                     prev = next;
                   }
                 }
               }});
  s.push_back({"flow/time-lipschitz", "d(S(s)X, S(t)X) ≤ 2|s−t|·first moment",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 0.5);
                   const SpdMatrix x = g.spd(n, 0.5);
                   const double s0 = g.uniform(0.1, 1.0), t = g.uniform(0.1, 1.0);
                   const double lhs = thompson_distance(semigroup(mu, s0, x, flow_opts(1e-9)).state,
                                                        semigroup(mu, t, x, flow_opts(1e-9)).state);
                   m.record(lhs, 2 * std::abs(s0 - t) * first_moment(mu, x) + 1e-7);
                 }
               }});
  s.push_back({"flow/semigroup", "S(s+u)X = S(u)S(s)X within 2·tol",
               [](InstanceGenerator& g, int count, Margin& m) {
                 const double tol = 1e-9;
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 0.5);
                   const SpdMatrix x = g.spd(n, 0.5);
                   const double s0 = g.uniform(0.1, 0.8), u = g.uniform(0.1, 0.8);
                   const SpdMatrix whole = semigroup(mu, s0 + u, x, flow_opts(tol)).state;
                   const SpdMatrix split =
                       semigroup(mu, u, semigroup(mu, s0, x, flow_opts(tol)).state, flow_opts(tol)).state;
                   m.record(thompson_distance(whole, split), 2 * tol);
                 }
               }});
  s.push_back({"flow/stationary", "S(1)Λ = Λ within 10·tol",
               [](InstanceGenerator& g, int count, Margin& m) {
                 const double tol = 1e-9;
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 1.0);
                   const SpdMatrix lam = karcher_mean(mu, tight()).value;
                   m.record(thompson_distance(semigroup(mu, 1.0, lam, flow_opts(tol)).state, lam), 10 * tol);
                 }
               }});
  s.push_back({"flow/single-atom", "S(t)X = X#_{1−e^{-t}}A for μ = δ_A",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const SpdMatrix a = g.spd(n, 1.0), x = g.spd(n, 1.0);
                   const double t = g.uniform(0.2, 2.0);
                   const SpdMatrix s0 = semigroup(DiscreteMeasure::dirac(a), t, x, flow_opts(1e-9)).state;
                   m.record(thompson_distance(s0, geodesic(x, a, 1 - std::exp(-t))), 1e-6);
                 }
               }});
  s.push_back({"flow/cauchy-residual", "residual(h)/residual(h/2) ∈ [1.5, 2.5] at h = 1e-2",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 0.5);
                   const SpdMatrix x = g.spd(n, 0.5);
                   const double r = cauchy_residual(mu, x, 1e-2, flow_opts(1e-11)) /
                                    cauchy_residual(mu, x, 5e-3, flow_opts(1e-11));
                   m.record(1.5, r);
                   m.record(r, 2.5);
                 }
               }});

  // --- nonexpansive-map approximations ---
  s.push_back({"approx/nonexpansive", "the Trotter map is nonexpansive",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 1.0);
                   const NonexpansiveMap f = trotter_map(mu, g.uniform(0.1, 2.0));
                   const SpdMatrix x = g.spd(n, 1.0), y = g.spd(n, 1.0);
                   m.record(thompson_distance(f(x), f(y)), thompson_distance(x, y) + 1e-9);
                 }
               }});
  s.push_back({"approx/resolvent-estimate", "d(Y, J_{λ,ρ}Y)/λ ≤ d(Y, F(Y))/ρ",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 1.0);
                   const NonexpansiveMap f = trotter_map(mu, g.uniform(0.1, 1.0));
                   const SpdMatrix y = g.spd(n, 1.0);
                   const double lam = g.uniform(0.1, 1.0);
                   m.record(thompson_distance(y, approx_resolvent(f, lam, y, 1e-12)) / lam,
                            thompson_distance(y, f(y)) / f.rho + 1e-8);
                 }
               }});
  s.push_back({"approx/resolvent-identity", "J_{λ,ρ}X = J_{μ,ρ}(J_{λ,ρ}X #_{μ/λ} X) for λ > μ",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 1.0);
                   const NonexpansiveMap f = trotter_map(mu, g.uniform(0.2, 1.0));
                   const SpdMatrix x = g.spd(n, 1.0);
                   const double lam = g.uniform(0.5, 1.0), small = g.uniform(0.05, 0.45);
                   const SpdMatrix jl = approx_resolvent(f, lam, x, 1e-13);
                   const SpdMatrix rhs = approx_resolvent(f, small, geodesic(jl, x, small / lam), 1e-13);
                   m.record(thompson_distance(jl, rhs), 1e-8);
                 }
               }});
  s.push_back({"approx/iterated-bound", "d(J_{λ,ρ}^n X, X) ≤ n·(λ/ρ)·d(X, F(X))",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 1.0);
                   const NonexpansiveMap f = trotter_map(mu, g.uniform(0.2, 1.0));
                   const SpdMatrix x = g.spd(n, 1.0);
                   const double lam = g.uniform(0.05, 0.5);
                   SpdMatrix y = x;
                   for (int k = 1; k <= 5; ++k) {
                     y = approx_resolvent(f, lam, y, 1e-12);
                     m.record(thompson_distance(y, x), k * lam / f.rho * thompson_distance(x, f(x)) + 1e-8);
                   }
                 }
               }});
  s.push_back({"approx/scaling", "S_ρ(t)X = S_1(t/ρ)X within 2·tol",
               [](InstanceGenerator& g, int count, Margin& m) {
                 const double tol = 1e-9;
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 0.5);
                   const double rho = std::array{0.25, 0.5, 2.0}[static_cast<std::size_t>(i % 3)];
                   const NonexpansiveMap f = trotter_map(mu, rho);
                   const SpdMatrix x = g.spd(n, 0.5);
                   const double t = g.uniform(0.2, 1.0);
                   const SpdMatrix a = approx_semigroup(f, t, x, flow_opts(tol)).state;
                   const SpdMatrix b = approx_semigroup(f.with_rho(1.0), t / rho, x, flow_opts(tol)).state;
                   m.record(thompson_distance(a, b), 2 * tol);
                 }
               }});
  s.push_back({"approx/chernoff", "d(F^m X, S_ρ(t)X) ≤ [t/ρ − m + 2√((t/ρ − m)² + t/ρ)]·d(X, F(X))",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const NonexpansiveMap f = trotter_map(DiscreteMeasure::dirac(g.spd(n, 1.0)), g.uniform(0.2, 1.0));
                   const SpdMatrix x = g.spd(n, 1.0);
                   const double t = g.uniform(0.5, 2.0);
                   for (int steps : {1, 4, 16}) {
                     const ChernoffGap gap = chernoff_gap(f, t, steps, x, flow_opts(1e-9));
                     m.record(gap.lhs, gap.rhs + 1e-6);
                   }
                 }
               }});
  s.push_back({"trotter/resolvent-convergence", "d(J_{λ,ρ}X, JλX) decreases in ρ and is ≤ 1e-4 at ρ = 2^-8",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 0.25, true);
                   const SpdMatrix x = g.spd(n, 0.25);
                   const double lam = 0.1;
                   const SpdMatrix exact = resolvent(mu, lam, x, tight());
                   double last = std::numeric_limits<double>::infinity();
                   for (int k = 0; k <= 8; ++k) {
                     const NonexpansiveMap f = trotter_map(mu, std::ldexp(1.0, -k));
                     const double d = thompson_distance(approx_resolvent(f, lam, x, 1e-12), exact);
                     m.record(d, last);
                     last = d;
                   }
                   m.record(last, 1e-4);
                 }
               }});
  s.push_back({"trotter/product-convergence", "d((F_{t/m})^m X, S(t)X) ≤ 1e-3 at m = 2^12 with a decreasing trend",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < count; ++i) {
                   const int n = dim_for(i);
                   const DiscreteMeasure mu = g.measure(n, 3, 0.5, true);
                   const SpdMatrix x = g.spd(n, 0.5);
                   const SpdMatrix exact = semigroup(mu, 1.0, x, flow_opts(1e-9)).state;
                   std::vector<double> d;
                   for (int k = 4; k <= 12; ++k) {
                     d.push_back(thompson_distance(trotter_product(mu, 1.0, 1 << k, x), exact));
                   }
                   const double head = *std::min_element(d.begin(), d.begin() + 3);
                   const double tail = *std::max_element(d.end() - 3, d.end());
                   m.record(tail, head);
                   m.record(d.back(), 1e-3);
                 }
               }});

  // --- law of large numbers ---
  s.push_back({"lln/w1-bound", "d(Λ(μ_n), Λ(μ)) ≤ W1(μ_n, μ) on every row",
               [](InstanceGenerator& g, int count, Margin& m) {
                 for (int i = 0; i < std::max(1, count / 5); ++i) {
                   const int n = dim_for(i);
                   const SpdLaw law = SpdLaw::finite(g.measure(n, 3, 1.0));
                   const LlnReport r = lln_run(law, {1, 4, 16, 64}, 1.0, g.spd(n, 1.0),
                                               static_cast<std::uint64_t>(g.integer(0, 1 << 30)));
                   for (const LlnRow& row : r.rows) m.record(row.d_mean, *row.w1_to_law + 1e-8);
                 }
               }});
  s.push_back({"lln/reproducible", "identical inputs give identical CSV bytes",
               [](InstanceGenerator& g, int, Margin& m) {
                 const SpdLaw law = SpdLaw::finite(g.measure(2, 3, 1.0));
                 const SpdMatrix x = g.spd(2, 1.0);
                 const std::string a = to_csv(lln_run(law, {1, 8, 32}, 0.5, x, 7));
                 const std::string b = to_csv(lln_run(law, {1, 8, 32}, 0.5, x, 7));
                 m.require(a == b);
               }});
  s.push_back({"lln/trend", "median d_mean over n ≥ 64 is below the median over n ≤ 8",
               [](InstanceGenerator& g, int, Margin& m) {
                 const SpdLaw law = SpdLaw::finite(g.measure(2, 3, 1.0));
                 const SpdMatrix x = g.spd(2, 1.0);
                 for (std::uint64_t seed : {1u, 2u, 3u}) {
                   const LlnReport r = lln_run(law, {1, 2, 4, 8, 64, 128, 256}, 1.0, x, seed);
                   std::vector<double> small, large;
                   for (const LlnRow& row : r.rows) (row.n <= 8 ? small : large).push_back(row.d_mean);
                   auto median = [](std::vector<double> v) {
                     std::sort(v.begin(), v.end());
                     const std::size_t h = v.size() / 2;
                     return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
                   };
                   m.record(median(large), median(small) - 1e-300);
                 }
               }});
  return s;
}

}  // namespace

std::vector<std::string> check_anchors() {
  std::vector<std::string> out;
  for (const Check& c : suite()) out.emplace_back(c.anchor);
  return out;
}

std::vector<CheckResult> run_invariant_suite(const CheckOptions& opts) {
  const std::vector<Check> checks = suite();
  std::vector<CheckResult> results(checks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < checks.size(); i = next++) {
      CheckResult& r = results[i];
      r.anchor = checks[i].anchor;
      r.description = checks[i].description;
      InstanceGenerator gen(opts.seed, i + 1);
      Margin margin;
      try {
        checks[i].run(gen, std::max(1, opts.instances), margin);
        r.instances = margin.count();
        r.worst_margin = margin.worst();
        r.passed = margin.count() > 0 && margin.worst() >= 0.0;
      } catch (const std::exception& e) {
        r.instances = margin.count();
        r.worst_margin = -std::numeric_limits<double>::infinity();
        r.passed = false;
        r.detail = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(checks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

}  // namespace karcher
