// Acceptance gate: twelve properties, 50 seeded instances each, checked
// against oracles built on Eigen's symmetric eigensolver, closed forms and
// brute force. Prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>

#include "karcher/flow.hpp"
#include "karcher/geometry.hpp"
#include "karcher/lln.hpp"
#include "oracle.hpp"

using namespace karcher;
using oracle::Random;

namespace {

constexpr int kInstances = 50;
constexpr int kDims[] = {2, 4, 8, 16};
constexpr int kSmallDims[] = {2, 4};

int dim(int i) { return kDims[i % 4]; }
int small_dim(int i) { return kSmallDims[i % 2]; }

class Tally {
 public:
  // Records value ≤ bound.
  void le(double value, double bound, const char* what) {
    ++checks_;
    const double margin = bound - value;
    if (margin < worst_) {
      worst_ = margin;
      worst_what_ = what;
    }
  }
  void ok(bool cond, const char* what) { le(cond ? 0.0 : 1.0, 0.0, what); }
  bool passed() const { return checks_ > 0 && worst_ >= 0.0; }
  int checks() const { return checks_; }
  double worst() const { return worst_; }
  const std::string& worst_what() const { return worst_what_; }

 private:
  int checks_ = 0;
  double worst_ = std::numeric_limits<double>::infinity();
  std::string worst_what_;
};

double d(const SpdMatrix& a, const SpdMatrix& b) { return oracle::thompson(a.matrix(), b.matrix()); }
double d(const SpdMatrix& a, const Matrix& b) { return oracle::thompson(a.matrix(), b); }

SolverConfig tight() {
  SolverConfig c;
  c.tol = 1e-12;
  c.max_iter = 200000;
  return c;
}

FlowOptions flow(double tol) {
  FlowOptions o;
  o.tol = tol;
  return o;
}

Matrix residual_oracle(const DiscreteMeasure& mu, const Matrix& x) {
  const Matrix s = oracle::sqrt(x), r = oracle::inv_sqrt(x);
  Matrix acc = Matrix::Zero(x.rows(), x.cols());
  for (std::size_t i = 0; i < mu.size(); ++i) acc += mu.weight(i) * s * oracle::log(r * mu.atom(i).matrix() * r) * s;
  return acc;
}

double first_moment_oracle(const DiscreteMeasure& mu, const SpdMatrix& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += mu.weight(i) * d(mu.atom(i), x);
  return s;
}

double permutation_w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const int k = static_cast<int>(mu.size());
  Matrix c(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) c(i, j) = d(mu.atom(i), nu.atom(j));
  std::vector<int> p(static_cast<std::size_t>(k));
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += c(i, p[i]);
    best = std::min(best, s / k);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

// ---------------------------------------------------------------------------

void two_point(Tally& t) {
  Random rng(1001);
  for (int i = 0; i < kInstances; ++i) {
    const SpdMatrix a = rng.spd(dim(i)), b = rng.spd(dim(i));
    for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const SpdMatrix m = karcher_mean(DiscreteMeasure({a, b}, {1 - s, s}), tight()).value;
      t.le(d(m, oracle::geodesic(a.matrix(), b.matrix(), s)), 1e-9, "d(Λ, A#tB)");
    }
  }
}

void commutative(Tally& t) {
  Random rng(1002);
  for (int i = 0; i < kInstances; ++i) {
    const int n = dim(i);
    const int k = 2 + i % 7;
    // Atoms share an eigenbasis Q, so they commute without being diagonal.
    const Matrix q = Eigen::HouseholderQR<Matrix>(rng.sym(n) + Matrix::Identity(n, n)).householderQ();
    std::vector<SpdMatrix> atoms;
    std::vector<double> w;
    Matrix logsum = Matrix::Zero(n, n);
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
      Eigen::VectorXd e(n);
      for (int r = 0; r < n; ++r) e(r) = rng.uniform(-1.5, 1.5);
      const double wj = rng.uniform(0.2, 1.0);
      atoms.emplace_back(Matrix(q * e.array().exp().matrix().asDiagonal() * q.transpose()));
      logsum += wj * q * e.asDiagonal() * q.transpose();
      total += wj;
      w.push_back(wj);
    }
    const Matrix expected = oracle::exp(logsum / total);
    t.le(d(karcher_mean(DiscreteMeasure(atoms, w), tight()).value, expected), 1e-8, "d(Λ, exp Σ w log A)");
  }
}

void w1_contraction(Tally& t) {
  Random rng(1003);
  for (int i = 0; i < kInstances; ++i) {
    const int n = dim(i);
    const DiscreteMeasure mu = rng.measure(n, 1 + i % 8), nu = rng.measure(n, 1 + (i * 3) % 8);
    t.le(d(karcher_mean(mu, tight()).value, karcher_mean(nu, tight()).value), w1(mu, nu).cost + 1e-8,
         "d(Λμ, Λν) ≤ W1");
  }
  for (int i = 0; i < kInstances; ++i) {
    const int k = 1 + i % 8;
    const DiscreteMeasure mu = rng.measure(dim(i), k, 1.0, true), nu = rng.measure(dim(i), k, 1.0, true);
    t.le(std::abs(w1(mu, nu).cost - permutation_w1(mu, nu)), 1e-9, "W1 vs permutation oracle");
  }
}

void resolvent_suite(Tally& t) {
  Random rng(1004);
  for (int i = 0; i < kInstances; ++i) {
    const int n = dim(i);
    const DiscreteMeasure mu = rng.measure(n, 2 + i % 4);
    const SpdMatrix x = rng.spd(n), y = rng.spd(n);
    const double lam = rng.uniform(0.1, 3.0);
    const SpdMatrix jx = resolvent(mu, lam, x, tight());
    t.le(d(jx, resolvent(mu, lam, y, tight())), d(x, y) / (1 + lam) + 1e-8, "contraction");
    t.le(d(jx, x), lam / (1 + lam) * first_moment_oracle(mu, x) + 1e-8, "d(JλX, X) bound");
    const double small = rng.uniform(0.05, 0.95) * lam;
    const SpdMatrix rhs =
        resolvent(mu, small, SpdMatrix(oracle::geodesic(jx.matrix(), x.matrix(), small / lam)), tight());
    t.le(d(jx, rhs), 1e-8, "resolvent identity");
    double prev = 0.0;
    for (double l : {0.1, 0.05, 0.025}) {
      const SpdMatrix j = resolvent(mu, l, x, tight());
      const Matrix s = oracle::sqrt(j.matrix()), r = oracle::inv_sqrt(j.matrix());
      const Matrix logmap = s * oracle::log(r * x.matrix() * r) * s;
      const double e = Eigen::SelfAdjointEigenSolver<Matrix>(logmap - (x.matrix() - j.matrix()))
                           .eigenvalues()
                           .cwiseAbs()
                           .maxCoeff();
      if (prev > 0.0) {
        t.le(3.0, prev / e, "asymptotic ratio ≥ 3");
        t.le(prev / e, 5.0, "asymptotic ratio ≤ 5");
      }
      prev = e;
    }
  }
}

void exponential_formula_suite(Tally& t) {
  Random rng(1005);
  const double tol = 1e-9;
  for (int i = 0; i < kInstances; ++i) {
    const int n = dim(i);
    const DiscreteMeasure mu = rng.measure(n, 2 + i % 3, 0.5);
    const SpdMatrix x = rng.spd(n, 0.5), y = rng.spd(n, 0.5);
    const double fm = first_moment_oracle(mu, x);
    SpdMatrix prev = exponential_formula(mu, 1.0, 1, x, tight());
    for (int steps = 1; steps <= 8; steps *= 2) {
      const SpdMatrix next = exponential_formula(mu, 1.0, 2 * steps, x, tight());
      t.le(d(prev, next), 2.0 * std::sqrt(1.0 / steps - 0.5 / steps) * fm + 1e-7, "Crandall–Liggett gap");
      prev = next;
    }
    const double s = rng.uniform(0.1, 0.9), u = rng.uniform(0.1, 0.9);
    const SpdMatrix whole = semigroup(mu, s + u, x, flow(tol)).state;
    const SpdMatrix split = semigroup(mu, u, semigroup(mu, s, x, flow(tol)).state, flow(tol)).state;
    t.le(d(whole, split), 2 * tol, "semigroup property");
    const double time = std::array{0.5, 1.0, 2.0}[static_cast<std::size_t>(i % 3)];
    t.le(d(semigroup(mu, time, x, flow(tol)).state, semigroup(mu, time, y, flow(tol)).state),
         std::exp(-time) * d(x, y) + 1e-7, "e^{-t} contraction");
    const SpdMatrix lam = karcher_mean(mu, tight()).value;
    t.le(d(semigroup(mu, 1.0, lam, flow(tol)).state, lam), 10 * tol, "stationarity");
  }
}

void ode_residual(Tally& t) {
  Random rng(1006);
  for (int i = 0; i < kInstances; ++i) {
    const int n = dim(i);
    const DiscreteMeasure mu = rng.measure(n, 3, 0.5);
    const SpdMatrix x = rng.spd(n, 0.5);
    const double ratio = cauchy_residual(mu, x, 1e-2, flow(1e-11)) / cauchy_residual(mu, x, 5e-3, flow(1e-11));
    t.le(1.5, ratio, "Cauchy ratio ≥ 1.5");
    t.le(ratio, 2.5, "Cauchy ratio ≤ 2.5");
    const SpdMatrix a = rng.spd(n), x0 = rng.spd(n);
    const double time = rng.uniform(0.2, 2.0);
    const SpdMatrix s = semigroup(DiscreteMeasure::dirac(a), time, x0, flow(1e-9)).state;
    t.le(d(s, oracle::geodesic(x0.matrix(), a.matrix(), 1 - std::exp(-time))), 1e-6, "single-atom closed form");
  }
}

void approximation_suite(Tally& t) {
  Random rng(1007);
  const double tol = 1e-9;
  for (int i = 0; i < kInstances; ++i) {
    const int n = dim(i);
    const DiscreteMeasure mu = rng.measure(n, 3, 0.5);
    const SpdMatrix x = rng.spd(n, 0.5);
    const NonexpansiveMap f = trotter_map(mu, rng.uniform(0.1, 1.0));
    const double lam = rng.uniform(0.1, 1.0);
    t.le(d(x, approx_resolvent(f, lam, x, 1e-12)) / lam, d(x, f(x)) / f.rho + 1e-8, "approx resolvent estimate");

    const double rho = std::array{0.25, 0.5, 2.0}[static_cast<std::size_t>(i % 3)];
    const NonexpansiveMap g = trotter_map(mu, rho);
    const double time = rng.uniform(0.2, 1.0);
    t.le(d(approx_semigroup(g, time, x, flow(tol)).state, approx_semigroup(g.with_rho(1.0), time / rho, x, flow(tol)).state),
         2 * tol, "S_ρ(t) = S_1(t/ρ)");

    const NonexpansiveMap h = trotter_map(DiscreteMeasure::dirac(rng.spd(n)), rng.uniform(0.2, 1.0));
    const double th = rng.uniform(0.5, 2.0);
    const double dx = d(x, h(x));
    for (int m : {1, 4, 16}) {
      const double r = th / h.rho;
      const double rhs = (r - m + 2 * std::sqrt((r - m) * (r - m) + r)) * dx;
      const double lhs = d(approx_semigroup(h, th, x, flow(tol)).state, [&] {
        SpdMatrix z = x;
        for (int k = 0; k < m; ++k) z = h(z);
        return z;
      }());
      t.le(lhs, rhs + 1e-6, "Chernoff bound");
    }
  }
}

void trotter_suite(Tally& t) {
  Random rng(1008);
  const double lam = 0.1;
  for (int i = 0; i < kInstances; ++i) {
    const int n = dim(i);
    const DiscreteMeasure mu = rng.measure(n, 3, 0.25, true);
    const SpdMatrix x = rng.spd(n, 0.25);
    const SpdMatrix exact = resolvent(mu, lam, x, tight());
    double last = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 8; ++k) {
      const double e = d(approx_resolvent(trotter_map(mu, std::ldexp(1.0, -k)), lam, x, 1e-12), exact);
      t.le(e, last, "resolvent convergence decreasing in ρ");
      last = e;
    }
    t.le(last, 1e-4, "d(J_{λ,ρ}X, JλX) at ρ = 2^-8");
  }
  for (int i = 0; i < kInstances; ++i) {
    const int n = dim(i);
    const DiscreteMeasure mu = rng.measure(n, 3, 0.5, true);
    const SpdMatrix x = rng.spd(n, 0.5);
    const SpdMatrix exact = semigroup(mu, 1.0, x, flow(1e-9)).state;
    std::vector<double> e;
    for (int k = 4; k <= 12; ++k) e.push_back(d(trotter_product(mu, 1.0, 1 << k, x), exact));
    t.le(*std::max_element(e.end() - 3, e.end()), *std::min_element(e.begin(), e.begin() + 3), "Trotter trend");
    t.le(e.back(), 1e-3, "Trotter error at m = 2^12");
  }
}

void power_means(Tally& t) {
  Random rng(1009);
  for (int i = 0; i < kInstances; ++i) {
    const int n = dim(i);
    const DiscreteMeasure mu = rng.measure(n, 2 + i % 4);
    std::vector<SpdMatrix> p;
    for (double s : {1.0, 0.75, 0.5, 0.25, 0.125}) p.push_back(power_mean(mu, s, tight()).value);
    for (std::size_t j = 1; j < p.size(); ++j) {
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Matrix>(p[j - 1].matrix() - p[j].matrix()).eigenvalues();
      t.le(-ev.minCoeff(), 1e-8, "P_s ≥ P_t for s ≥ t");
    }
    std::vector<SpdMatrix> bigger;
    for (const SpdMatrix& a : mu.atoms()) {
      const Matrix v = rng.sym(n);
      bigger.emplace_back(Matrix(a.matrix() + v * v.transpose()));
    }
    const double s = rng.uniform(0.1, 1.0);
    const Matrix gap = power_mean(DiscreteMeasure(bigger, mu.weights()), s, tight()).value.matrix() -
                       power_mean(mu, s, tight()).value.matrix();
    t.le(-Eigen::SelfAdjointEigenSolver<Matrix>(gap).eigenvalues().minCoeff(), 1e-8, "operator monotone in atoms");
  }
  for (int i = 0; i < kInstances; ++i) {
    const int n = dim(i);
    const DiscreteMeasure mu = rng.measure(n, 2 + i % 4, 0.5);
    const SpdMatrix lam = karcher_mean(mu, tight()).value;
    SolverConfig c = tight();
    c.tol = 1e-10;
    const MeanResult p = power_mean(mu, std::ldexp(1.0, -10), c, lam);
    t.le(*p.report.certified_bound, 1e-6, "certified P_t accuracy");
    t.le(d(p.value, lam), 1e-4, "d(P_{2^-10}, Λ)");
  }
}

void frechet(Tally& t) {
  Random rng(1010);
  for (int i = 0; i < kInstances; ++i) {
    const int n = dim(i);
    const DiscreteMeasure mu = rng.measure(n, 2 + i % 4);
    const SpdMatrix x = rng.spd(n);
    const Matrix v = rng.sym(n);
    const double h = 1e-5 * x.norm() / Eigen::SelfAdjointEigenSolver<Matrix>(v).eigenvalues().cwiseAbs().maxCoeff();
    const Matrix fd = (residual_oracle(mu, x.matrix() + h * v) - residual_oracle(mu, x.matrix() - h * v)) / (2 * h);
    t.le((dphi(mu, x, SymMatrix(v)).matrix() - fd).norm() / fd.norm(), 1e-6, "dphi vs finite differences");

    const SpdMatrix lam = karcher_mean(mu, tight()).value;
    const SpdMatrix z = rng.spd(n, 1.5);
    const Matrix s = oracle::sqrt(lam.matrix()), r = oracle::inv_sqrt(lam.matrix());
    const SymMatrix logmap(Matrix(s * oracle::log(r * z.matrix() * r) * s));
    const double lhs = Eigen::SelfAdjointEigenSolver<Matrix>(dphi(mu, lam, logmap).matrix())
                           .eigenvalues()
                           .cwiseAbs()
                           .maxCoeff();
    const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(lam.matrix()).eigenvalues().minCoeff();
    t.le(lmin * d(lam, z) - 1e-8, lhs, "‖Dφ(Λ)[log_Λ Z]‖ lower bound");
  }
}

void uniqueness(Tally& t) {
  Random rng(1011);
  for (int i = 0; i < kInstances; ++i) {
    const int n = dim(i);
    const DiscreteMeasure mu = rng.measure(n, 2 + i % 7);
    std::vector<SpdMatrix> sols;
    for (int s = 0; s < 10; ++s) sols.push_back(karcher_mean(mu, tight(), rng.spd(n, 2.5)).value);
    for (std::size_t a = 0; a < sols.size(); ++a)
      for (std::size_t b = a + 1; b < sols.size(); ++b) t.le(d(sols[a], sols[b]), 1e-8, "multistart agreement");
  }
}

void lln(Tally& t) {
  Random rng(1012);
  for (int i = 0; i < kInstances; ++i) {
    const int n = small_dim(i);
    const SpdLaw law = SpdLaw::finite(rng.measure(n, 2 + i % 7));
    const LlnReport r = lln_run(law, {1, 4, 16, 64}, 1.0, rng.spd(n), static_cast<std::uint64_t>(i));
    for (const LlnRow& row : r.rows) t.le(row.d_mean, *row.w1_to_law + 1e-8, "d_mean ≤ W1");
  }
  const SpdLaw law = SpdLaw::finite(rng.measure(2, 5));
  const SpdMatrix x = rng.spd(2);
  const std::vector<int> sizes{1, 2, 4, 8, 64, 128, 256};
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const std::string a = to_csv(lln_run(law, sizes, 1.0, x, seed));
    const LlnReport rep = lln_run(law, sizes, 1.0, x, seed);
    t.ok(a == to_csv(rep), "byte-identical CSV");
    std::vector<double> small, large;
    for (const LlnRow& row : rep.rows) (row.n <= 8 ? small : large).push_back(row.d_mean);
    auto median = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      const std::size_t h = v.size() / 2;
      return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    };
    t.ok(median(large) < median(small), "median trend");
  }
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Tally&)> run;
  };
  const Criterion criteria[] = {
      {"two-point closed form", two_point},
      {"commutative oracle", commutative},
      {"W1 contraction and permutation oracle", w1_contraction},
      {"resolvent suite", resolvent_suite},
      {"exponential formula", exponential_formula_suite},
      {"ODE residual and single-atom flow", ode_residual},
      {"approximation suite", approximation_suite},
      {"resolvent convergence and Trotter product", trotter_suite},
      {"power means", power_means},
      {"Frechet derivative", frechet},
      {"uniqueness probe", uniqueness},
      {"law of large numbers", lln},
  };
  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    Tally t;
    const auto t0 = std::chrono::steady_clock::now();
    std::string error;
    try {
      c.run(t);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = error.empty() && t.passed();
    failed += !ok;
    std::printf("%s %2d %-42s checks=%-5d worst_margin=%-11.3g (%s) %.1fs%s%s\n", ok ? "PASS" : "FAIL", index,
                c.name, t.checks(), t.worst(), t.worst_what().c_str(), secs, error.empty() ? "" : " error: ",
                error.c_str());
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d/12 criteria passed in %.1fs\n", 12 - failed, total);
  return failed == 0 ? 0 : 1;
}
