#include <doctest.h>

#include "karcher/flow.hpp"
#include "karcher/geometry.hpp"
#include "oracle.hpp"

using namespace karcher;

namespace {

FlowOptions with_tol(double tol) {
  FlowOptions o;
  o.tol = tol;
  return o;
}

}  // namespace

TEST_CASE("single-atom flow follows the geodesic in closed form") {
  oracle::Random rng(40);
  for (int n : {2, 3, 4}) {
    const SpdMatrix a = rng.spd(n), x = rng.spd(n);
    for (double t : {0.3, 1.0, 2.5}) {
      const FlowResult r = semigroup(DiscreteMeasure::dirac(a), t, x, with_tol(1e-9));
      const Matrix ref = oracle::geodesic(x.matrix(), a.matrix(), 1 - std::exp(-t));
      CHECK(oracle::thompson(r.state.matrix(), ref) <= 1e-8);
      CHECK(r.n_used >= 1);
      CHECK(r.error_bound == doctest::Approx(2 * t / std::sqrt(r.n_used) * thompson_distance(x, a)));
    }
  }
}

TEST_CASE("scalar flow is exponential relaxation in log coordinates") {
  // d/dt log x = Σ wᵢ log(aᵢ/x), so log x(t) = m + (log x₀ − m)e^{-t}.
  const SpdMatrix a(Matrix::Constant(1, 1, 3.0)), b(Matrix::Constant(1, 1, 0.5));
  const DiscreteMeasure mu({a, b}, {0.4, 0.6});
  const double m = 0.4 * std::log(3.0) + 0.6 * std::log(0.5);
  const double x0 = 2.0, t = 0.8;
  const FlowResult r = semigroup(mu, t, SpdMatrix(Matrix::Constant(1, 1, x0)), with_tol(1e-10));
  CHECK(std::log(r.state.matrix()(0, 0)) == doctest::Approx(m + (std::log(x0) - m) * std::exp(-t)).epsilon(1e-9));
}

TEST_CASE("exponential formula with one step is the resolvent") {
  oracle::Random rng(41);
  const DiscreteMeasure mu = rng.measure(3, 3);
  const SpdMatrix x = rng.spd(3);
  CHECK(thompson_distance(exponential_formula(mu, 0.7, 1, x), resolvent(mu, 0.7, x, FlowOptions{}.solver)) <=
        1e-12);
  CHECK_THROWS_AS(exponential_formula(mu, 0.7, 0, x), DomainError);
}

TEST_CASE("flow at the Karcher mean stays put") {
  oracle::Random rng(42);
  const DiscreteMeasure mu = rng.measure(3, 4);
  SolverConfig c;
  c.tol = 1e-12;
  const SpdMatrix lam = karcher_mean(mu, c).value;
  CHECK(thompson_distance(semigroup(mu, 1.0, lam, with_tol(1e-9)).state, lam) <= 1e-8);
}

TEST_CASE("flow_to_mean converges to the Karcher mean") {
  oracle::Random rng(43);
  const DiscreteMeasure mu = rng.measure(2, 3);
  SolverConfig c;
  c.tol = 1e-12;
  const SpdMatrix lam = karcher_mean(mu, c).value;
  CHECK(thompson_distance(flow_to_mean(mu, rng.spd(2), 1e-8), lam) <= 1e-7);
}

TEST_CASE("semigroup property") {
  oracle::Random rng(44);
  const DiscreteMeasure mu = rng.measure(2, 3, 0.5);
  const SpdMatrix x = rng.spd(2, 0.5);
  const FlowOptions o = with_tol(1e-9);
  const SpdMatrix whole = semigroup(mu, 1.0, x, o).state;
  const SpdMatrix split = semigroup(mu, 0.4, semigroup(mu, 0.6, x, o).state, o).state;
  CHECK(thompson_distance(whole, split) <= 2e-9);
  CHECK_THROWS_AS(semigroup(mu, 0.0, x, o), DomainError);
  CHECK_THROWS_AS(semigroup(mu, -1.0, x, o), DomainError);
}

TEST_CASE("Cauchy residual decays linearly in h") {
  oracle::Random rng(45);
  const DiscreteMeasure mu = rng.measure(2, 3, 0.5);
  const SpdMatrix x = rng.spd(2, 0.5);
  const double r1 = cauchy_residual(mu, x, 1e-2, with_tol(1e-11));
  const double r2 = cauchy_residual(mu, x, 5e-3, with_tol(1e-11));
  CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(0.25));
  const SpdMatrix a = rng.spd(2);
  CHECK(cauchy_residual(DiscreteMeasure::dirac(a), a, 1e-2) <= 1e-6);
}

TEST_CASE("Trotter map weights and order") {
  oracle::Random rng(46);
  const SpdMatrix a = rng.spd(2), b = rng.spd(2), x = rng.spd(2);
  const double rho = 0.6;
  const double s = rho * 0.5 / (rho * 0.5 + 1);
  const DiscreteMeasure mu = DiscreteMeasure::uniform({a, b});
  const Matrix fwd = oracle::geodesic(oracle::geodesic(x.matrix(), a.matrix(), s), b.matrix(), s);
  const Matrix rev = oracle::geodesic(oracle::geodesic(x.matrix(), b.matrix(), s), a.matrix(), s);
  CHECK(oracle::thompson(trotter_map(mu, rho)(x).matrix(), fwd) <= 1e-12);
  CHECK(oracle::thompson(trotter_map(mu, rho, TrotterOrder::reverse)(x).matrix(), rev) <= 1e-12);
  CHECK(trotter_map(mu, rho).rho == rho);
}

TEST_CASE("approximate resolvent of the identity map is the identity") {
  oracle::Random rng(47);
  const SpdMatrix x = rng.spd(3);
  CHECK(thompson_distance(approx_resolvent(NonexpansiveMap::identity(), 0.5, x, 1e-12), x) <= 1e-12);
  CHECK(thompson_distance(approx_semigroup(NonexpansiveMap::identity(), 2.0, x).state, x) <= 1e-12);
}

TEST_CASE("approximate resolvent of a constant map is a geodesic point") {
  oracle::Random rng(48);
  const SpdMatrix a = rng.spd(3), y = rng.spd(3);
  NonexpansiveMap f{[a](const SpdMatrix&) { return a; }, 0.5, "constant"};
  const double lam = 0.3, r = lam / f.rho, q = r / (1 + r);
  const Matrix ref = oracle::geodesic(y.matrix(), a.matrix(), q);
  CHECK(oracle::thompson(approx_resolvent(f, lam, y, 1e-13).matrix(), ref) <= 1e-12);
}

TEST_CASE("Trotter product converges to the flow") {
  oracle::Random rng(49);
  const DiscreteMeasure mu = rng.measure(2, 3, 0.5, true);
  const SpdMatrix x = rng.spd(2, 0.5);
  const SpdMatrix exact = semigroup(mu, 1.0, x, with_tol(1e-9)).state;
  const double coarse = thompson_distance(trotter_product(mu, 1.0, 64, x), exact);
  const double fine = thompson_distance(trotter_product(mu, 1.0, 1024, x), exact);
  CHECK(fine < coarse / 4);
  CHECK(fine <= 1e-3);
}

TEST_CASE("Trotter product for a single atom approaches the closed form") {
  oracle::Random rng(50);
  const SpdMatrix a = rng.spd(2), x = rng.spd(2);
  const Matrix ref = oracle::geodesic(x.matrix(), a.matrix(), 1 - std::exp(-1.0));
  CHECK(oracle::thompson(trotter_product(DiscreteMeasure::dirac(a), 1.0, 1 << 14, x).matrix(), ref) <= 1e-4);
}

TEST_CASE("Chernoff bracket at m = t/rho") {
  oracle::Random rng(51);
  const SpdMatrix x = rng.spd(2);
  const NonexpansiveMap f = trotter_map(DiscreteMeasure::dirac(rng.spd(2)), 0.25);
  const ChernoffGap g = chernoff_gap(f, 1.0, 4, x);
  CHECK(g.rhs == doctest::Approx(2 * std::sqrt(4.0) * thompson_distance(x, f(x))));
  CHECK(g.lhs <= g.rhs + 1e-6);
  const ChernoffGap id = chernoff_gap(NonexpansiveMap::identity(), 1.0, 3, x);
  CHECK(id.lhs <= 1e-12);
}
