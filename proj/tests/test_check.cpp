#include <doctest.h>

#include <set>

#include "karcher/check.hpp"
#include "karcher/geometry.hpp"

using namespace karcher;

TEST_CASE("instance generator is deterministic and valid") {
  InstanceGenerator a(5, 1), b(5, 1);
  for (int i = 0; i < 5; ++i) {
    const SpdMatrix x = a.spd(3, 1.0), y = b.spd(3, 1.0);
    CHECK(x == y);
    CHECK(x.min_eigenvalue() >= std::exp(-1.0) * (1 - 1e-12));
    CHECK(x.max_eigenvalue() <= std::exp(1.0) * (1 + 1e-12));
  }
  for (int i = 0; i < 100; ++i) {
    const int k = a.integer(2, 4);
    CHECK(k >= 2);
    CHECK(k <= 4);
  }
  const DiscreteMeasure mu = a.measure(2, 4, 1.0, true);
  CHECK(mu.size() == 4);
  CHECK(mu.is_uniform());
}

TEST_CASE("anchors are unique") {
  const std::vector<std::string> anchors = check_anchors();
  CHECK(anchors.size() > 30);
  CHECK(std::set<std::string>(anchors.begin(), anchors.end()).size() == anchors.size());
}

TEST_CASE("invariant suite passes and is thread-count independent") {
  CheckOptions one;
  one.instances = 2;
  CheckOptions many = one;
  many.threads = 4;
  const std::vector<CheckResult> a = run_invariant_suite(one);
  const std::vector<CheckResult> b = run_invariant_suite(many);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    INFO(a[i].anchor << ": " << a[i].detail);
    CHECK(a[i].passed);
    CHECK(a[i].instances > 0);
    CHECK(a[i].anchor == b[i].anchor);
    CHECK(a[i].worst_margin == b[i].worst_margin);
  }
}
