#include "karcher/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "karcher/transport.hpp"

namespace karcher {

namespace {

constexpr double kSameAtom = 1e-14;

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<SpdMatrix> atoms, std::vector<double> weights) {
  if (atoms.empty()) throw DomainError("measure has no atoms");
  if (atoms.size() != weights.size()) {
    throw DomainError("measure has " + std::to_string(atoms.size()) + " atoms but " +
                      std::to_string(weights.size()) + " weights");
  }
  const int n = atoms.front().dim();
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    require_same_dim(n, atoms[i].dim());
    if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
      throw DomainError("measure weights must be finite and nonnegative");
    }
    total += weights[i];
  }
  if (!(total > 0.0)) throw DomainError("measure weights sum to zero");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (weights[i] == 0.0) continue;
    atoms_.push_back(std::move(atoms[i]));
    weights_.push_back(weights[i] / total);
  }
}

DiscreteMeasure DiscreteMeasure::uniform(std::vector<SpdMatrix> atoms) {
  std::vector<double> w(atoms.size(), 1.0);
  return DiscreteMeasure(std::move(atoms), std::move(w));
}

DiscreteMeasure DiscreteMeasure::dirac(SpdMatrix atom) {
  return DiscreteMeasure({std::move(atom)}, {1.0});
}

bool DiscreteMeasure::is_uniform() const {
  const double w = 1.0 / static_cast<double>(weights_.size());
  return std::all_of(weights_.begin(), weights_.end(), [w](double x) { return std::abs(x - w) <= 1e-12; });
}

bool same_atom(const SpdMatrix& a, const SpdMatrix& b) {
  if (a == b) return true;
  // d∞(A,B) ≤ δ forces tr B / tr A into [e^{−δ}, e^{δ}].
  if (std::abs(std::log(a.matrix().trace() / b.matrix().trace())) > kSameAtom) return false;
  return thompson_distance(a, b) <= kSameAtom;
}

DiscreteMeasure mix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double s) {
  require_same_dim(mu.dim(), nu.dim());
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("mixing parameter must lie in [0,1]");
  std::vector<SpdMatrix> atoms;
  std::vector<double> weights;
  auto add = [&](const SpdMatrix& a, double w) {
    if (w == 0.0) return;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (same_atom(atoms[i], a)) {
        weights[i] += w;
        return;
      }
    }
    atoms.push_back(a);
    weights.push_back(w);
  };
  for (std::size_t i = 0; i < mu.size(); ++i) add(mu.atom(i), (1.0 - s) * mu.weight(i));
  for (std::size_t i = 0; i < nu.size(); ++i) add(nu.atom(i), s * nu.weight(i));
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

double first_moment(const DiscreteMeasure& mu, const SpdMatrix& x) {
  require_same_dim(mu.dim(), x.dim());
  double sum = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) sum += mu.weight(i) * thompson_distance(x, mu.atom(i));
  return sum;
}

Matrix distance_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_same_dim(mu.dim(), nu.dim());
  Matrix c(static_cast<Eigen::Index>(mu.size()), static_cast<Eigen::Index>(nu.size()));
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j)
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          thompson_distance(mu.atom(i), nu.atom(j));
  return c;
}

W1Result w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const Matrix cost = distance_matrix(mu, nu);
  TransportSolution t = solve_transport(cost, mu.weights(), nu.weights());
  return W1Result{t.cost, Coupling{std::move(t.plan)}};
}

double w1_uniform_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.size() != nu.size()) throw DomainError("oracle needs equal atom counts");
  if (mu.size() > 8) throw DomainError("oracle is limited to 8 atoms");
  if (!mu.is_uniform() || !nu.is_uniform()) throw DomainError("oracle needs uniform measures");
  const Matrix cost = distance_matrix(mu, nu);
  const int n = static_cast<int>(mu.size());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += cost(i, perm[static_cast<std::size_t>(i)]);
    best = std::min(best, s / n);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

DiscreteMeasure pushforward(const DiscreteMeasure& mu,
                            const std::function<SpdMatrix(const SpdMatrix&)>& f) {
  std::vector<SpdMatrix> atoms;
  atoms.reserve(mu.size());
  for (const SpdMatrix& a : mu.atoms()) atoms.push_back(f(a));
  return DiscreteMeasure(std::move(atoms), mu.weights());
}

}  // namespace karcher
