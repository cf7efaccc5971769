#include "karcher/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace karcher {

namespace {

struct Cell {
  int i;
  int j;
};

// Spanning tree over k row nodes (0..k-1) and m column nodes (k..k+m-1).
class BasisTree {
 public:
  BasisTree(int k, int m) : k_(k), m_(m) {}

  void rebuild(const std::vector<Cell>& basis) {
    adj_.assign(static_cast<std::size_t>(k_ + m_), {});
    for (int e = 0; e < static_cast<int>(basis.size()); ++e) {
      const Cell& c = basis[static_cast<std::size_t>(e)];
      adj_[static_cast<std::size_t>(c.i)].push_back({k_ + c.j, e});
      adj_[static_cast<std::size_t>(k_ + c.j)].push_back({c.i, e});
    }
  }

  // Potentials with u_0 = 0 and u_i + v_j = c_ij on every basic cell.
  void potentials(const Matrix& cost, const std::vector<Cell>& basis, Vector& u, Vector& v) const {
    const int nodes = k_ + m_;
    std::vector<double> pot(static_cast<std::size_t>(nodes), 0.0);
    std::vector<char> seen(static_cast<std::size_t>(nodes), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (const auto& [y, e] : adj_[static_cast<std::size_t>(x)]) {
        if (seen[static_cast<std::size_t>(y)]) continue;
        const Cell& c = basis[static_cast<std::size_t>(e)];
        seen[static_cast<std::size_t>(y)] = 1;
        pot[static_cast<std::size_t>(y)] = cost(c.i, c.j) - pot[static_cast<std::size_t>(x)];
        stack.push_back(y);
      }
    }
    u.resize(k_);
    v.resize(m_);
    for (int i = 0; i < k_; ++i) u(i) = pot[static_cast<std::size_t>(i)];
    for (int j = 0; j < m_; ++j) v(j) = pot[static_cast<std::size_t>(k_ + j)];
  }

  // Basis edge indices along the tree path from node `from` to node `to`.
  std::vector<int> path(int from, int to) const {
    const int nodes = k_ + m_;
    std::vector<int> parent(static_cast<std::size_t>(nodes), -1);
    std::vector<int> via(static_cast<std::size_t>(nodes), -1);
    std::vector<int> queue{from};
    parent[static_cast<std::size_t>(from)] = from;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int x = queue[head];
      if (x == to) break;
      for (const auto& [y, e] : adj_[static_cast<std::size_t>(x)]) {
        if (parent[static_cast<std::size_t>(y)] != -1) continue;
        parent[static_cast<std::size_t>(y)] = x;
        via[static_cast<std::size_t>(y)] = e;
        queue.push_back(y);
      }
    }
    std::vector<int> edges;
    for (int x = to; x != from; x = parent[static_cast<std::size_t>(x)]) {
      edges.push_back(via[static_cast<std::size_t>(x)]);
    }
    std::reverse(edges.begin(), edges.end());
    return edges;
  }

 private:
  int k_;
  int m_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
};

}  // namespace

TransportSolution solve_transport(const Matrix& cost, const std::vector<double>& a,
                                  const std::vector<double>& b) {
  const int k = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  if (k == 0 || m == 0) throw DomainError("transport problem with an empty side");
  if (cost.rows() != k || cost.cols() != m) throw DimensionMismatch(k * m, static_cast<int>(cost.size()));
  for (double x : a)
    if (!(x >= 0.0)) throw DomainError("negative supply");
  for (double x : b)
    if (!(x >= 0.0)) throw DomainError("negative demand");

  TransportSolution out;
  out.plan = Matrix::Zero(k, m);

  // North-west corner start: a staircase of exactly k + m − 1 basic cells.
  std::vector<Cell> basis;
  basis.reserve(static_cast<std::size_t>(k + m - 1));
  {
    std::vector<double> ra = a;
    std::vector<double> rb = b;
    int i = 0;
    int j = 0;
    while (true) {
      const double x = std::min(ra[static_cast<std::size_t>(i)], rb[static_cast<std::size_t>(j)]);
      out.plan(i, j) = x;
      basis.push_back({i, j});
      ra[static_cast<std::size_t>(i)] -= x;
      rb[static_cast<std::size_t>(j)] -= x;
      if (i == k - 1 && j == m - 1) break;
      if (j == m - 1 || (i < k - 1 && ra[static_cast<std::size_t>(i)] <= rb[static_cast<std::size_t>(j)])) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale;
  const int max_pivots = 50 * (k + m) * (k + m) + 100;

  BasisTree tree(k, m);
  Matrix basic = Matrix::Zero(k, m);
  for (const Cell& c : basis) basic(c.i, c.j) = 1.0;

  for (;;) {
    tree.rebuild(basis);
    tree.potentials(cost, basis, out.u, out.v);

    int ei = -1;
    int ej = -1;
    double best = -eps;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < m; ++j) {
        if (basic(i, j) != 0.0) continue;
        const double r = cost(i, j) - out.u(i) - out.v(j);
        if (r < best) {
          best = r;
          ei = i;
          ej = j;
        }
      }
    }
    if (ei < 0) break;
    if (out.pivots >= max_pivots) {
      throw ConvergenceError("transport simplex exceeded its pivot budget",
                             SolveReport{out.pivots, -best, std::nullopt});
    }

    // Cycle: entering cell (+), then the tree path from row ei to column ej,
    // alternating (−, +, −, ...).
    const std::vector<int> edges = tree.path(ei, k + ej);
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (std::size_t p = 0; p < edges.size(); p += 2) {
      const Cell& c = basis[static_cast<std::size_t>(edges[p])];
      if (out.plan(c.i, c.j) < theta) {
        theta = out.plan(c.i, c.j);
        leave = edges[p];
      }
    }
    out.plan(ei, ej) += theta;
    for (std::size_t p = 0; p < edges.size(); ++p) {
      const Cell& c = basis[static_cast<std::size_t>(edges[p])];
      out.plan(c.i, c.j) += (p % 2 == 0) ? -theta : theta;
    }
    const Cell gone = basis[static_cast<std::size_t>(leave)];
    out.plan(gone.i, gone.j) = 0.0;
    basic(gone.i, gone.j) = 0.0;
    basic(ei, ej) = 1.0;
    basis[static_cast<std::size_t>(leave)] = {ei, ej};
    ++out.pivots;
  }

  out.plan = out.plan.cwiseMax(0.0);
  out.cost = (out.plan.array() * cost.array()).sum();
  return out;
}

}  // namespace karcher
