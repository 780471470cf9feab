#include "dbtsw/exactot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dbtsw/error.hpp"

namespace dbtsw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Edge {
  int to;
  int rev;
  double cap;
  double cost;
};

class FlowGraph {
 public:
  explicit FlowGraph(int nodes) : adj_(static_cast<std::size_t>(nodes)) {}

  void add_edge(int from, int to, double cap, double cost) {
    auto& a = adj_[static_cast<std::size_t>(from)];
    auto& b = adj_[static_cast<std::size_t>(to)];
    a.push_back({to, static_cast<int>(b.size()), cap, cost});
    b.push_back({from, static_cast<int>(a.size()) - 1, 0.0, -cost});
  }

  // Pushes up to `amount` units from s to t along shortest paths. Returns
  // the total cost of the flow sent.
  double min_cost_flow(int s, int t, double amount) {
    const std::size_t nv = adj_.size();
    std::vector<double> potential(nv, 0.0);
    std::vector<double> dist(nv);
    std::vector<int> prev_node(nv);
    std::vector<int> prev_edge(nv);
    std::vector<char> done(nv);
    double cost = 0.0;
    double remaining = amount;
    const double eps = 1e-14;

    while (remaining > eps) {
      // Dense Dijkstra on reduced costs.
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(done.begin(), done.end(), 0);
      dist[static_cast<std::size_t>(s)] = 0.0;
      for (std::size_t iter = 0; iter < nv; ++iter) {
        int u = -1;
        double best = kInf;
        for (std::size_t v = 0; v < nv; ++v) {
          if (!done[v] && dist[v] < best) {
            best = dist[v];
            u = static_cast<int>(v);
          }
        }
        if (u < 0) break;
        done[static_cast<std::size_t>(u)] = 1;
        const auto& edges = adj_[static_cast<std::size_t>(u)];
        for (std::size_t e = 0; e < edges.size(); ++e) {
          const Edge& ed = edges[e];
          if (ed.cap <= eps) continue;
          const double reduced = std::max(
              0.0, ed.cost + potential[static_cast<std::size_t>(u)] -
                       potential[static_cast<std::size_t>(ed.to)]);
          const double nd = dist[static_cast<std::size_t>(u)] + reduced;
          if (nd < dist[static_cast<std::size_t>(ed.to)]) {
            dist[static_cast<std::size_t>(ed.to)] = nd;
            prev_node[static_cast<std::size_t>(ed.to)] = u;
            prev_edge[static_cast<std::size_t>(ed.to)] = static_cast<int>(e);
          }
        }
      }
      if (dist[static_cast<std::size_t>(t)] == kInf) break;
      for (std::size_t v = 0; v < nv; ++v) {
        if (dist[v] < kInf) potential[v] += dist[v];
      }

      double push = remaining;
      for (int v = t; v != s; v = prev_node[static_cast<std::size_t>(v)]) {
        const Edge& ed = adj_[static_cast<std::size_t>(prev_node[static_cast<std::size_t>(v)])]
                             [static_cast<std::size_t>(prev_edge[static_cast<std::size_t>(v)])];
        push = std::min(push, ed.cap);
      }
      for (int v = t; v != s; v = prev_node[static_cast<std::size_t>(v)]) {
        Edge& ed = adj_[static_cast<std::size_t>(prev_node[static_cast<std::size_t>(v)])]
                       [static_cast<std::size_t>(prev_edge[static_cast<std::size_t>(v)])];
        ed.cap -= push;
        adj_[static_cast<std::size_t>(ed.to)][static_cast<std::size_t>(ed.rev)].cap += push;
        cost += push * ed.cost;
      }
      remaining -= push;
    }
    return cost;
  }

 private:
  std::vector<std::vector<Edge>> adj_;
};

void check_mass(const Vector& m, const char* name) {
  if (m.size() == 0) throw InvalidMeasure(std::string(name) + " is empty");
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m(i)) || m(i) < 0.0) {
      throw InvalidMeasure(std::string(name) + " has a negative or non-finite entry");
    }
  }
  if (std::abs(m.sum() - 1.0) > 1e-8) {
    throw MassError(std::string(name) + " does not sum to 1");
  }
}

}  // namespace

std::vector<int> solve_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.rows() != cost.cols()) throw SizeError("assignment needs a square cost matrix");
  if (n == 0) return {};
  // 1-indexed potentials u (rows), v (cols); p[j] is the row matched to col j.
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<int> p(static_cast<std::size_t>(n + 1), 0);
  std::vector<int> way(static_cast<std::size_t>(n + 1), 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), kInf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  return row_to_col;
}

Matrix euclidean_cost(const Matrix& X, const Matrix& Y) {
  if (X.cols() != Y.cols()) throw DimensionError("cost: dimensions differ");
  Matrix c(X.rows(), Y.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < Y.rows(); ++j) {
      c(i, j) = (X.row(i) - Y.row(j)).norm();
    }
  }
  return c;
}

double exact_wp_assignment(const Matrix& X, const Matrix& Y, double p) {
  if (X.rows() != Y.rows()) throw SizeError("assignment needs equal sample counts");
  if (X.cols() != Y.cols()) throw DimensionError("assignment: dimensions differ");
  if (X.rows() == 0) throw SizeError("assignment needs at least one sample");
  if (!(p >= 1.0)) throw ConfigError("p must be >= 1");
  Matrix c = euclidean_cost(X, Y);
  if (p != 1.0) c = c.array().pow(p).matrix();
  const auto match = solve_assignment(c);
  double total = 0.0;
  for (std::size_t i = 0; i < match.size(); ++i) {
    total += c(static_cast<Eigen::Index>(i), match[i]);
  }
  return std::pow(total / static_cast<double>(X.rows()), 1.0 / p);
}

double exact_w1_lp(const Vector& a, const Vector& b, const Matrix& cost) {
  check_mass(a, "source mass");
  check_mass(b, "target mass");
  if (cost.rows() != a.size() || cost.cols() != b.size()) {
    throw SizeError("cost shape does not match the marginals");
  }
  if (cost.size() > kExactLpMaxEntries) {
    throw ScaleError("exact LP limited to " + std::to_string(kExactLpMaxEntries) +
                     " cost entries, got " + std::to_string(cost.size()));
  }
  for (Eigen::Index i = 0; i < cost.size(); ++i) {
    const double c = cost.data()[i];
    if (!std::isfinite(c) || c < 0.0) throw DataError("costs must be finite and >= 0");
  }

  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  const int s = 0;
  const int t = n + m + 1;
  FlowGraph g(n + m + 2);
  for (int i = 0; i < n; ++i) g.add_edge(s, 1 + i, a(i), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) g.add_edge(1 + i, 1 + n + j, kInf, cost(i, j));
  }
  for (int j = 0; j < m; ++j) g.add_edge(1 + n + j, t, b(j), 0.0);
  return g.min_cost_flow(s, t, std::min(a.sum(), b.sum()));
}

}  // namespace dbtsw
